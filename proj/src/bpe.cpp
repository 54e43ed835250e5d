#include "bitext/bpe.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <map>

#include "bitext/error.hpp"
#include "bitext/rng.hpp"
#include "bitext/unicode.hpp"

namespace bitext {

namespace {

using SymbolPair = std::pair<std::string, std::string>;

struct PairHash {
  std::size_t operator()(const SymbolPair& p) const {
    std::uint64_t h = fnv1a64(p.first.data(), p.first.size());
    h ^= splitmix64(fnv1a64(p.second.data(), p.second.size()));
    return static_cast<std::size_t>(h);
  }
};

std::string fold_ascii(std::string_view text, bool lowercase) {
  std::string out(text);
  if (lowercase)
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

template <class Fn>
void for_each_word(std::string_view text, Fn&& fn) {
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) fn(text.substr(start, i - start));
  }
}

std::vector<std::string> word_symbols(std::string_view word) {
  std::vector<std::string> symbols = utf8_split(word);
  if (!symbols.empty()) symbols.back() += BpeModel::kEndOfWord;
  return symbols;
}

// merges every left-to-right occurrence of `pair`, skipping past each merge
void merge_in_word(std::vector<std::string>& symbols, const SymbolPair& pair) {
  std::vector<std::string> merged;
  merged.reserve(symbols.size());
  std::size_t i = 0;
  while (i < symbols.size()) {
    if (i + 1 < symbols.size() && symbols[i] == pair.first && symbols[i + 1] == pair.second) {
      merged.push_back(symbols[i] + symbols[i + 1]);
      i += 2;
    } else {
      merged.push_back(std::move(symbols[i]));
      ++i;
    }
  }
  symbols = std::move(merged);
}

}  // namespace

BpeModel learn_bpe(std::span<const Corpus> corpora, int num_merges, bool lowercase) {
  if (num_merges < 1) throw ValidationError("num_merges must be >= 1");

  // pooled word frequencies over every language; std::map keeps the word
  // order deterministic
  std::map<std::string, std::uint64_t> word_freq;
  for (const Corpus& corpus : corpora)
    for (const auto& rec : corpus.records)
      for_each_word(fold_ascii(rec.text, lowercase),
                    [&](std::string_view w) { ++word_freq[std::string(w)]; });
  if (word_freq.empty()) throw ValidationError("empty pooled corpus");

  struct Word {
    std::vector<std::string> symbols;
    std::uint64_t freq;
  };
  std::vector<Word> words;
  words.reserve(word_freq.size());
  for (const auto& [w, f] : word_freq) words.push_back({word_symbols(w), f});

  std::unordered_map<SymbolPair, std::uint64_t, PairHash> pair_counts;
  std::unordered_map<SymbolPair, std::vector<std::uint32_t>, PairHash> pair_words;
  auto add_word_pairs = [&](std::uint32_t wid, std::int64_t sign) {
    const Word& word = words[wid];
    for (std::size_t i = 0; i + 1 < word.symbols.size(); ++i) {
      SymbolPair p{word.symbols[i], word.symbols[i + 1]};
      if (sign > 0) {
        pair_counts[p] += word.freq;
        pair_words[p].push_back(wid);
      } else {
        auto it = pair_counts.find(p);
        it->second -= word.freq;
        if (it->second == 0) pair_counts.erase(it);
      }
    }
  };
  for (std::uint32_t wid = 0; wid < words.size(); ++wid) add_word_pairs(wid, +1);

  BpeModel model;
  while (static_cast<int>(model.merges.size()) < num_merges) {
    // argmax by count, ties to the lexicographically smallest pair; the
    // scan order of the hash map does not matter under this total order
    const SymbolPair* best = nullptr;
    std::uint64_t best_count = 0;
    for (const auto& [p, c] : pair_counts) {
      if (c > best_count || (c == best_count && best && p < *best)) {
        best = &p;
        best_count = c;
      }
    }
    if (best == nullptr || best_count < 2) break;
    SymbolPair merge = *best;
    model.merges.push_back(merge);

    std::vector<std::uint32_t> candidates = pair_words[merge];
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (std::uint32_t wid : candidates) {
      Word& word = words[wid];
      bool contains = false;
      for (std::size_t i = 0; i + 1 < word.symbols.size() && !contains; ++i)
        contains = word.symbols[i] == merge.first && word.symbols[i + 1] == merge.second;
      if (!contains) continue;  // stale index entry
      add_word_pairs(wid, -1);
      merge_in_word(word.symbols, merge);
      add_word_pairs(wid, +1);
    }
    pair_words.erase(merge);
  }
  return model;
}

void BpeModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "#bpe v1 " << merges.size() << '\n';
  for (const auto& [left, right] : merges) out << left << ' ' << right << '\n';
  if (!out) throw IoError("write failed: " + path);
}

BpeModel BpeModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open BPE model: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#bpe v1 ", 0) != 0)
    throw ParseError(path + ": missing '#bpe v1' header");
  std::size_t declared = 0;
  try {
    declared = std::stoul(line.substr(8));
  } catch (const std::exception&) {
    throw ParseError(path + ": bad merge count in header");
  }
  BpeModel model;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t space = line.find(' ');
    if (space == std::string::npos || space == 0 || space + 1 == line.size())
      throw ParseError(path, lineno, "expected 'left right'");
    model.merges.emplace_back(line.substr(0, space), line.substr(space + 1));
  }
  if (model.merges.size() != declared)
    throw ParseError(path + ": header declares " + std::to_string(declared) +
                     " merges, file has " + std::to_string(model.merges.size()));
  return model;
}

BpeApplier::BpeApplier(const BpeModel& model, bool lowercase) : lowercase_(lowercase) {
  ranks_.reserve(model.merges.size());
  for (std::size_t r = 0; r < model.merges.size(); ++r) {
    const auto& [left, right] = model.merges[r];
    std::string key = left;
    key += '\x01';
    key += right;
    if (!ranks_.emplace(std::move(key), static_cast<int>(r)).second)
      throw ValidationError("duplicate merge in BPE model: " + left + " " + right);
  }
}

std::vector<std::string> BpeApplier::apply_word(std::string_view word) const {
  std::vector<std::string> symbols = word_symbols(word);
  while (symbols.size() > 1) {
    int best_rank = std::numeric_limits<int>::max();
    std::size_t best_pos = 0;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      std::string key = symbols[i];
      key += '\x01';
      key += symbols[i + 1];
      auto it = ranks_.find(key);
      if (it != ranks_.end() && it->second < best_rank) {
        best_rank = it->second;
        best_pos = i;
      }
    }
    if (best_rank == std::numeric_limits<int>::max()) break;
    merge_in_word(symbols, {symbols[best_pos], symbols[best_pos + 1]});
  }
  return symbols;
}

std::vector<std::string> BpeApplier::apply(std::string_view text) const {
  std::vector<std::string> tokens;
  for_each_word(fold_ascii(text, lowercase_), [&](std::string_view w) {
    for (auto& s : apply_word(w)) tokens.push_back(std::move(s));
  });
  return tokens;
}

std::vector<std::string> apply_bpe(const BpeModel& model, std::string_view text,
                                   bool lowercase) {
  return BpeApplier(model, lowercase).apply(text);
}

std::string detokenize(std::span<const std::string> tokens) {
  const std::string marker = BpeModel::kEndOfWord;
  std::string out;
  std::string word;
  for (const auto& token : tokens) {
    if (token.size() >= marker.size() &&
        token.compare(token.size() - marker.size(), marker.size(), marker) == 0) {
      word += token.substr(0, token.size() - marker.size());
      if (!out.empty()) out += ' ';
      out += word;
      word.clear();
    } else {
      word += token;
    }
  }
  if (!word.empty()) {
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

}  // namespace bitext
