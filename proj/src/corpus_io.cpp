#include "bitext/corpus_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <unordered_set>

#include "bitext/error.hpp"

namespace bitext {

static_assert(std::endian::native == std::endian::little,
              "BMEM/BIVF readers assume a little-endian host");

std::string escape_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\' || i + 1 == text.size()) {
      out += text[i];
      continue;
    }
    switch (text[++i]) {
      case 't': out += '\t'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case '\\': out += '\\'; break;
      default: out += '\\'; out += text[i];  // unknown escape kept verbatim
    }
  }
  return out;
}

CorpusReader::CorpusReader(const std::string& path, std::string lang)
    : path_(path), lang_(std::move(lang)), in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot open corpus file: " + path);
}

bool CorpusReader::next(SentenceRecord& out) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(path_, line_, "expected id<TAB>text");
    out.id = line.substr(0, tab);
    if (out.id.empty()) throw ValidationError(path_ + ":" + std::to_string(line_) + ": empty id");
    out.lang = lang_;
    out.text = unescape_text(std::string_view(line).substr(tab + 1));
    return true;
  }
  return false;
}

Corpus read_bucc_corpus(const std::string& path, const std::string& lang) {
  CorpusReader reader(path, lang);
  Corpus corpus;
  corpus.lang = lang;
  std::unordered_set<std::string> seen;
  SentenceRecord rec;
  while (reader.next(rec)) {
    if (!seen.insert(rec.id).second)
      throw ValidationError(path + ":" + std::to_string(reader.line()) +
                            ": duplicate id '" + rec.id + "'");
    corpus.records.push_back(rec);
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& rec : corpus.records)
    out << rec.id << '\t' << escape_text(rec.text) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

GoldAlignment read_gold(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open gold file: " + path);
  GoldAlignment gold;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ParseError(path, lineno, "expected src_id<TAB>tgt_id");
    if (!gold.pairs.emplace(line.substr(0, tab), line.substr(tab + 1)).second)
      ++gold.duplicates_dropped;
  }
  return gold;
}

void write_gold(const GoldAlignment& gold, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& [src, tgt] : gold.pairs) out << src << '\t' << tgt << '\n';
  if (!out) throw IoError("write failed: " + path);
}

namespace {

constexpr char kMagic[4] = {'B', 'M', 'E', 'M'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

void validate_matrix(const EmbeddingMatrix& m) {
  if (m.dim() <= 0) throw ValidationError("embedding dimension must be positive");
  if (static_cast<std::size_t>(m.size()) != m.ids.size())
    throw ValidationError("row count " + std::to_string(m.size()) + " != id count " +
                          std::to_string(m.ids.size()));
}

}  // namespace

EmbeddingMatrix read_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embedding file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError(path + ": bad magic, not a BMEM file");
  std::uint32_t version = get_u32(in);
  if (version != kVersion)
    throw ParseError(path + ": unsupported version " + std::to_string(version));
  std::uint32_t n = get_u32(in);
  std::uint32_t d = get_u32(in);
  if (d == 0) throw ValidationError(path + ": dimension 0");

  std::uintmax_t expected = 16 + 4ull * n * d;
  std::uintmax_t actual = std::filesystem::file_size(path);
  if (expected != actual)
    throw IoError(path + ": expected " + std::to_string(expected) + " bytes, found " +
                  std::to_string(actual));

  EmbeddingMatrix m;
  m.rows.resize(n, d);
  in.read(reinterpret_cast<char*>(m.rows.data()), 4ull * n * d);
  if (!in && n > 0) throw IoError(path + ": short read");

  std::string ids_path = path + ".ids";
  std::ifstream ids_in(ids_path, std::ios::binary);
  if (!ids_in) throw IoError("cannot open id sidecar: " + ids_path);
  std::string line;
  while (std::getline(ids_in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    m.ids.push_back(line);
  }
  if (m.ids.size() != n)
    throw ValidationError(ids_path + ": " + std::to_string(m.ids.size()) + " ids for " +
                          std::to_string(n) + " rows");

  for (std::uint32_t i = 0; i < n; ++i) {
    double norm2 = 0.0;
    for (std::uint32_t j = 0; j < d; ++j)
      norm2 += static_cast<double>(m.rows(i, j)) * static_cast<double>(m.rows(i, j));
    double norm = std::sqrt(norm2);
    if (norm < 1e-12)
      throw ValidationError(path + ": zero vector at row " + std::to_string(i));
    if (std::abs(norm - 1.0) > 1e-4)
      m.rows.row(i) /= static_cast<float>(norm);
  }
  return m;
}

void write_embeddings(const EmbeddingMatrix& m, const std::string& path) {
  validate_matrix(m);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(m.size()));
  put_u32(out, static_cast<std::uint32_t>(m.dim()));
  out.write(reinterpret_cast<const char*>(m.rows.data()),
            4ull * static_cast<std::size_t>(m.size()) * static_cast<std::size_t>(m.dim()));
  if (!out) throw IoError("write failed: " + path);

  std::ofstream ids_out(path + ".ids", std::ios::binary);
  if (!ids_out) throw IoError("cannot open for writing: " + path + ".ids");
  for (const auto& id : m.ids) ids_out << id << '\n';
  if (!ids_out) throw IoError("write failed: " + path + ".ids");
}

std::vector<CandidatePair> read_pairs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open pair file: " + path);
  std::vector<CandidatePair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
      throw ParseError(path, lineno, "expected distance<TAB>src_id<TAB>tgt_id");
    CandidatePair p;
    char* end = nullptr;
    std::string dist = line.substr(0, t1);
    p.distance = std::strtof(dist.c_str(), &end);
    if (end != dist.c_str() + dist.size())
      throw ParseError(path, lineno, "bad distance '" + dist + "'");
    p.src_id = line.substr(t1 + 1, t2 - t1 - 1);
    p.tgt_id = line.substr(t2 + 1);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

void write_pairs(std::vector<CandidatePair> pairs, const std::string& path) {
  std::sort(pairs.begin(), pairs.end(), [](const CandidatePair& a, const CandidatePair& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.src_id != b.src_id) return a.src_id < b.src_id;
    return a.tgt_id < b.tgt_id;
  });
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  char buf[32];
  for (const auto& p : pairs) {
    std::snprintf(buf, sizeof buf, "%.6f", static_cast<double>(p.distance));
    out << buf << '\t' << p.src_id << '\t' << p.tgt_id << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::set<IdPair> to_pair_set(const std::vector<CandidatePair>& pairs) {
  std::set<IdPair> out;
  for (const auto& p : pairs) out.emplace(p.src_id, p.tgt_id);
  return out;
}

}  // namespace bitext
