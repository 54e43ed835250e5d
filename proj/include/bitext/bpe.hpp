// Joint byte-pair encoding: one merge table learned over all languages
// pooled, applied deterministically.
#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bitext/types.hpp"

namespace bitext {

struct BpeModel {
  // applied in order; no duplicates
  std::vector<std::pair<std::string, std::string>> merges;

  // marker glued to the word-final symbol; text containing the literal
  // marker string is unsupported
  static constexpr const char* kEndOfWord = "</w>";

  // `#bpe v1 <num_merges>` then one `left<SPACE>right` per line
  void save(const std::string& path) const;
  static BpeModel load(const std::string& path);
};

// Standard BPE: words start as code-point sequences with kEndOfWord on the
// final symbol; the most frequent adjacent pair is merged until num_merges
// merges are learned or the best pair occurs fewer than 2 times. Frequency
// ties go to the lexicographically smallest (left, right).
BpeModel learn_bpe(std::span<const Corpus> corpora, int num_merges, bool lowercase = false);

// Precomputed merge ranks for repeated application.
class BpeApplier {
 public:
  explicit BpeApplier(const BpeModel& model, bool lowercase = false);

  // Whitespace-splits text and segments each word. Unseen characters pass
  // through as singleton symbols.
  std::vector<std::string> apply(std::string_view text) const;

  std::vector<std::string> apply_word(std::string_view word) const;

 private:
  std::unordered_map<std::string, int> ranks_;  // "left\x01right" -> merge index
  bool lowercase_;
};

std::vector<std::string> apply_bpe(const BpeModel& model, std::string_view text,
                                   bool lowercase = false);

// Inverse of apply up to whitespace normalization: joins subwords into
// words at end-of-word markers, words joined by single spaces.
std::string detokenize(std::span<const std::string> tokens);

}  // namespace bitext
