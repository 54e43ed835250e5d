// Pre-filtering of corpora and bitexts: comma rule, length cap and
// character n-gram language identification, applied in that order.
#pragma once

#include <array>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bitext/types.hpp"

namespace bitext {

struct PreprocessConfig {
  int max_commas = 3;   // keep sentences with at most this many commas
  int max_words = 50;   // keep sentences with fewer than this many words
  bool lid_enabled = true;
  double lid_min_confidence = 0.5;
};

// Counts U+002C plus the full-width (U+FF0C) and ideographic (U+3001) commas.
int count_commas(std::string_view text);

// Maximal runs of non-whitespace bytes. Unsegmented scripts (zh) under-count;
// known limitation of whitespace tokenization.
int count_words(std::string_view text);

// Character n-gram (1..4) multinomial naive Bayes over code points with
// additive smoothing and a uniform class prior. N-gram vocabularies are
// shared across languages; an n-gram unseen anywhere at training time
// contributes the smoothing mass alone.
class LidModel {
 public:
  static constexpr int kMaxOrder = 4;

  static LidModel train(const std::vector<std::pair<std::string, std::string>>& samples,
                        double smoothing = 0.1);

  // (language tag, normalized posterior). Empty text -> ("und", 0).
  // Posterior ties go to the lexicographically smallest tag.
  std::pair<std::string, double> classify(std::string_view text) const;

  const std::vector<std::string>& languages() const { return languages_; }

 private:
  struct Profile {
    std::array<std::unordered_map<std::string, std::uint64_t>, kMaxOrder> counts;
    std::array<std::uint64_t, kMaxOrder> totals{};
  };

  std::vector<std::string> languages_;  // sorted
  std::vector<Profile> profiles_;
  std::array<std::uint64_t, kMaxOrder> vocab_sizes_{};  // union across languages
  double smoothing_ = 0.1;
};

struct StageReport {
  std::size_t input_count = 0;
  std::size_t after_commas = 0;
  std::size_t after_length = 0;
  std::size_t after_lid = 0;
};

struct FilteredCorpus {
  Corpus corpus;
  StageReport report;
};

struct FilteredBitext {
  Corpus src;
  Corpus tgt;
  StageReport report;
};

// Stages run commas -> length -> LID; a record survives LID iff classify
// returns the corpus language with confidence >= lid_min_confidence.
// `lid` may be null when cfg.lid_enabled is false.
FilteredCorpus preprocess_corpus(const Corpus& corpus, const PreprocessConfig& cfg,
                                 const LidModel* lid);

// Line-aligned bitext: a pair survives iff both sides survive every stage.
FilteredBitext preprocess_bitext(const Corpus& src, const Corpus& tgt,
                                 const PreprocessConfig& cfg, const LidModel* lid);

}  // namespace bitext
