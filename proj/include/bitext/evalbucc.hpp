// BUCC-style evaluation: P/R/F1 against gold alignments, F1-optimal
// threshold search, and synthetic comparable corpora with planted pairs.
#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "bitext/types.hpp"

namespace bitext {

struct EvalReport {
  double precision = 0.0;  // percent
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  float threshold = 0.0f;  // threshold in effect when the prediction was made
};

// Set-intersection true positives; P = 100*TP/predicted (0 when nothing is
// predicted), R = 100*TP/gold, F1 = 2PR/(P+R) (0 when P+R = 0).
EvalReport score(const std::set<IdPair>& predicted, const GoldAlignment& gold);

// Evaluates F1 with every distinct candidate distance (plus 0 and 2) as the
// threshold and returns the maximizer; ties go to the smaller threshold.
// Candidates are best-match-per-source predictions.
std::pair<Threshold, EvalReport> tune_threshold(const std::vector<CandidatePair>& candidates,
                                                const GoldAlignment& gold);

struct SyntheticSpec {
  std::size_t n_src = 0;
  std::size_t n_tgt = 0;
  std::size_t n_planted = 0;  // <= min(n_src, n_tgt)
  int dim = 1024;
  double noise_sigma = 0.1;  // per-coordinate Gaussian noise before renormalization
  std::uint64_t seed = 42;
};

struct SyntheticData {
  Corpus src;
  Corpus tgt;
  EmbeddingMatrix src_embeddings;
  EmbeddingMatrix tgt_embeddings;
  GoldAlignment gold;
};

// Planted targets are noisy copies of their source vectors; the rest are
// independent random unit vectors. Both sides are shuffled with seeded
// permutations and the gold set records the planted pairs. Sentence texts
// are pseudo-random words so the text pipeline stages have real input.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace bitext
