// The two headline pipelines: O(N) distance scoring of line-aligned bitexts
// and O(NxM) k-NN mining over two monolingual corpora, plus threshold
// sweeps and length statistics.
#pragma once

#include <map>
#include <vector>

#include "bitext/simsearch.hpp"
#include "bitext/types.hpp"

namespace bitext {

struct SweepCurve {
  std::vector<std::pair<float, std::size_t>> points;  // (threshold, survivors)
};

struct LengthHistogram {
  std::map<int, std::size_t> bins;  // word count -> sentences
  double mean_length = 0.0;
  bool has_mean = false;  // false for an empty corpus (mean reported as 0)
  std::size_t total = 0;
};

// Pair i of a line-aligned bitext gets the distance between row i of each
// matrix. Corpora and matrices must be equal length and id-aligned.
std::vector<CandidatePair> score_bitext(const Corpus& src, const Corpus& tgt,
                                        const EmbeddingMatrix& src_embeddings,
                                        const EmbeddingMatrix& tgt_embeddings);

// Keeps pairs with distance <= t, stable order.
std::vector<CandidatePair> filter_by_threshold(const std::vector<CandidatePair>& pairs,
                                               Threshold t);

// Survivor counts per threshold; thresholds must be sorted ascending.
SweepCurve sweep(const std::vector<CandidatePair>& pairs,
                 const std::vector<float>& thresholds);

struct MineOptions {
  SearchParams search;
  Threshold threshold{0.55f};  // mining default when no tuning data exists
  bool bidirectional = false;  // keep only pairs found in both directions
};

// For each source sentence, every target among its k nearest with distance
// <= threshold. Duplicate (src,tgt) pairs keep the smallest distance; output
// sorted ascending by (distance, src_id, tgt_id). `index`, when given, must
// be built over tgt_embeddings.
std::vector<CandidatePair> mine(const Corpus& src, const EmbeddingMatrix& src_embeddings,
                                const Corpus& tgt, const EmbeddingMatrix& tgt_embeddings,
                                const MineOptions& options,
                                const IvfIndex* index = nullptr);

// One candidate per source sentence: its single nearest target.
std::vector<CandidatePair> best_match(const Corpus& src,
                                      const EmbeddingMatrix& src_embeddings,
                                      const Corpus& tgt,
                                      const EmbeddingMatrix& tgt_embeddings,
                                      const IvfIndex* index = nullptr, int nprobe = 32);

// BUCC decision rule: at most one prediction per source, the nearest target,
// kept iff its distance <= t.
std::vector<CandidatePair> predict_bucc(const Corpus& src,
                                        const EmbeddingMatrix& src_embeddings,
                                        const Corpus& tgt,
                                        const EmbeddingMatrix& tgt_embeddings,
                                        Threshold t, const IvfIndex* index = nullptr,
                                        int nprobe = 32);

// Collapses to the best-scoring pair per source id (used before tuning).
std::vector<CandidatePair> best_per_source(const std::vector<CandidatePair>& pairs);

LengthHistogram length_histogram(const Corpus& corpus);

}  // namespace bitext
