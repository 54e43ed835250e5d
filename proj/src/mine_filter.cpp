#include "bitext/mine_filter.hpp"

#include <algorithm>
#include <unordered_map>

#include "bitext/embed.hpp"
#include "bitext/error.hpp"
#include "bitext/preprocess.hpp"

namespace bitext {

namespace {

void check_aligned(const Corpus& corpus, const EmbeddingMatrix& m, const char* side) {
  if (corpus.size() != static_cast<std::size_t>(m.size()))
    throw ValidationError(std::string(side) + " corpus has " + std::to_string(corpus.size()) +
                          " records but " + std::to_string(m.size()) + " embedding rows");
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (corpus.records[i].id != m.ids[i])
      throw ValidationError(std::string(side) + " corpus and embeddings disagree at row " +
                            std::to_string(i) + ": '" + corpus.records[i].id + "' vs '" +
                            m.ids[i] + "'");
}

bool pair_order(const CandidatePair& a, const CandidatePair& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  if (a.src_id != b.src_id) return a.src_id < b.src_id;
  return a.tgt_id < b.tgt_id;
}

std::vector<CandidatePair> collect_candidates(const Corpus& src,
                                              const EmbeddingMatrix& src_embeddings,
                                              const Corpus& tgt,
                                              const EmbeddingMatrix& tgt_embeddings,
                                              const SearchParams& params, Threshold t,
                                              const IvfIndex* index) {
  check_aligned(src, src_embeddings, "source");
  check_aligned(tgt, tgt_embeddings, "target");
  std::vector<std::vector<Neighbor>> neighbors;
  if (index != nullptr) {
    if (index->size() != tgt_embeddings.size())
      throw ValidationError("index covers " + std::to_string(index->size()) +
                            " rows, target embeddings have " +
                            std::to_string(tgt_embeddings.size()));
    SearchParams p = params;
    p.nprobe = std::min(p.nprobe, index->nlist());
    neighbors = knn_ivf(*index, src_embeddings, p);
  } else {
    neighbors = knn_exact(src_embeddings, tgt_embeddings, params.k, params.block_rows);
  }
  std::vector<CandidatePair> out;
  for (std::size_t q = 0; q < neighbors.size(); ++q)
    for (const Neighbor& n : neighbors[q])
      if (n.distance <= t.value)
        out.push_back({src.records[q].id,
                       tgt.records[static_cast<std::size_t>(n.target_index)].id, n.distance});
  return out;
}

// collapse duplicate (src,tgt) keeping the smallest distance, then order by
// (distance, src, tgt)
std::vector<CandidatePair> dedup_and_sort(std::vector<CandidatePair> pairs) {
  std::sort(pairs.begin(), pairs.end(), [](const CandidatePair& a, const CandidatePair& b) {
    if (a.src_id != b.src_id) return a.src_id < b.src_id;
    if (a.tgt_id != b.tgt_id) return a.tgt_id < b.tgt_id;
    return a.distance < b.distance;
  });
  pairs.erase(std::unique(pairs.begin(), pairs.end(),
                          [](const CandidatePair& a, const CandidatePair& b) {
                            return a.src_id == b.src_id && a.tgt_id == b.tgt_id;
                          }),
              pairs.end());
  std::sort(pairs.begin(), pairs.end(), pair_order);
  return pairs;
}

}  // namespace

std::vector<CandidatePair> score_bitext(const Corpus& src, const Corpus& tgt,
                                        const EmbeddingMatrix& src_embeddings,
                                        const EmbeddingMatrix& tgt_embeddings) {
  if (src.size() != tgt.size())
    throw ValidationError("bitext length mismatch: " + std::to_string(src.size()) + " vs " +
                          std::to_string(tgt.size()));
  check_aligned(src, src_embeddings, "source");
  check_aligned(tgt, tgt_embeddings, "target");
  if (src_embeddings.dim() != tgt_embeddings.dim())
    throw ValidationError("embedding dimension mismatch");

  const Eigen::Index d = src_embeddings.dim();
  std::vector<CandidatePair> pairs(src.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(src.size()); ++i) {
    float dist = cosine_distance(src_embeddings.rows.data() + i * d,
                                 tgt_embeddings.rows.data() + i * d,
                                 static_cast<std::size_t>(d));
    pairs[i] = {src.records[i].id, tgt.records[i].id, dist};
  }
  return pairs;
}

std::vector<CandidatePair> filter_by_threshold(const std::vector<CandidatePair>& pairs,
                                               Threshold t) {
  std::vector<CandidatePair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs)
    if (p.distance <= t.value) out.push_back(p);
  return out;
}

SweepCurve sweep(const std::vector<CandidatePair>& pairs,
                 const std::vector<float>& thresholds) {
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (thresholds[i] < thresholds[i - 1])
      throw ValidationError("sweep thresholds must be sorted ascending");
  std::vector<float> distances;
  distances.reserve(pairs.size());
  for (const auto& p : pairs) distances.push_back(p.distance);
  std::sort(distances.begin(), distances.end());
  SweepCurve curve;
  curve.points.reserve(thresholds.size());
  for (float t : thresholds) {
    std::size_t count = static_cast<std::size_t>(
        std::upper_bound(distances.begin(), distances.end(), t) - distances.begin());
    curve.points.emplace_back(t, count);
  }
  return curve;
}

std::vector<CandidatePair> mine(const Corpus& src, const EmbeddingMatrix& src_embeddings,
                                const Corpus& tgt, const EmbeddingMatrix& tgt_embeddings,
                                const MineOptions& options, const IvfIndex* index) {
  std::vector<CandidatePair> forward = collect_candidates(
      src, src_embeddings, tgt, tgt_embeddings, options.search, options.threshold, index);
  if (!options.bidirectional) return dedup_and_sort(std::move(forward));

  // reverse direction goes through exact search: the index covers targets only
  std::vector<CandidatePair> backward = collect_candidates(
      tgt, tgt_embeddings, src, src_embeddings, options.search, options.threshold, nullptr);
  std::set<IdPair> reverse_pairs;
  for (const auto& p : backward) reverse_pairs.emplace(p.tgt_id, p.src_id);
  std::vector<CandidatePair> kept;
  for (auto& p : forward)
    if (reverse_pairs.count({p.src_id, p.tgt_id})) kept.push_back(std::move(p));
  return dedup_and_sort(std::move(kept));
}

std::vector<CandidatePair> best_match(const Corpus& src,
                                      const EmbeddingMatrix& src_embeddings,
                                      const Corpus& tgt,
                                      const EmbeddingMatrix& tgt_embeddings,
                                      const IvfIndex* index, int nprobe) {
  SearchParams params;
  params.k = 1;
  params.nprobe = nprobe;
  std::vector<CandidatePair> out = collect_candidates(src, src_embeddings, tgt,
                                                      tgt_embeddings, params,
                                                      Threshold{2.0f}, index);
  std::sort(out.begin(), out.end(), pair_order);
  return out;
}

std::vector<CandidatePair> predict_bucc(const Corpus& src,
                                        const EmbeddingMatrix& src_embeddings,
                                        const Corpus& tgt,
                                        const EmbeddingMatrix& tgt_embeddings,
                                        Threshold t, const IvfIndex* index, int nprobe) {
  return filter_by_threshold(best_match(src, src_embeddings, tgt, tgt_embeddings, index, nprobe),
                             t);
}

std::vector<CandidatePair> best_per_source(const std::vector<CandidatePair>& pairs) {
  std::unordered_map<std::string, CandidatePair> best;
  for (const auto& p : pairs) {
    auto it = best.find(p.src_id);
    if (it == best.end() || p.distance < it->second.distance ||
        (p.distance == it->second.distance && p.tgt_id < it->second.tgt_id))
      best[p.src_id] = p;
  }
  std::vector<CandidatePair> out;
  out.reserve(best.size());
  for (auto& [_, p] : best) out.push_back(p);
  std::sort(out.begin(), out.end(), pair_order);
  return out;
}

LengthHistogram length_histogram(const Corpus& corpus) {
  LengthHistogram h;
  h.total = corpus.size();
  double sum = 0.0;
  for (const auto& rec : corpus.records) {
    int words = count_words(rec.text);
    ++h.bins[words];
    sum += words;
  }
  if (h.total > 0) {
    h.mean_length = sum / static_cast<double>(h.total);
    h.has_mean = true;
  }
  return h;
}

}  // namespace bitext
