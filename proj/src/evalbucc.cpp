#include "bitext/evalbucc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "bitext/error.hpp"
#include "bitext/rng.hpp"

namespace bitext {

EvalReport score(const std::set<IdPair>& predicted, const GoldAlignment& gold) {
  EvalReport r;
  r.predicted = predicted.size();
  r.gold = gold.size();
  for (const auto& p : predicted) r.true_positives += gold.pairs.count(p);
  if (r.predicted > 0)
    r.precision = 100.0 * static_cast<double>(r.true_positives) /
                  static_cast<double>(r.predicted);
  if (r.gold > 0)
    r.recall = 100.0 * static_cast<double>(r.true_positives) / static_cast<double>(r.gold);
  if (r.precision + r.recall > 0.0)
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

std::pair<Threshold, EvalReport> tune_threshold(const std::vector<CandidatePair>& candidates,
                                                const GoldAlignment& gold) {
  if (gold.size() == 0) throw ValidationError("cannot tune a threshold on empty gold");

  // unique candidate pairs with their best distance
  std::vector<CandidatePair> sorted = candidates;
  std::sort(sorted.begin(), sorted.end(), [](const CandidatePair& a, const CandidatePair& b) {
    if (a.src_id != b.src_id) return a.src_id < b.src_id;
    if (a.tgt_id != b.tgt_id) return a.tgt_id < b.tgt_id;
    return a.distance < b.distance;
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end(),
                           [](const CandidatePair& a, const CandidatePair& b) {
                             return a.src_id == b.src_id && a.tgt_id == b.tgt_id;
                           }),
               sorted.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const CandidatePair& a, const CandidatePair& b) {
              return a.distance < b.distance;
            });

  std::vector<float> thresholds = {0.0f, 2.0f};
  for (const auto& c : sorted) thresholds.push_back(c.distance);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  // one pass per threshold boundary: counts are prefix sums over the sorted
  // candidates, so keep two cursors
  Threshold best_threshold{0.0f};
  EvalReport best;
  bool have_best = false;
  std::size_t cursor = 0, predicted = 0, tp = 0;
  for (float t : thresholds) {
    while (cursor < sorted.size() && sorted[cursor].distance <= t) {
      ++predicted;
      tp += gold.pairs.count({sorted[cursor].src_id, sorted[cursor].tgt_id});
      ++cursor;
    }
    EvalReport r;
    r.predicted = predicted;
    r.gold = gold.size();
    r.true_positives = tp;
    if (r.predicted > 0)
      r.precision = 100.0 * static_cast<double>(tp) / static_cast<double>(predicted);
    r.recall = 100.0 * static_cast<double>(tp) / static_cast<double>(r.gold);
    if (r.precision + r.recall > 0.0)
      r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    r.threshold = t;
    if (!have_best || r.f1 > best.f1) {  // strict: ties keep the smaller threshold
      best = r;
      best_threshold = Threshold{t};
      have_best = true;
    }
  }
  return {best_threshold, best};
}

namespace {

void random_unit_row(MatrixXf& m, Eigen::Index row, Rng& rng) {
  const Eigen::Index d = m.cols();
  double norm2 = 0.0;
  std::vector<double> vals(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    vals[static_cast<std::size_t>(j)] = rng.gaussian();
    norm2 += vals[static_cast<std::size_t>(j)] * vals[static_cast<std::size_t>(j)];
  }
  double norm = std::sqrt(norm2);
  for (Eigen::Index j = 0; j < d; ++j)
    m(row, j) = static_cast<float>(vals[static_cast<std::size_t>(j)] / norm);
}

std::string random_words(Rng& rng) {
  static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz";
  std::string text;
  int words = 3 + static_cast<int>(rng.below(6));
  for (int w = 0; w < words; ++w) {
    if (w > 0) text += ' ';
    int len = 2 + static_cast<int>(rng.below(5));
    for (int i = 0; i < len; ++i) text += alphabet[rng.below(26)];
  }
  return text;
}

std::string padded_id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%06zu", prefix, i);
  return buf;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.dim < 1) throw ValidationError("synthetic dim must be >= 1");
  if (spec.n_planted > std::min(spec.n_src, spec.n_tgt))
    throw ValidationError("n_planted " + std::to_string(spec.n_planted) +
                          " exceeds min(n_src, n_tgt)");

  Rng rng(spec.seed);
  SyntheticData data;
  data.src.lang = "xx";
  data.tgt.lang = "yy";
  data.src_embeddings.rows.resize(static_cast<Eigen::Index>(spec.n_src), spec.dim);
  data.tgt_embeddings.rows.resize(static_cast<Eigen::Index>(spec.n_tgt), spec.dim);

  for (std::size_t i = 0; i < spec.n_src; ++i)
    random_unit_row(data.src_embeddings.rows, static_cast<Eigen::Index>(i), rng);

  // planted target i = source i plus isotropic noise, renormalized
  for (std::size_t i = 0; i < spec.n_planted; ++i) {
    const Eigen::Index row = static_cast<Eigen::Index>(i);
    double norm2 = 0.0;
    std::vector<double> vals(static_cast<std::size_t>(spec.dim));
    for (int j = 0; j < spec.dim; ++j) {
      vals[static_cast<std::size_t>(j)] =
          static_cast<double>(data.src_embeddings.rows(row, j)) +
          spec.noise_sigma * rng.gaussian();
      norm2 += vals[static_cast<std::size_t>(j)] * vals[static_cast<std::size_t>(j)];
    }
    double norm = std::sqrt(norm2);
    if (norm < 1e-12) throw ValidationError("degenerate planted vector; raise noise_sigma");
    for (int j = 0; j < spec.dim; ++j)
      data.tgt_embeddings.rows(row, j) =
          static_cast<float>(vals[static_cast<std::size_t>(j)] / norm);
  }
  for (std::size_t i = spec.n_planted; i < spec.n_tgt; ++i)
    random_unit_row(data.tgt_embeddings.rows, static_cast<Eigen::Index>(i), rng);

  for (std::size_t i = 0; i < spec.n_src; ++i) {
    std::string id = padded_id("src", i);
    data.src.records.push_back({id, data.src.lang, random_words(rng)});
    data.src_embeddings.ids.push_back(id);
  }
  for (std::size_t i = 0; i < spec.n_tgt; ++i) {
    std::string id = padded_id("tgt", i);
    data.tgt.records.push_back({id, data.tgt.lang, random_words(rng)});
    data.tgt_embeddings.ids.push_back(id);
  }
  for (std::size_t i = 0; i < spec.n_planted; ++i)
    data.gold.pairs.emplace(padded_id("src", i), padded_id("tgt", i));

  // shuffle both sides with seeded permutations, rows moving with their ids
  auto permute = [&](Corpus& corpus, EmbeddingMatrix& m) {
    std::vector<std::size_t> perm(corpus.size());
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    Corpus shuffled_corpus;
    shuffled_corpus.lang = corpus.lang;
    EmbeddingMatrix shuffled;
    shuffled.rows.resize(m.size(), m.dim());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      shuffled_corpus.records.push_back(corpus.records[perm[i]]);
      shuffled.ids.push_back(m.ids[perm[i]]);
      shuffled.rows.row(static_cast<Eigen::Index>(i)) =
          m.rows.row(static_cast<Eigen::Index>(perm[i]));
    }
    corpus = std::move(shuffled_corpus);
    m = std::move(shuffled);
  };
  permute(data.src, data.src_embeddings);
  permute(data.tgt, data.tgt_embeddings);
  return data;
}

}  // namespace bitext
