#include "bitext/embed.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "bitext/error.hpp"
#include "bitext/rng.hpp"

namespace bitext {

float dot_f32(const float* a, const float* b, std::size_t n) {
  float acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (int j = 0; j < 8; ++j) acc[j] += a[i + j] * b[i + j];
  float sum = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

float cosine_distance(const float* u, const float* v, std::size_t d) {
  float dist = 1.0f - dot_f32(u, v, d);
  return std::clamp(dist, 0.0f, 2.0f);
}

float cosine_distance(const VectorXf& u, const VectorXf& v) {
  if (u.size() != v.size())
    throw ValidationError("cosine_distance dimension mismatch: " + std::to_string(u.size()) +
                          " vs " + std::to_string(v.size()));
  return cosine_distance(u.data(), v.data(), static_cast<std::size_t>(u.size()));
}

HashedEncoder::HashedEncoder(int dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim < 1) throw ValidationError("embedding dimension must be >= 1");
}

VectorXf HashedEncoder::token_vector(std::string_view token) const {
  std::uint64_t h = fnv1a64(token.data(), token.size()) ^ splitmix64(seed_);
  VectorXf v(dim_);
  for (int j = 0; j < dim_; ++j) {
    std::uint64_t bits = splitmix64(h + static_cast<std::uint64_t>(j));
    double u = static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0,1)
    v[j] = static_cast<float>(2.0 * u - 1.0);
  }
  return v;
}

VectorXf HashedEncoder::embed_sentence(std::span<const std::string> tokens) const {
  if (tokens.empty())
    throw ValidationError("cannot embed an empty token sequence");
  VectorXf pooled = token_vector(tokens[0]);
  for (std::size_t t = 1; t < tokens.size(); ++t)
    pooled = pooled.cwiseMax(token_vector(tokens[t]));
  double norm = std::sqrt(pooled.cast<double>().squaredNorm());
  if (norm < 1e-12) throw ValidationError("degenerate zero-norm sentence vector");
  return (pooled.cast<double>() / norm).cast<float>();
}

EmbeddingMatrix embed_corpus(const HashedEncoder& encoder, const Corpus& corpus,
                             const BpeModel& bpe, bool lowercase) {
  BpeApplier applier(bpe, lowercase);
  EmbeddingMatrix m;
  m.rows.resize(static_cast<Eigen::Index>(corpus.size()), encoder.dim());
  m.ids.reserve(corpus.size());
  for (const auto& rec : corpus.records) m.ids.push_back(rec.id);

  const std::vector<std::string> reserved = {HashedEncoder::kEmptyToken};
  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(corpus.size()); ++i) {
    try {
      std::vector<std::string> tokens = applier.apply(corpus.records[i].text);
      const auto& use = tokens.empty() ? reserved : tokens;
      m.rows.row(i) = encoder.embed_sentence(use).transpose();
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return m;
}

EmbeddingProvider EmbeddingProvider::file_backed(EmbeddingMatrix m) {
  EmbeddingProvider p;
  p.mode_ = Mode::file_backed;
  p.dim_ = static_cast<int>(m.dim());
  for (Eigen::Index i = 0; i < m.size(); ++i) p.row_of_id_[m.ids[i]] = i;
  p.matrix_ = std::move(m);
  return p;
}

EmbeddingProvider EmbeddingProvider::hashed(int dim, std::uint64_t seed, const BpeModel* bpe,
                                            bool lowercase) {
  if (bpe == nullptr) throw ValidationError("hashed provider needs a BPE model");
  EmbeddingProvider p;
  p.mode_ = Mode::hashed_baseline;
  p.dim_ = dim;
  p.seed_ = seed;
  p.bpe_ = bpe;
  p.lowercase_ = lowercase;
  return p;
}

int EmbeddingProvider::dim() const { return dim_; }

EmbeddingMatrix EmbeddingProvider::embed(const Corpus& corpus) const {
  if (mode_ == Mode::hashed_baseline) {
    HashedEncoder encoder(dim_, seed_);
    return embed_corpus(encoder, corpus, *bpe_, lowercase_);
  }
  EmbeddingMatrix out;
  out.rows.resize(static_cast<Eigen::Index>(corpus.size()), matrix_.dim());
  out.ids.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto it = row_of_id_.find(corpus.records[i].id);
    if (it == row_of_id_.end())
      throw ValidationError("no embedding for sentence id '" + corpus.records[i].id + "'");
    out.rows.row(static_cast<Eigen::Index>(i)) = matrix_.rows.row(it->second);
    out.ids.push_back(corpus.records[i].id);
  }
  return out;
}

}  // namespace bitext
