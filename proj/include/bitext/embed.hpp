// Sentence embeddings: a deterministic hashed baseline encoder plus a
// file-backed provider over externally produced vectors. Everything leaves
// this module unit-normalized so downstream code uses dot products only.
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include "bitext/bpe.hpp"
#include "bitext/types.hpp"

namespace bitext {

// Shared inner-product kernel. Fixed unrolled accumulation order so exact
// and IVF search produce bit-identical distances on the same row data.
float dot_f32(const float* a, const float* b, std::size_t n);

// 1 - dot(u, v) on unit vectors, clamped to [0,2] against float error.
float cosine_distance(const float* u, const float* v, std::size_t d);
float cosine_distance(const VectorXf& u, const VectorXf& v);

// Each token hashes to a fixed pseudo-random vector in [-1,1]^d; a sentence
// is the coordinate-wise max over its token vectors, L2-normalized.
// Stands in for the neural encoder in tests and synthetic runs; its
// cross-lingual distances carry no meaning.
class HashedEncoder {
 public:
  HashedEncoder(int dim, std::uint64_t seed);

  VectorXf token_vector(std::string_view token) const;
  VectorXf embed_sentence(std::span<const std::string> tokens) const;

  int dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }

  // stands in for sentences that tokenize to nothing
  static constexpr const char* kEmptyToken = "⟨empty⟩";

 private:
  int dim_;
  std::uint64_t seed_;
};

EmbeddingMatrix embed_corpus(const HashedEncoder& encoder, const Corpus& corpus,
                             const BpeModel& bpe, bool lowercase = false);

class EmbeddingProvider {
 public:
  enum class Mode { file_backed, hashed_baseline };

  static EmbeddingProvider file_backed(EmbeddingMatrix m);
  static EmbeddingProvider hashed(int dim, std::uint64_t seed, const BpeModel* bpe,
                                  bool lowercase = false);

  // hashed: encode every record; file_backed: select rows by record id
  // (errors on ids missing from the backing matrix).
  EmbeddingMatrix embed(const Corpus& corpus) const;

  Mode mode() const { return mode_; }
  int dim() const;

 private:
  EmbeddingProvider() = default;

  Mode mode_ = Mode::file_backed;
  EmbeddingMatrix matrix_;
  std::unordered_map<std::string, Eigen::Index> row_of_id_;
  int dim_ = 0;
  std::uint64_t seed_ = 0;
  const BpeModel* bpe_ = nullptr;
  bool lowercase_ = false;
};

}  // namespace bitext
