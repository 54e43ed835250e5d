// Core domain types shared across the pipeline. All embedding math is
// dense row-major float32 on top of Eigen.
#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace bitext {

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXf = MatrixX<float>;
using VectorXf = VectorX<float>;

// One corpus line. Ids are opaque strings ("en-000001" must round-trip
// untouched); text is raw UTF-8 with tabs/newlines escaped on the wire.
struct SentenceRecord {
  std::string id;
  std::string lang;
  std::string text;
};

struct Corpus {
  std::string lang;
  std::vector<SentenceRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

using IdPair = std::pair<std::string, std::string>;

struct GoldAlignment {
  std::set<IdPair> pairs;
  // lines collapsed by set semantics when reading a gold file
  std::size_t duplicates_dropped = 0;

  std::size_t size() const { return pairs.size(); }
};

// n x d matrix of unit-normalized sentence vectors, row i belongs to ids[i].
struct EmbeddingMatrix {
  std::vector<std::string> ids;
  MatrixXf rows;

  Eigen::Index size() const { return rows.rows(); }
  Eigen::Index dim() const { return rows.cols(); }
};

struct CandidatePair {
  std::string src_id;
  std::string tgt_id;
  float distance = 0.0f;  // cosine distance in [0,2]
};

// Cosine-distance cutoff. Pairs at or below the threshold survive.
struct Threshold {
  float value = 0.0f;
};

std::set<IdPair> to_pair_set(const std::vector<CandidatePair>& pairs);

}  // namespace bitext
