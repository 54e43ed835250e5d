// k-nearest-neighbor search over unit-normalized embeddings: blocked exact
// scan and an IVF (coarse k-means) index for the large-corpus regime.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bitext/types.hpp"

namespace bitext {

struct Neighbor {
  std::int32_t target_index;  // row in the original target matrix
  float distance;             // cosine distance in [0,2]
};

struct SearchParams {
  int k = 20;
  int nprobe = 32;
  int block_rows = 256;  // brute-force tile height
};

// For each query the k closest targets, sorted ascending by distance with
// ties broken by smaller target index. Returns min(k, |targets|) neighbors.
std::vector<std::vector<Neighbor>> knn_exact(const EmbeddingMatrix& queries,
                                             const EmbeddingMatrix& targets, int k,
                                             int block_rows = 256);

// Lloyd's algorithm with k-means++ seeding; empty clusters are re-seeded
// from the point farthest from its centroid. Deterministic for a fixed seed
// and independent of thread count. iters = 0 returns the seeds.
MatrixXf kmeans(const MatrixXf& vectors, int nlist, int iters, std::uint64_t seed);

struct IvfIndex {
  MatrixXf centroids;                  // nlist x d
  std::vector<std::uint32_t> offsets;  // nlist+1 prefix offsets into rows below
  std::vector<std::uint32_t> row_ids;  // original target row per stored row
  MatrixXf vectors;                    // n x d, grouped by list
  std::vector<std::string> ids;        // target sentence ids, original row order

  int nlist() const { return static_cast<int>(centroids.rows()); }
  Eigen::Index size() const { return vectors.rows(); }
  Eigen::Index dim() const { return vectors.cols(); }
  std::size_t list_size(int l) const { return offsets[l + 1] - offsets[l]; }
};

IvfIndex build_ivf(const EmbeddingMatrix& targets, int nlist, std::uint64_t seed,
                   int kmeans_iters = 10);

// Scans the params.nprobe lists nearest to each query; same ordering and
// tie rules as knn_exact. nprobe = nlist reproduces knn_exact bit for bit.
std::vector<std::vector<Neighbor>> knn_ivf(const IvfIndex& index,
                                           const EmbeddingMatrix& queries,
                                           const SearchParams& params);

// BIVF binary format mirroring BMEM, plus centroid block and list offsets.
// Ids go to <path>.ids.
void save_index(const IvfIndex& index, const std::string& path);
IvfIndex load_index(const std::string& path);

// nlist = ceil(sqrt(n)), the default coarse quantizer size.
int default_nlist(Eigen::Index n);

}  // namespace bitext
