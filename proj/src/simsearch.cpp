#include "bitext/simsearch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "bitext/embed.hpp"
#include "bitext/error.hpp"
#include "bitext/rng.hpp"

namespace bitext {

namespace {

// strict total order: ascending distance, ties to the smaller target row
inline bool better(const Neighbor& a, const Neighbor& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.target_index < b.target_index;
}

// bounded worst-at-front heap
inline void push_topk(std::vector<Neighbor>& heap, std::size_t k, Neighbor cand) {
  if (heap.size() < k) {
    heap.push_back(cand);
    std::push_heap(heap.begin(), heap.end(), better);
  } else if (better(cand, heap.front())) {
    std::pop_heap(heap.begin(), heap.end(), better);
    heap.back() = cand;
    std::push_heap(heap.begin(), heap.end(), better);
  }
}

void check_dims(Eigen::Index qd, Eigen::Index td) {
  if (qd != td)
    throw ValidationError("dimension mismatch: queries d=" + std::to_string(qd) +
                          ", targets d=" + std::to_string(td));
}

}  // namespace

std::vector<std::vector<Neighbor>> knn_exact(const EmbeddingMatrix& queries,
                                             const EmbeddingMatrix& targets, int k,
                                             int block_rows) {
  check_dims(queries.dim(), targets.dim());
  if (targets.size() == 0) throw ValidationError("empty target set");
  if (k < 1) throw ValidationError("k must be >= 1");
  if (block_rows < 1) block_rows = 1;

  const Eigen::Index nq = queries.size();
  const Eigen::Index nt = targets.size();
  const Eigen::Index d = queries.dim();
  const std::size_t kk = static_cast<std::size_t>(std::min<Eigen::Index>(k, nt));
  const Eigen::Index tile = 256;  // keeps the target tile in L2

  std::vector<std::vector<Neighbor>> results(static_cast<std::size_t>(nq));
  const float* qdata = queries.rows.data();
  const float* tdata = targets.rows.data();
  const Eigen::Index nblocks = (nq + block_rows - 1) / block_rows;

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t block = 0; block < nblocks; ++block) {
    const Eigen::Index q0 = block * block_rows;
    const Eigen::Index q1 = std::min<Eigen::Index>(nq, q0 + block_rows);
    for (Eigen::Index t0 = 0; t0 < nt; t0 += tile) {
      const Eigen::Index t1 = std::min<Eigen::Index>(nt, t0 + tile);
      for (Eigen::Index q = q0; q < q1; ++q) {
        auto& heap = results[static_cast<std::size_t>(q)];
        if (t0 == 0) heap.reserve(kk + 1);
        const float* qrow = qdata + q * d;
        for (Eigen::Index t = t0; t < t1; ++t) {
          float dist = cosine_distance(qrow, tdata + t * d, static_cast<std::size_t>(d));
          push_topk(heap, kk, {static_cast<std::int32_t>(t), dist});
        }
      }
    }
    for (Eigen::Index q = q0; q < q1; ++q) {
      auto& heap = results[static_cast<std::size_t>(q)];
      std::sort_heap(heap.begin(), heap.end(), better);
    }
  }
  return results;
}

namespace {

// ||x - c||^2 through the shared kernel; clamped against float cancellation
inline float sq_dist(const float* x, float xnorm2, const float* c, float cnorm2,
                     std::size_t d) {
  float v = xnorm2 + cnorm2 - 2.0f * dot_f32(x, c, d);
  return v > 0.0f ? v : 0.0f;
}

std::vector<float> row_sqnorms(const MatrixXf& m) {
  std::vector<float> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    out[static_cast<std::size_t>(i)] =
        dot_f32(m.data() + i * m.cols(), m.data() + i * m.cols(),
                static_cast<std::size_t>(m.cols()));
  return out;
}

}  // namespace

MatrixXf kmeans(const MatrixXf& vectors, int nlist, int iters, std::uint64_t seed) {
  const Eigen::Index n = vectors.rows();
  const Eigen::Index d = vectors.cols();
  if (nlist < 1) throw ValidationError("nlist must be >= 1");
  if (nlist > n)
    throw ValidationError("nlist " + std::to_string(nlist) + " exceeds vector count " +
                          std::to_string(n));
  if (iters < 0) iters = 0;

  std::vector<float> pnorm2 = row_sqnorms(vectors);
  MatrixXf centroids(nlist, d);
  Rng rng(seed);

  // k-means++ seeding: D^2 sampling over the prefix-sum, already-chosen
  // points carry weight 0
  std::vector<double> dist2(static_cast<std::size_t>(n));
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  Eigen::Index first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  centroids.row(0) = vectors.row(first);
  chosen[static_cast<std::size_t>(first)] = 1;
  float cn2 = pnorm2[static_cast<std::size_t>(first)];
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    dist2[i] = sq_dist(vectors.data() + i * d, pnorm2[i], centroids.data(), cn2,
                       static_cast<std::size_t>(d));

  for (int c = 1; c < nlist; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) total += dist2[static_cast<std::size_t>(i)];
    Eigen::Index pick = -1;
    if (total <= 0.0) {
      for (Eigen::Index i = 0; i < n && pick < 0; ++i)
        if (!chosen[static_cast<std::size_t>(i)]) pick = i;
    } else {
      double r = rng.uniform() * total;
      double cum = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        cum += dist2[static_cast<std::size_t>(i)];
        if (cum > r) { pick = i; break; }
      }
      if (pick < 0)  // float residue: fall back to the last positive weight
        for (Eigen::Index i = n - 1; i >= 0 && pick < 0; --i)
          if (dist2[static_cast<std::size_t>(i)] > 0.0) pick = i;
    }
    if (pick < 0) pick = 0;
    centroids.row(c) = vectors.row(pick);
    chosen[static_cast<std::size_t>(pick)] = 1;
    const float* crow = centroids.data() + c * d;
    const float ccn2 = pnorm2[static_cast<std::size_t>(pick)];
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      double v = sq_dist(vectors.data() + i * d, pnorm2[i], crow, ccn2,
                         static_cast<std::size_t>(d));
      if (v < dist2[i]) dist2[i] = v;
    }
  }

  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  std::vector<double> point_dist(static_cast<std::size_t>(n), 0.0);
  for (int iter = 0; iter < iters; ++iter) {
    std::vector<float> cnorm2 = row_sqnorms(centroids);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const float* x = vectors.data() + i * d;
      int best = 0;
      float best_d = sq_dist(x, pnorm2[i], centroids.data(), cnorm2[0],
                             static_cast<std::size_t>(d));
      for (int c = 1; c < nlist; ++c) {
        float v = sq_dist(x, pnorm2[i], centroids.data() + c * d, cnorm2[c],
                          static_cast<std::size_t>(d));
        if (v < best_d) { best_d = v; best = c; }
      }
      assign[i] = best;
      point_dist[i] = best_d;
    }

    std::vector<Eigen::Index> counts(static_cast<std::size_t>(nlist), 0);
    for (Eigen::Index i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(assign[i])];

    // re-seed empty clusters from the farthest point, one steal at a time
    for (int e = 0; e < nlist; ++e) {
      if (counts[static_cast<std::size_t>(e)] > 0) continue;
      Eigen::Index far = -1;
      double far_d = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (point_dist[static_cast<std::size_t>(i)] > far_d) {
          far_d = point_dist[static_cast<std::size_t>(i)];
          far = i;
        }
      if (far < 0) break;  // all duplicates; leave the cluster empty
      --counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(far)])];
      assign[static_cast<std::size_t>(far)] = e;
      point_dist[static_cast<std::size_t>(far)] = 0.0;
      ++counts[static_cast<std::size_t>(e)];
      if (counts[static_cast<std::size_t>(e)] == 1) e = -1;  // restart the scan
    }

    // means accumulated serially in point order: thread-count independent
    MatrixX<double> sums = MatrixX<double>::Zero(nlist, d);
    for (Eigen::Index i = 0; i < n; ++i)
      sums.row(assign[static_cast<std::size_t>(i)]) += vectors.row(i).cast<double>();
    for (int c = 0; c < nlist; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0)
        centroids.row(c) =
            (sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]))
                .cast<float>();
  }
  return centroids;
}

IvfIndex build_ivf(const EmbeddingMatrix& targets, int nlist, std::uint64_t seed,
                   int kmeans_iters) {
  if (targets.size() == 0) throw ValidationError("cannot index an empty target set");
  IvfIndex index;
  index.centroids = kmeans(targets.rows, nlist, kmeans_iters, seed);
  index.ids = targets.ids;

  const Eigen::Index n = targets.size();
  const Eigen::Index d = targets.dim();
  std::vector<float> pnorm2 = row_sqnorms(targets.rows);
  std::vector<float> cnorm2 = row_sqnorms(index.centroids);
  std::vector<int> assign(static_cast<std::size_t>(n), 0);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const float* x = targets.rows.data() + i * d;
    int best = 0;
    float best_d = sq_dist(x, pnorm2[i], index.centroids.data(), cnorm2[0],
                           static_cast<std::size_t>(d));
    for (int c = 1; c < nlist; ++c) {
      float v = sq_dist(x, pnorm2[i], index.centroids.data() + c * d, cnorm2[c],
                        static_cast<std::size_t>(d));
      if (v < best_d) { best_d = v; best = c; }
    }
    assign[i] = best;
  }

  index.offsets.assign(static_cast<std::size_t>(nlist) + 1, 0);
  for (Eigen::Index i = 0; i < n; ++i)
    ++index.offsets[static_cast<std::size_t>(assign[i]) + 1];
  for (int c = 0; c < nlist; ++c) index.offsets[c + 1] += index.offsets[c];

  index.row_ids.resize(static_cast<std::size_t>(n));
  index.vectors.resize(n, d);
  std::vector<std::uint32_t> cursor(index.offsets.begin(), index.offsets.end() - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::uint32_t slot = cursor[static_cast<std::size_t>(assign[i])]++;
    index.row_ids[slot] = static_cast<std::uint32_t>(i);
    index.vectors.row(slot) = targets.rows.row(i);
  }
  return index;
}

std::vector<std::vector<Neighbor>> knn_ivf(const IvfIndex& index,
                                           const EmbeddingMatrix& queries,
                                           const SearchParams& params) {
  check_dims(queries.dim(), index.dim());
  if (params.k < 1) throw ValidationError("k must be >= 1");
  if (params.nprobe < 1 || params.nprobe > index.nlist())
    throw ValidationError("nprobe " + std::to_string(params.nprobe) +
                          " out of range 1.." + std::to_string(index.nlist()));

  const Eigen::Index nq = queries.size();
  const Eigen::Index d = index.dim();
  const int nlist = index.nlist();
  const std::size_t kk =
      static_cast<std::size_t>(std::min<Eigen::Index>(params.k, index.size()));
  std::vector<float> cnorm2 = row_sqnorms(index.centroids);
  std::vector<std::vector<Neighbor>> results(static_cast<std::size_t>(nq));

#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t q = 0; q < nq; ++q) {
    const float* qrow = queries.rows.data() + q * d;
    // rank lists by centroid distance (||q||^2 is constant, dropped)
    std::vector<std::pair<float, int>> ranked(static_cast<std::size_t>(nlist));
    for (int c = 0; c < nlist; ++c)
      ranked[static_cast<std::size_t>(c)] = {
          cnorm2[c] - 2.0f * dot_f32(qrow, index.centroids.data() + c * d,
                                     static_cast<std::size_t>(d)),
          c};
    std::sort(ranked.begin(), ranked.end());
    auto& heap = results[static_cast<std::size_t>(q)];
    heap.reserve(kk + 1);
    for (int p = 0; p < params.nprobe; ++p) {
      int list = ranked[static_cast<std::size_t>(p)].second;
      for (std::uint32_t slot = index.offsets[list]; slot < index.offsets[list + 1]; ++slot) {
        float dist = cosine_distance(qrow, index.vectors.data() + slot * d,
                                     static_cast<std::size_t>(d));
        push_topk(heap, kk,
                  {static_cast<std::int32_t>(index.row_ids[slot]), dist});
      }
    }
    std::sort_heap(heap.begin(), heap.end(), better);
  }
  return results;
}

namespace {

constexpr char kIvfMagic[4] = {'B', 'I', 'V', 'F'};
constexpr std::uint32_t kIvfVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

}  // namespace

void save_index(const IvfIndex& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kIvfMagic, 4);
  put_u32(out, kIvfVersion);
  put_u32(out, static_cast<std::uint32_t>(index.size()));
  put_u32(out, static_cast<std::uint32_t>(index.dim()));
  put_u32(out, static_cast<std::uint32_t>(index.nlist()));
  out.write(reinterpret_cast<const char*>(index.centroids.data()),
            4ull * index.centroids.size());
  std::vector<std::uint64_t> offsets(index.offsets.begin(), index.offsets.end());
  out.write(reinterpret_cast<const char*>(offsets.data()), 8ull * offsets.size());
  out.write(reinterpret_cast<const char*>(index.row_ids.data()),
            4ull * index.row_ids.size());
  out.write(reinterpret_cast<const char*>(index.vectors.data()),
            4ull * index.vectors.size());
  if (!out) throw IoError("write failed: " + path);

  std::ofstream ids_out(path + ".ids", std::ios::binary);
  if (!ids_out) throw IoError("cannot open for writing: " + path + ".ids");
  for (const auto& id : index.ids) ids_out << id << '\n';
  if (!ids_out) throw IoError("write failed: " + path + ".ids");
}

IvfIndex load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open index: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kIvfMagic, 4) != 0)
    throw ParseError(path + ": bad magic, not a BIVF file");
  std::uint32_t version = get_u32(in);
  if (version != kIvfVersion)
    throw ParseError(path + ": unsupported version " + std::to_string(version));
  std::uint32_t n = get_u32(in);
  std::uint32_t d = get_u32(in);
  std::uint32_t nlist = get_u32(in);
  if (d == 0 || nlist == 0) throw ValidationError(path + ": degenerate header");

  std::uintmax_t expected = 20 + 4ull * nlist * d + 8ull * (nlist + 1) + 4ull * n +
                            4ull * n * d;
  std::uintmax_t actual = std::filesystem::file_size(path);
  if (expected != actual)
    throw IoError(path + ": expected " + std::to_string(expected) + " bytes, found " +
                  std::to_string(actual));

  IvfIndex index;
  index.centroids.resize(nlist, d);
  in.read(reinterpret_cast<char*>(index.centroids.data()), 4ull * nlist * d);
  std::vector<std::uint64_t> offsets(nlist + 1);
  in.read(reinterpret_cast<char*>(offsets.data()), 8ull * offsets.size());
  index.offsets.assign(offsets.begin(), offsets.end());
  index.row_ids.resize(n);
  in.read(reinterpret_cast<char*>(index.row_ids.data()), 4ull * n);
  index.vectors.resize(n, d);
  in.read(reinterpret_cast<char*>(index.vectors.data()), 4ull * n * d);
  if (!in) throw IoError(path + ": short read");
  if (index.offsets.front() != 0 || index.offsets.back() != n)
    throw ValidationError(path + ": inconsistent list offsets");

  std::string ids_path = path + ".ids";
  std::ifstream ids_in(ids_path, std::ios::binary);
  if (!ids_in) throw IoError("cannot open id sidecar: " + ids_path);
  std::string line;
  while (std::getline(ids_in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    index.ids.push_back(line);
  }
  if (index.ids.size() != n)
    throw ValidationError(ids_path + ": " + std::to_string(index.ids.size()) +
                          " ids for " + std::to_string(n) + " rows");
  return index;
}

int default_nlist(Eigen::Index n) {
  return std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))));
}

}  // namespace bitext
