// Throughput benchmark for the blocked exact scan. The CI budget for the
// reference workload (10k x 100k at d=1024) is recorded here, not asserted
// in unit tests.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "bitext/rng.hpp"
#include "bitext/simsearch.hpp"

using namespace bitext;

// 4-core laptop budget for --full (10k x 100k, d=1024, k=20)
static constexpr double kFullBudgetSeconds = 120.0;

static EmbeddingMatrix random_unit(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  EmbeddingMatrix m;
  m.rows.resize(n, d);
  for (int i = 0; i < n; ++i) {
    double norm2 = 0.0;
    std::vector<double> v(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      v[static_cast<std::size_t>(j)] = rng.gaussian();
      norm2 += v[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < d; ++j)
      m.rows(i, j) = static_cast<float>(v[static_cast<std::size_t>(j)] / std::sqrt(norm2));
    m.ids.push_back("r" + std::to_string(i));
  }
  return m;
}

int main(int argc, char** argv) {
  int nq = 1000, nt = 10000, d = 1024;
  if (argc > 1 && std::string(argv[1]) == "--full") {
    nq = 10000;
    nt = 100000;
  }
  std::printf("knn_exact benchmark: %d queries x %d targets, d=%d, k=20\n", nq, nt, d);
  EmbeddingMatrix queries = random_unit(nq, d, 1);
  EmbeddingMatrix targets = random_unit(nt, d, 2);

  auto start = std::chrono::steady_clock::now();
  auto result = knn_exact(queries, targets, 20);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  double gflops = 2.0 * nq * static_cast<double>(nt) * d / seconds / 1e9;
  std::printf("%.2f s  (%.1f GFLOP/s)\n", seconds, gflops);
  if (nq == 10000)
    std::printf("budget: %.0f s -> %s\n", kFullBudgetSeconds,
                seconds <= kFullBudgetSeconds ? "within budget" : "OVER BUDGET");
  return result.size() == static_cast<std::size_t>(nq) ? 0 : 1;
}
