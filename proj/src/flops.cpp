#include "uwsvd/flops.hpp"

#include <stdexcept>

namespace uwsvd {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kRichardson: return "ri";
    case Algorithm::kJacobi: return "ji";
    case Algorithm::kGaussSeidel: return "gs";
    case Algorithm::kSsor: return "ssor";
    case Algorithm::kLbfgs: return "lbfgs";
    case Algorithm::kCg: return "cg";
  }
  return "unknown";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "ri") return Algorithm::kRichardson;
  if (name == "ji") return Algorithm::kJacobi;
  if (name == "gs") return Algorithm::kGaussSeidel;
  if (name == "ssor") return Algorithm::kSsor;
  if (name == "lbfgs") return Algorithm::kLbfgs;
  if (name == "cg") return Algorithm::kCg;
  throw std::invalid_argument("unknown algorithm: " + name +
                              " (expected ri, ji, gs, ssor, lbfgs or cg)");
}

FlopBreakdown flop_estimate(Algorithm algorithm, std::size_t m, std::size_t n,
                            std::size_t n_ue, std::size_t /*t*/) {
  if (m == 0 || n == 0 || n_ue == 0) {
    throw std::invalid_argument("flop_estimate: dimensions must be positive");
  }
  FlopBreakdown b;
  b.uw_svd_overhead = n_ue * m * n + n_ue * n + 2 * n;
  switch (algorithm) {
    case Algorithm::kRichardson:
      b.per_iteration = 2 * m * n;
      break;
    case Algorithm::kJacobi:
      b.per_iteration = 2 * m * n + n;
      break;
    case Algorithm::kGaussSeidel:
      b.gram_build = m * n * n;
      b.matrix_inverse = n * n;
      b.per_iteration = 3 * n * n / 2;
      break;
    case Algorithm::kSsor:
      b.gram_build = m * n * n;
      b.matrix_inverse = n * n;
      b.per_iteration = 2 * n * n + n;
      break;
    case Algorithm::kLbfgs:
      b.per_iteration = 4 * m * n + n * n + 5 * n;
      break;
    case Algorithm::kCg:
      // Not tabulated in the reference cost model; structurally one operator
      // product plus a handful of level-1 operations per iteration.
      b.per_iteration = 2 * m * n + 6 * n;
      break;
  }
  return b;
}

FlopBreakdown flop_estimate_exact(std::size_t m, std::size_t n) {
  FlopBreakdown b;
  b.gram_build = m * n * n;
  b.matrix_inverse = n * n * n;
  return b;
}

}  // namespace uwsvd
