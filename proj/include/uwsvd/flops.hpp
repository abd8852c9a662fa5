#pragma once

#include <cstdint>
#include <string>

namespace uwsvd {

/// Multiply-accumulate counter. One unit = one complex multiply-accumulate
/// (a divide or square root also counts as one unit).
struct FlopCount {
  std::uint64_t madds = 0;

  void add(std::uint64_t n) { madds += n; }
};

inline void count(FlopCount* fc, std::uint64_t n) {
  if (fc != nullptr) fc->madds += n;
}

enum class Algorithm { kRichardson, kJacobi, kGaussSeidel, kSsor, kLbfgs, kCg };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

/// Symbolic per-detector cost model, evaluated for concrete dimensions.
struct FlopBreakdown {
  std::uint64_t gram_build = 0;      // cost of forming A or Phi, if required
  std::uint64_t matrix_inverse = 0;  // one-off inverse cost
  std::uint64_t per_iteration = 0;
  std::uint64_t uw_svd_overhead = 0;  // factorization plus post-processing
};

/// Evaluates the cost-model formulas for one algorithm at the given sizes.
/// n_ue is the per-user antenna count, t the iteration budget (t is kept for
/// callers that want totals; the breakdown itself is per iteration).
FlopBreakdown flop_estimate(Algorithm algorithm, std::size_t m, std::size_t n,
                            std::size_t n_ue, std::size_t t);

/// Cost of the exact (direct) ZF/LMMSE detector: gram MN^2 plus inverse N^3.
FlopBreakdown flop_estimate_exact(std::size_t m, std::size_t n);

}  // namespace uwsvd
