#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>

#include "uwsvd/detect.hpp"
#include "uwsvd/flops.hpp"

namespace uwsvd {

struct SolverSpec {
  Algorithm algorithm = Algorithm::kSsor;
  int iterations = 1;
  double ssor_omega = 1.0;     // 1 reproduces M = L D^{-1} L^H
  bool lbfgs_textbook = false; // standard memory-1 BFGS direction instead of
                               // the rank-one-minus-identity form
};

/// Per-run record. residual_norms[t] = ||b - A x_t|| for t = 0..T (diagnostic,
/// not charged to the flop counter); flops[t] is the cumulative multiply-add
/// count after iteration t, flops[0] covering setup such as materialization.
struct SolverTrace {
  std::vector<double> residual_norms;
  std::vector<std::uint64_t> flops;
  std::vector<std::uint8_t> stagnated;  // size T
  cvector final_iterate;

  bool any_stagnation() const {
    for (const auto s : stagnated)
      if (s) return true;
    return false;
  }
};

using IterationCallback =
    std::function<void(int iteration, std::span<const cplx> iterate)>;

/// Runs T iterations from the zero vector, invoking the callback with each
/// produced iterate.
SolverTrace run_solver(const DetectionProblem& problem, const SolverSpec& spec,
                       const IterationCallback& callback = {});

/// Writes "iteration,residual_norm,cumulative_flops" rows.
void write_trace_csv(std::ostream& os, const SolverTrace& trace);

// ---------------------------------------------------------------------------
// Step-level API
// ---------------------------------------------------------------------------

enum class SplitPreconditioner { kJacobi, kGaussSeidel, kSsor };

/// x + (b - A x).
cvector step_richardson(const DetectionProblem& problem, std::span<const cplx> x,
                        FlopCount* fc = nullptr);

/// x + M^{-1}(b - A x) with M built from the splitting of A. Jacobi applies
/// the operator directly; GS/SSOR use the materialized matrix and its lower
/// triangle. omega != 1 generalizes the SSOR preconditioner.
cvector step_matrix_splitting(const DetectionProblem& problem,
                              std::span<const cplx> x, SplitPreconditioner m,
                              double omega = 1.0, FlopCount* fc = nullptr);

struct LbfgsState {
  std::vector<double> theta0;  // D(Phi)^{-1}
  cvector prev_x;
  cvector prev_g;
  bool has_prev = false;
  bool stagnated = false;  // set by the step that no-ops
  bool textbook = false;
};

LbfgsState make_lbfgs_state(const DetectionProblem& problem,
                            bool textbook = false, FlopCount* fc = nullptr);

/// One L-BFGS update. On a curvature breakdown the input iterate is returned
/// unchanged and state.stagnated is set.
cvector step_lbfgs(const DetectionProblem& problem, LbfgsState& state,
                   std::span<const cplx> x, FlopCount* fc = nullptr);

struct CgState {
  cvector residual;
  cvector direction;
  std::vector<double> inv_diag;  // Jacobi preconditioner, matching theta0
  double rz = 0.0;
  bool stagnated = false;
};

CgState make_cg_state(const DetectionProblem& problem, std::span<const cplx> x0,
                      FlopCount* fc = nullptr);

/// One preconditioned-CG update (diagonal preconditioner, so that the
/// trajectory coincides with the L-BFGS iteration on quadratics).
cvector step_cg(const DetectionProblem& problem, CgState& state,
                std::span<const cplx> x, FlopCount* fc = nullptr);

}  // namespace uwsvd
