#include "uwsvd/solvers.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace uwsvd {

namespace {

constexpr double kCurvatureFloor = 1e-14;

cvector compute_residual(const DetectionProblem& p, std::span<const cplx> x,
                         FlopCount* fc) {
  cvector r(p.dim());
  p.op->apply(x, r, fc);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = p.rhs[i] - r[i];
  return r;
}

// Residual via the materialized matrix; this is the Theta(n^2) path the
// splitting methods are charged for.
cvector residual_materialized(const DetectionProblem& p, std::span<const cplx> x,
                              FlopCount* fc) {
  const ComplexMatrix& a = p.op->materialized(fc);
  cvector r(p.dim());
  matvec(a, x, r, fc);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = p.rhs[i] - r[i];
  return r;
}

double norm_sq(std::span<const cplx> x) {
  double acc = 0.0;
  for (const cplx& v : x) acc += std::norm(v);
  return acc;
}

// M^{-1} r for the SSOR splitting M = Lw D^{-1} Lw^H (omega == 1; the scaled
// variant applies omega(2-omega) Lw^{-H} D Lw^{-1} with Lw = offdiag(L) + D/w).
cvector apply_ssor_inverse(const ComplexMatrix& lw, std::span<const double> diag,
                           double omega, std::span<const cplx> r, FlopCount* fc) {
  cvector z = solve_lower_triangular(lw, r, fc);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] *= diag[i];
  count(fc, z.size());
  z = solve_lower_adjoint(lw, z, fc);
  if (omega != 1.0) {
    const double scale = omega * (2.0 - omega);
    for (cplx& v : z) v *= scale;
    count(fc, z.size());
  }
  return z;
}

ComplexMatrix ssor_lower(const DetectionProblem& p, double omega, FlopCount* fc) {
  ComplexMatrix lw = p.op->lower_triangular(fc);
  const std::vector<double> d = p.op->diagonal(fc);
  for (std::size_t i = 0; i < lw.rows(); ++i) lw(i, i) = d[i] / omega;
  return lw;
}

}  // namespace

cvector step_richardson(const DetectionProblem& problem, std::span<const cplx> x,
                        FlopCount* fc) {
  cvector r = compute_residual(problem, x, fc);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += x[i];
  return r;
}

cvector step_matrix_splitting(const DetectionProblem& problem,
                              std::span<const cplx> x, SplitPreconditioner m,
                              double omega, FlopCount* fc) {
  switch (m) {
    case SplitPreconditioner::kJacobi: {
      cvector r = compute_residual(problem, x, fc);
      const std::vector<double> d = problem.op->diagonal(fc);
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (d[i] == 0.0) {
          throw SingularMatrixError("step_matrix_splitting: zero diagonal");
        }
        r[i] = x[i] + r[i] / d[i];
      }
      count(fc, r.size());
      return r;
    }
    case SplitPreconditioner::kGaussSeidel: {
      cvector r = residual_materialized(problem, x, fc);
      const cvector z =
          solve_lower_triangular(problem.op->lower_triangular(fc), r, fc);
      cvector out(x.begin(), x.end());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += z[i];
      return out;
    }
    case SplitPreconditioner::kSsor: {
      cvector r = residual_materialized(problem, x, fc);
      const std::vector<double> d = problem.op->diagonal(fc);
      const ComplexMatrix lw = omega == 1.0
                                   ? problem.op->lower_triangular(fc)
                                   : ssor_lower(problem, omega, fc);
      const cvector z = apply_ssor_inverse(lw, d, omega, r, fc);
      cvector out(x.begin(), x.end());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += z[i];
      return out;
    }
  }
  throw ValidationError("step_matrix_splitting: unknown preconditioner");
}

LbfgsState make_lbfgs_state(const DetectionProblem& problem, bool textbook,
                            FlopCount* fc) {
  LbfgsState s;
  const std::vector<double> d = problem.op->diagonal(fc);
  s.theta0.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) {
      throw ValidationError("make_lbfgs_state: non-positive diagonal");
    }
    s.theta0[i] = 1.0 / d[i];
  }
  s.textbook = textbook;
  return s;
}

namespace {

// Direction Theta_t g_t of the rank-one-minus-identity Hessian approximation:
//   Theta_t = (ds dg^H / (ds^H dg) - I) Theta_0,
// applied without materializing anything. Falls back to Theta_0 g on the
// first iteration. Returns false on a curvature breakdown.
bool lbfgs_direction(const LbfgsState& s, std::span<const cplx> x,
                     std::span<const cplx> g, cvector& d, FlopCount* fc) {
  const std::size_t n = g.size();
  d.resize(n);
  cvector q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = s.theta0[i] * g[i];
  count(fc, n);
  if (!s.has_prev) {
    d = q;
    return true;
  }
  cvector ds(n), dg(n);
  for (std::size_t i = 0; i < n; ++i) {
    ds[i] = x[i] - s.prev_x[i];
    dg[i] = g[i] - s.prev_g[i];
  }
  cplx denom{};
  cplx num{};
  for (std::size_t i = 0; i < n; ++i) {
    denom += std::conj(ds[i]) * dg[i];
    num += std::conj(dg[i]) * q[i];
  }
  count(fc, 2 * n);
  if (std::abs(denom) <= kCurvatureFloor * norm_sq(ds)) return false;
  const cplx coeff = num / denom;
  for (std::size_t i = 0; i < n; ++i) d[i] = coeff * ds[i] - q[i];
  count(fc, n);
  return true;
}

// Standard memory-1 BFGS inverse-Hessian application (comparison path):
//   H = (I - rho ds dg^H) H0 (I - rho dg ds^H) + rho ds ds^H.
bool lbfgs_direction_textbook(const LbfgsState& s, std::span<const cplx> x,
                              std::span<const cplx> g, cvector& d,
                              FlopCount* fc) {
  const std::size_t n = g.size();
  d.resize(n);
  if (!s.has_prev) {
    for (std::size_t i = 0; i < n; ++i) d[i] = s.theta0[i] * g[i];
    count(fc, n);
    return true;
  }
  cvector ds(n), dg(n);
  for (std::size_t i = 0; i < n; ++i) {
    ds[i] = x[i] - s.prev_x[i];
    dg[i] = g[i] - s.prev_g[i];
  }
  cplx curv{};
  for (std::size_t i = 0; i < n; ++i) curv += std::conj(dg[i]) * ds[i];
  count(fc, n);
  if (std::abs(curv) <= kCurvatureFloor * norm_sq(ds)) return false;
  const cplx rho = 1.0 / curv;

  cplx ds_g{};
  for (std::size_t i = 0; i < n; ++i) ds_g += std::conj(ds[i]) * g[i];
  count(fc, n);
  const cplx a = rho * ds_g;
  cvector t(n);  // H0 (I - rho dg ds^H) g
  for (std::size_t i = 0; i < n; ++i) t[i] = s.theta0[i] * (g[i] - a * dg[i]);
  count(fc, 2 * n);
  cplx dg_t{};
  for (std::size_t i = 0; i < n; ++i) dg_t += std::conj(dg[i]) * t[i];
  count(fc, n);
  const cplx b = a - rho * dg_t;
  for (std::size_t i = 0; i < n; ++i) d[i] = t[i] + b * ds[i];
  count(fc, n);
  return true;
}

}  // namespace

cvector step_lbfgs(const DetectionProblem& problem, LbfgsState& state,
                   std::span<const cplx> x, FlopCount* fc) {
  const std::size_t n = problem.dim();
  state.stagnated = false;

  // g = A x - b
  cvector g(n);
  problem.op->apply(x, g, fc);
  for (std::size_t i = 0; i < n; ++i) g[i] -= problem.rhs[i];

  cvector d;
  const bool ok = state.textbook
                      ? lbfgs_direction_textbook(state, x, g, d, fc)
                      : lbfgs_direction(state, x, g, d, fc);
  if (!ok) {
    state.stagnated = true;
    return cvector(x.begin(), x.end());
  }

  cvector ad(n);
  problem.op->apply(d, ad, fc);
  cplx g_d{};
  cplx d_ad{};
  for (std::size_t i = 0; i < n; ++i) {
    g_d += std::conj(g[i]) * d[i];
    d_ad += std::conj(d[i]) * ad[i];
  }
  count(fc, 2 * n);
  if (std::abs(d_ad) <= kCurvatureFloor * norm_sq(d)) {
    state.stagnated = true;
    return cvector(x.begin(), x.end());
  }
  const cplx xi = -g_d / d_ad;

  cvector out(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) out[i] += xi * d[i];
  count(fc, n);

  state.prev_x.assign(x.begin(), x.end());
  state.prev_g = std::move(g);
  state.has_prev = true;
  return out;
}

CgState make_cg_state(const DetectionProblem& problem, std::span<const cplx> x0,
                      FlopCount* fc) {
  CgState s;
  s.residual = compute_residual(problem, x0, fc);
  const std::vector<double> d = problem.op->diagonal(fc);
  s.inv_diag.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) {
      throw ValidationError("make_cg_state: non-positive diagonal");
    }
    s.inv_diag[i] = 1.0 / d[i];
  }
  s.direction.resize(d.size());
  double rz = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    s.direction[i] = s.inv_diag[i] * s.residual[i];
    rz += (std::conj(s.residual[i]) * s.direction[i]).real();
  }
  count(fc, 2 * d.size());
  s.rz = rz;
  return s;
}

cvector step_cg(const DetectionProblem& problem, CgState& state,
                std::span<const cplx> x, FlopCount* fc) {
  const std::size_t n = problem.dim();
  state.stagnated = false;

  cvector ap(n);
  problem.op->apply(state.direction, ap, fc);
  cplx p_ap{};
  for (std::size_t i = 0; i < n; ++i) {
    p_ap += std::conj(state.direction[i]) * ap[i];
  }
  count(fc, n);
  if (p_ap.real() <= kCurvatureFloor * norm_sq(state.direction)) {
    state.stagnated = true;
    return cvector(x.begin(), x.end());
  }
  const double alpha = state.rz / p_ap.real();

  cvector out(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    out[i] += alpha * state.direction[i];
    state.residual[i] -= alpha * ap[i];
  }
  count(fc, 2 * n);

  double rz_next = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rz_next += (std::conj(state.residual[i]) * (state.inv_diag[i] * state.residual[i])).real();
  }
  count(fc, 2 * n);
  const double beta = rz_next / state.rz;
  for (std::size_t i = 0; i < n; ++i) {
    state.direction[i] = state.inv_diag[i] * state.residual[i] +
                         beta * state.direction[i];
  }
  count(fc, 2 * n);
  state.rz = rz_next;
  return out;
}

SolverTrace run_solver(const DetectionProblem& problem, const SolverSpec& spec,
                       const IterationCallback& callback) {
  if (spec.iterations < 1) {
    throw ValidationError("run_solver: iteration count must be >= 1");
  }
  const std::size_t n = problem.dim();
  const int t_max = spec.iterations;

  SolverTrace trace;
  trace.residual_norms.reserve(t_max + 1);
  trace.flops.reserve(t_max + 1);
  trace.stagnated.assign(t_max, 0);

  FlopCount fc;
  cvector x(n, cplx{});

  // Per-algorithm setup, charged to flops[0].
  LbfgsState lbfgs_state;
  CgState cg_state;
  std::vector<double> ji_diag;
  switch (spec.algorithm) {
    case Algorithm::kRichardson:
      break;
    case Algorithm::kJacobi:
      ji_diag = problem.op->diagonal(&fc);
      break;
    case Algorithm::kGaussSeidel:
    case Algorithm::kSsor:
      problem.op->lower_triangular(&fc);
      break;
    case Algorithm::kLbfgs:
      lbfgs_state = make_lbfgs_state(problem, spec.lbfgs_textbook, &fc);
      break;
    case Algorithm::kCg:
      cg_state = make_cg_state(problem, x, &fc);
      break;
  }

  // x_0 = 0, so the initial residual is just ||b||.
  trace.residual_norms.push_back(norm2(problem.rhs));
  trace.flops.push_back(fc.madds);

  for (int t = 1; t <= t_max; ++t) {
    switch (spec.algorithm) {
      case Algorithm::kRichardson:
        x = step_richardson(problem, x, &fc);
        break;
      case Algorithm::kJacobi:
        x = step_matrix_splitting(problem, x, SplitPreconditioner::kJacobi, 1.0,
                                  &fc);
        break;
      case Algorithm::kGaussSeidel:
        x = step_matrix_splitting(problem, x, SplitPreconditioner::kGaussSeidel,
                                  1.0, &fc);
        break;
      case Algorithm::kSsor:
        x = step_matrix_splitting(problem, x, SplitPreconditioner::kSsor,
                                  spec.ssor_omega, &fc);
        break;
      case Algorithm::kLbfgs:
        x = step_lbfgs(problem, lbfgs_state, x, &fc);
        trace.stagnated[t - 1] = lbfgs_state.stagnated ? 1 : 0;
        break;
      case Algorithm::kCg:
        x = step_cg(problem, cg_state, x, &fc);
        trace.stagnated[t - 1] = cg_state.stagnated ? 1 : 0;
        break;
    }
    // Diagnostic residual, not charged to the counter.
    const cvector r = compute_residual(problem, x, nullptr);
    trace.residual_norms.push_back(norm2(r));
    trace.flops.push_back(fc.madds);
    if (callback) callback(t, x);
  }
  trace.final_iterate = std::move(x);
  return trace;
}

void write_trace_csv(std::ostream& os, const SolverTrace& trace) {
  os << "iteration,residual_norm,cumulative_flops\n";
  char line[96];
  for (std::size_t t = 0; t < trace.residual_norms.size(); ++t) {
    std::snprintf(line, sizeof(line), "%zu,%.12g,%llu\n", t,
                  trace.residual_norms[t],
                  static_cast<unsigned long long>(trace.flops[t]));
    os << line;
  }
}

}  // namespace uwsvd
