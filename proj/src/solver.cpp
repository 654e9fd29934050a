#include "tau2/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tau2 {
namespace {

constexpr int kMaxRefinements = 2;

struct InnerOutcome {
  std::size_t iters = 0;
  bool hit_max_iter = false;
};

struct SplittingParams {
  double rho;
  double beta;
  double eta;
  double tol;
  std::size_t max_iter;
};

// Shared AD-LPMM loop. `prox(w, out)` evaluates prox_{theta/eta}; `shift`
// is the linear-term contribution (2 alpha / eta) c, or empty for none.
template <class Prox>
InnerOutcome run_splitting(const Matrix& a, const Vector& b, double eps, const SplittingParams& p,
                           const Vector& shift, AdlpmmState& st, Prox&& prox) {
  const bool noiseless = eps == 0.0;
  const double b_scale = std::max(1.0, b.norm());
  Vector ax = a * st.x;
  Vector r(b.size());
  Vector w(st.x.size());
  Vector x_next(st.x.size());
  Vector ax_next(b.size());
  Vector z_next(b.size());

  InnerOutcome out;
  for (std::size_t j = 0; j < p.max_iter; ++j) {
    r = ax - st.z + st.y / p.rho;
    w.noalias() = st.x - (p.rho / p.eta) * (a.transpose() * r);
    if (shift.size() != 0) w += shift;
    prox(w, x_next);
    ax_next.noalias() = a * x_next;

    if (noiseless) {
      z_next = b;
    } else {
      const Vector u = st.z + (p.rho / p.beta) * (ax_next - st.z + st.y / p.rho);
      project_ball(u, b, eps, z_next);
    }
    st.y += p.rho * (ax_next - z_next);

    const double dx = (x_next - st.x).norm() / std::max(1.0, st.x.norm());
    const double primal = (ax_next - z_next).norm() / b_scale;
    st.x.swap(x_next);
    ax.swap(ax_next);
    st.z.swap(z_next);
    out.iters = j + 1;
    if (std::max(dx, primal) < p.tol) return out;
  }
  out.hit_max_iter = true;
  return out;
}

double default_lipschitz(const Matrix& a) {
  try {
    return lambda_max_gram(a);
  } catch (const ConvergenceError& e) {
    // Slow power iteration still gives a usable step bound.
    return e.estimate();
  }
}

}  // namespace

void RecoveryProblem::validate() const {
  if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("RecoveryProblem: empty matrix");
  if (b.size() != a.rows()) throw std::invalid_argument("RecoveryProblem: b has wrong length");
  if (!a.allFinite() || !b.allFinite()) throw std::invalid_argument("RecoveryProblem: non-finite data");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw std::invalid_argument("RecoveryProblem: eps must be >= 0");
  if (b.norm() == 0.0) throw std::invalid_argument("RecoveryProblem: b must be nonzero");
  const Vector x = least_norm_solution(a, b);
  if (residual(x) > eps + 1e-8 * std::max(1.0, b.norm())) {
    throw std::invalid_argument("RecoveryProblem: feasible set is empty");
  }
}

bool RecoveryProblem::feasible(const Vector& x, double slack) const {
  return residual(x) <= eps + slack * std::max(1.0, b.norm());
}

void SolverConfig::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("SolverConfig: rho must be positive");
  if (!(beta >= rho)) throw std::invalid_argument("SolverConfig: beta must be >= rho");
  if (!(eta_factor >= 1.0)) throw std::invalid_argument("SolverConfig: eta_factor must be >= 1");
  if (!(outer_tol > 0.0) || !(inner_tol > 0.0)) {
    throw std::invalid_argument("SolverConfig: tolerances must be positive");
  }
  if (inner_max_iter == 0) throw std::invalid_argument("SolverConfig: inner_max_iter must be >= 1");
}

std::string to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Converged:
      return "Converged";
    case SolverStatus::MaxIter:
      return "MaxIter";
    case SolverStatus::Degenerate:
      return "Degenerate";
  }
  return "Unknown";
}

AdlpmmSubproblem::AdlpmmSubproblem(const RecoveryProblem& problem, const SolverConfig& config)
    : AdlpmmSubproblem(problem, config, default_lipschitz(problem.a)) {}

AdlpmmSubproblem::AdlpmmSubproblem(const RecoveryProblem& problem, const SolverConfig& config,
                                   double lipschitz)
    : problem_(problem), config_(config), lipschitz_(lipschitz) {
  config_.validate();
  if (!(lipschitz_ > 0.0)) throw std::invalid_argument("AdlpmmSubproblem: lambda_max must be positive");
}

AdlpmmState AdlpmmSubproblem::initial_state(const Vector& x0) const {
  AdlpmmState st;
  st.x = x0;
  st.z = project_ball(problem_.a * x0, problem_.b, problem_.eps);
  st.y = Vector::Zero(problem_.b.size());
  return st;
}

SubproblemResult AdlpmmSubproblem::solve(double alpha, const Vector& c, const AdlpmmState* warm,
                                         double tol) {
  if (alpha < 0.0) throw std::invalid_argument("adlpmm_subproblem: alpha must be >= 0");
  if (c.size() != problem_.a.cols()) throw std::invalid_argument("adlpmm_subproblem: c has wrong length");

  SubproblemResult res;
  res.state = warm ? *warm : initial_state(Vector::Zero(problem_.a.cols()));
  const double eta = this->eta();
  const SplittingParams params{config_.rho, config_.beta, eta, tol > 0.0 ? tol : config_.inner_tol,
                               config_.inner_max_iter};
  const Vector shift = (2.0 * alpha / eta) * c;
  const double prox_weight = 1.0 / eta;
  const auto outcome = run_splitting(problem_.a, problem_.b, problem_.eps, params, shift, res.state,
                                     [&](const Vector& w, Vector& out) {
                                       prox_sq_l1(w, prox_weight, ws_, out);
                                     });
  res.x = res.state.x;
  res.inner_iters = outcome.iters;
  res.hit_max_iter = outcome.hit_max_iter;
  return res;
}

SubproblemResult adlpmm_subproblem(const RecoveryProblem& problem, double alpha, const Vector& c,
                                   const SolverConfig& config, const AdlpmmState* warm) {
  AdlpmmSubproblem sub(problem, config);
  return sub.solve(alpha, c, warm);
}

SolverResult dinkelbach_solve(const RecoveryProblem& problem, const Vector& x0,
                              const SolverConfig& config) {
  config.validate();
  if (x0.size() != problem.a.cols()) throw std::invalid_argument("dinkelbach_solve: x0 has wrong length");
  if (x0.norm() == 0.0) throw std::invalid_argument("dinkelbach_solve: x0 must be nonzero");
  if (!problem.feasible(x0)) throw std::invalid_argument("dinkelbach_solve: x0 is infeasible");

  AdlpmmSubproblem sub(problem, config);
  const std::size_t max_outer =
      config.outer_max_iter ? config.outer_max_iter : 5 * static_cast<std::size_t>(x0.size());

  SolverResult res;
  res.lipschitz = sub.lipschitz();
  Vector x = x0;
  double alpha = tau2(x);
  res.alpha_trace.push_back(alpha);
  res.iterate_norm_trace.push_back(x.norm());
  AdlpmmState state = sub.initial_state(x);

  res.status = SolverStatus::MaxIter;
  for (std::size_t k = 0; k < max_outer; ++k) {
    const AdlpmmState* warm = nullptr;
    AdlpmmState cold;
    if (config.warm_start) {
      warm = &state;
    } else {
      cold = sub.initial_state(x);
      warm = &cold;
    }
    SubproblemResult step = sub.solve(alpha, x, warm);
    res.inner_iters_total += step.inner_iters;
    if (step.hit_max_iter) ++res.inner_max_hits;
    res.outer_iters = k + 1;

    if (step.x.norm() == 0.0 || !step.x.allFinite()) {
      res.status = SolverStatus::Degenerate;
      break;
    }
    double next_alpha = tau2(step.x);
    double refine_tol = config.inner_tol;
    for (int attempt = 0; attempt < kMaxRefinements && next_alpha > alpha; ++attempt) {
      refine_tol *= 1e-2;
      const AdlpmmState resume = step.state;
      SubproblemResult refined = sub.solve(alpha, x, &resume, refine_tol);
      res.inner_iters_total += refined.inner_iters;
      if (refined.hit_max_iter) ++res.inner_max_hits;
      step = std::move(refined);
      if (step.x.norm() == 0.0 || !step.x.allFinite()) break;
      next_alpha = tau2(step.x);
    }
    if (step.x.norm() == 0.0 || !step.x.allFinite()) {
      res.status = SolverStatus::Degenerate;
      break;
    }
    if (next_alpha > alpha) {
      ++res.rejected_steps;
      res.status = SolverStatus::Converged;
      break;
    }
    const double next_norm = step.x.norm();
    const double l1 = norm_l1(step.x);
    res.dinkelbach_trace.push_back(l1 * l1 - alpha * next_norm * next_norm);
    const double dx = (step.x - x).norm();
    const double rel = dx / std::max(1.0, x.norm());

    x = step.x;
    alpha = next_alpha;
    state = std::move(step.state);
    res.alpha_trace.push_back(alpha);
    res.iterate_norm_trace.push_back(next_norm);
    res.step_trace.push_back(dx);
    if (rel < config.outer_tol) {
      res.status = SolverStatus::Converged;
      break;
    }
  }
  res.x = x;
  res.feasibility_residual = problem.residual(x);
  return res;
}

Vector l1_initializer(const RecoveryProblem& problem, const L1Options& options) {
  const double scale = problem.b.norm();
  if (scale == 0.0) return Vector::Zero(problem.a.cols());
  const Vector b = problem.b / scale;
  const double eps = problem.eps / scale;

  const double lipschitz = default_lipschitz(problem.a);
  const SplittingParams params{options.rho, options.rho, options.rho * lipschitz, options.tol,
                               options.max_iter};
  AdlpmmState st;
  st.x = Vector::Zero(problem.a.cols());
  st.z = project_ball(Vector::Zero(b.size()), b, eps);
  st.y = Vector::Zero(b.size());
  const double threshold = 1.0 / params.eta;
  run_splitting(problem.a, b, eps, params, Vector(), st,
                [threshold](const Vector& w, Vector& out) { prox_l1(w, threshold, out); });

  Vector x = scale * st.x;
  if (problem.eps == 0.0) {
    x += least_norm_solution(problem.a, problem.b - problem.a * x);
  }
  return x;
}

Vector l1_initializer(const RecoveryProblem& problem, double tol, std::size_t max_iter) {
  L1Options options;
  options.tol = tol;
  options.max_iter = max_iter;
  return l1_initializer(problem, options);
}

Vector noisy_initial_point(const RecoveryProblem& problem, const Vector& x_l1) {
  const double r = problem.residual(x_l1);
  if (r <= problem.eps) return x_l1;
  const Vector x_ln = least_norm_solution(problem.a, problem.b);
  return x_ln + problem.eps * (x_l1 - x_ln) / r;
}

SolverResult recover(const RecoveryProblem& problem, const SolverConfig& config, const L1Options& l1) {
  Vector x0 = l1_initializer(problem, l1);
  if (problem.eps > 0.0) x0 = noisy_initial_point(problem, x0);
  if (x0.norm() == 0.0) x0 = least_norm_solution(problem.a, problem.b);
  return dinkelbach_solve(problem, x0, config);
}

}  // namespace tau2
