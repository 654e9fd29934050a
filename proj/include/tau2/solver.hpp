#pragma once

#include "tau2/core.hpp"
#include "tau2/prox.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tau2 {

/// min tau2(x) subject to ||A x - b||_2 <= eps.
struct RecoveryProblem {
  Matrix a;
  Vector b;
  double eps = 0.0;

  /// Checks shapes, finiteness, b != 0, eps >= 0 and that the feasible set
  /// is nonempty (the least-norm point lies within eps + 1e-8).
  void validate() const;

  double residual(const Vector& x) const { return (a * x - b).norm(); }

  /// ||A x - b|| <= eps + slack * max(1, ||b||).
  bool feasible(const Vector& x, double slack = 1e-8) const;
};

struct SolverConfig {
  double rho = 100.0;        // augmented-Lagrangian penalty
  double beta = 100.0;       // z-step parameter (noisy case), beta >= rho
  double eta_factor = 1.0;   // eta = eta_factor * rho * lambda_max(A^T A)
  double outer_tol = 1e-6;
  std::size_t outer_max_iter = 0;  // 0 selects 5 n
  double inner_tol = 1e-8;
  std::size_t inner_max_iter = 10000;
  bool warm_start = true;

  void validate() const;
};

enum class SolverStatus { Converged, MaxIter, Degenerate };
std::string to_string(SolverStatus status);

/// Iterates of the splitting scheme: primal x, auxiliary z ~ A x, dual y.
struct AdlpmmState {
  Vector x;
  Vector z;
  Vector y;
};

struct SubproblemResult {
  Vector x;
  std::size_t inner_iters = 0;
  bool hit_max_iter = false;
  AdlpmmState state;
};

/// The traces hold accepted steps only, so each has
/// outer_iters - rejected_steps (+1 for the k = 0 entries) elements.
struct SolverResult {
  Vector x;
  std::vector<double> alpha_trace;        // alpha^(0), alpha^(1), ...
  std::vector<double> dinkelbach_trace;   // ||x^(k)||_1^2 - alpha^(k-1) ||x^(k)||_2^2, k >= 1
  std::vector<double> iterate_norm_trace; // ||x^(k)||_2, k >= 0
  std::vector<double> step_trace;         // ||x^(k) - x^(k-1)||_2, k >= 1
  std::size_t outer_iters = 0;  // subproblem solves, a rejected final attempt included
  std::size_t inner_iters_total = 0;
  std::size_t inner_max_hits = 0;
  std::size_t rejected_steps = 0;  // steps discarded because alpha went up
  SolverStatus status = SolverStatus::MaxIter;
  double feasibility_residual = 0.0;
  double lipschitz = 0.0;  // lambda_max(A^T A)
};

/// Linearized convex subproblem
///   min ||x||_1^2 - 2 alpha <c, x>  s.t.  ||A x - b|| <= eps
/// solved by the alternating direction linearized proximal method of
/// multipliers with eta = eta_factor * rho * L:
///   x+ = prox_{||.||_1^2 / eta}(x - (rho/eta) A^T (A x - z + y/rho) + (2 alpha/eta) c)
///   z+ = P_ball(z + (rho/beta)(A x+ - z + y/rho))     (z = b when eps = 0)
///   y+ = y + rho (A x+ - z+)
/// The Lipschitz constant L = lambda_max(A^T A) is computed once per object.
class AdlpmmSubproblem {
 public:
  AdlpmmSubproblem(const RecoveryProblem& problem, const SolverConfig& config);
  AdlpmmSubproblem(const RecoveryProblem& problem, const SolverConfig& config, double lipschitz);

  /// tol > 0 overrides config.inner_tol for this call.
  SubproblemResult solve(double alpha, const Vector& c, const AdlpmmState* warm = nullptr,
                         double tol = 0.0);

  /// x = x0, z = P_ball(A x0), y = 0.
  AdlpmmState initial_state(const Vector& x0) const;

  double lipschitz() const { return lipschitz_; }
  double eta() const { return config_.eta_factor * config_.rho * lipschitz_; }

 private:
  RecoveryProblem problem_;
  SolverConfig config_;
  double lipschitz_;
  ProxWorkspace ws_;
};

/// One-shot wrapper over AdlpmmSubproblem.
SubproblemResult adlpmm_subproblem(const RecoveryProblem& problem, double alpha, const Vector& c,
                                   const SolverConfig& config,
                                   const AdlpmmState* warm = nullptr);

/// Dinkelbach outer loop with linearized subproblems:
///   alpha^(0) = tau2(x0);
///   x^(k+1) = argmin ||x||_1^2 - 2 alpha^(k) <x^(k), x>  over the feasible set;
///   alpha^(k+1) = tau2(x^(k+1)).
/// Stops when ||x^(k) - x^(k-1)|| / max(1, ||x^(k-1)||) < outer_tol, at
/// outer_max_iter, or (status Degenerate) when an iterate is exactly zero.
///
/// An exact subproblem step never increases alpha. When an inexact step
/// does, the subproblem is re-solved from its final state with the inner
/// tolerance tightened by 1e-2 (twice at most); if alpha still increases
/// the step is discarded and the loop stops as Converged at the last
/// accepted iterate. Hence alpha_trace is nonincreasing and every
/// dinkelbach_trace entry is <= 0.
/// Throws std::invalid_argument if x0 is zero or infeasible.
SolverResult dinkelbach_solve(const RecoveryProblem& problem, const Vector& x0,
                              const SolverConfig& config);

struct L1Options {
  double rho = 1.0;  // penalty after normalizing ||b|| to 1
  double tol = 1e-8;
  std::size_t max_iter = 20000;
};

/// Approximate basis pursuit (denoising) solution
///   min ||x||_1  s.t.  ||A x - b|| <= eps
/// using the same splitting with soft thresholding in the x-step. The data
/// are rescaled so ||b|| = 1 beforehand. When eps = 0 the result is moved
/// onto {A x = b} with a least-norm correction.
Vector l1_initializer(const RecoveryProblem& problem, const L1Options& options = {});
Vector l1_initializer(const RecoveryProblem& problem, double tol, std::size_t max_iter);

/// Feasible start for the noisy case: x_l1 when it already satisfies the
/// constraint, otherwise pinv(A) b + eps (x_l1 - pinv(A) b) / ||A x_l1 - b||.
Vector noisy_initial_point(const RecoveryProblem& problem, const Vector& x_l1);

/// Full pipeline: l1 start, noisy correction when eps > 0, Dinkelbach loop.
SolverResult recover(const RecoveryProblem& problem, const SolverConfig& config,
                     const L1Options& l1 = {});

}  // namespace tau2
