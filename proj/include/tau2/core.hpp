#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tau2 {

/// Dense real matrix. Serialized row-major; stored column-major in memory.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when an operation is asked to evaluate outside its domain
/// (for example tau_2 of the zero vector).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised by iterative routines that exhaust their iteration budget.
/// The best estimate reached so far is carried along.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

double norm_l1(const Vector& x);
double norm_l2(const Vector& x);

/// Effective sparsity tau_q(x) = (||x||_q / ||x||_1)^(q / (1 - q)).
///
/// Only finite q > 0 with q != 1 is supported; the limiting cases
/// q in {0, 1, inf} are not implemented and raise DomainError.
double tau_q(const Vector& x, double q);

/// ||x||_1^2 / ||x||_2^2. Lies in [1, n] for nonzero x.
double tau2(const Vector& x);

/// Phi(x) = tau2(x) * x.
Vector phi_map(const Vector& x);

/// ||x||_1^2 - alpha * ||x||_2^2.
double dinkelbach_value(const Vector& x, double alpha);

struct SparsityReport {
  std::size_t l0 = 0;
  double l1 = 0.0;
  double l2 = 0.0;
  double tau2 = 0.0;
  double l1_over_l2 = 0.0;
};

/// Summary of the usual sparsity measures. Entries with |x_i| <= zero_tol
/// do not count towards l0. tau2 and l1_over_l2 are 0 for the zero vector.
SparsityReport sparsity_report(const Vector& x, double zero_tol = 0.0);

/// Largest eigenvalue of A^T A by power iteration on the Gram operator,
/// started from a fixed pseudo-random vector. Stops when the Rayleigh
/// quotient changes by less than tol relative; throws ConvergenceError
/// (carrying the last estimate) after max_iter steps.
double lambda_max_gram(const Matrix& a, double tol = 1e-10, int max_iter = 10000);

/// Minimum-norm least-squares solution of A x = b using a column-pivoted
/// complete orthogonal factorization. Pivots below tol * |largest pivot|
/// are treated as zero, so rank-deficient A is fine.
Vector least_norm_solution(const Matrix& a, const Vector& b, double tol = 1e-10);

/// Number of singular values above rel_tol * sigma_max.
std::size_t numerical_rank(const Matrix& a, double rel_tol = 1e-10);

/// x_+ stacked over x_-: [max(x,0); -min(x,0)].
Vector split_signs(const Vector& x);

}  // namespace tau2
