#pragma once

#include "tau2/core.hpp"
#include "tau2/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace tau2 {

/// H(alpha) = [ee^T - alpha I, ee^T + alpha I; ee^T + alpha I, ee^T - alpha I]
/// kept as rank-one blocks plus a scaled identity. For v = [x+; x-],
/// v^T H v = ||x||_1^2 - alpha ||x||_2^2. H(0) is the convex quadratic part
/// of the linearized problem.
struct QuadForm {
  Eigen::Index n = 0;
  double alpha = 0.0;

  Vector apply(const Vector& v) const;  // O(n)
  double eval(const Vector& v) const { return v.dot(apply(v)); }
  Matrix dense() const;
};

QuadForm build_H(Eigen::Index n, double alpha);

/// Orthonormal DCT-II: D_ij = sqrt((2 - [i=1]) / n) cos((i-1)(2j-1) pi / (2n)).
Matrix dct2_matrix(Eigen::Index n);

/// Sparse orthogonal mixing matrix pairing coordinate k with n + k:
/// [[1, 1], [1, -1]]/sqrt(2) for k = 1, [[1, 1], [-1, 1]]/sqrt(2) otherwise.
Matrix mixing_matrix(Eigen::Index n);

struct SpectrumReport {
  Eigen::Index n = 0;
  double alpha = 0.0;
  Vector eigenvalues;  // ascending
  Vector expected;     // ascending
  double eigen_error = 0.0;
  double trace_error = 0.0;
  // Best of the tried factorizations diag(D^T, D^T) M Lambda M^T diag(D, D).
  double reconstruction_error = 0.0;
  std::string reconstruction;  // which orientation / ordering reconstructed H
  std::vector<std::string> deviations;
  bool passed = false;
};

/// Dense eigen-decomposition of H(alpha); expects {2n x1, -2 alpha xn, 0 x(n-1)}.
SpectrumReport verify_H_spectrum(Eigen::Index n, double alpha, double tol = 1e-8);

enum class QpMode { ExactIndefinite, LinearizedConvex };
enum class ConstraintKind { AffineEquality, QuadraticBall };

std::string to_string(QpMode mode);
std::string to_string(ConstraintKind kind);

/// min_v v^T P v + <q, v>  over v >= 0 with
///   AffineEquality:  C v = b,                C = [A, -A]
///   QuadraticBall:   v^T C^T C v - 2 <C^T b, v> + (||b||^2 - eps^2) <= 0
/// P = H(alpha) (exact) or H(0) (linearized, q = -2 alpha [c; -c]).
struct QpExport {
  QpMode mode = QpMode::ExactIndefinite;
  ConstraintKind constraint = ConstraintKind::AffineEquality;
  double alpha = 0.0;
  QuadForm quad;
  Vector linear;
  Matrix c_matrix;  // [A, -A]
  Vector rhs;       // b
  double eps = 0.0;
  bool nonnegative = true;

  Eigen::Index dim() const { return 2 * quad.n; }
  double objective(const Vector& v) const;
  /// Equality: ||C v - b||. Ball: value of the quadratic constraint function.
  double constraint_value(const Vector& v) const;
  Matrix ball_gram() const;    // C^T C
  Vector ball_linear() const;  // C^T b
  double ball_constant() const { return rhs.squaredNorm() - eps * eps; }

  /// "tau2-qp/1"; reals are written as 17-significant-digit strings.
  nlohmann::json to_json(bool dense_objective = false) const;
  static QpExport from_json(const nlohmann::json& j);
};

QpExport export_qp(const RecoveryProblem& problem, double alpha, QpMode mode,
                   const std::optional<Vector>& c = std::nullopt);

/// Feasible set x0 + span(basis); basis orthonormal, x0 orthogonal to it.
struct KernelModel {
  Matrix basis;
  Vector x0;
  Eigen::Index dim() const { return basis.cols(); }
};

/// Throws DomainError when b is not in the range of A.
KernelModel kernel_model(const Matrix& a, const Vector& b, double rank_tol = 1e-10);

/// min ||u||_1^2 over unit u in the kernel. d = 1 or 2 only.
double alpha_star_exact(const KernelModel& model);

/// Upper bound on alpha*: best of `samples` random unit kernel directions,
/// each polished by projected subgradient steps on the sphere.
double alpha_star_sampled(const KernelModel& model, std::size_t samples, std::uint64_t seed);

struct FValue {
  double value = 0.0;   // -inf when unbounded
  bool unbounded = false;
  double box_min = 0.0;  // minimum over coefficients within the radius
};

/// F(alpha) = inf ||x||_1^2 - alpha ||x||_2^2 over x0 + Ker(A). Along each
/// line the objective is piecewise quadratic and is minimized exactly;
/// d = 2 scans `grid_points` directions and refines by golden section.
/// radius <= 0 selects 1e4 (1 + ||x0||).
FValue eval_F_bruteforce(const KernelModel& model, double alpha, double grid_radius = 0.0,
                         std::size_t grid_points = 100000);

struct AlphaBar {
  double value = 0.0;
  bool attained = false;  // false: only approached along an unbounded sequence
  Vector minimizer;       // set when attained
};

/// inf tau2 over x0 + Ker(A), d = 1 or 2.
AlphaBar alpha_bar_exact(const KernelModel& model, std::size_t grid_points = 100000);

struct SphericalCheck {
  bool holds = false;
  double alpha_star = 0.0;
  bool exact = true;  // false: alpha_star is the sampled upper bound
};

/// alpha* >= m / s.
SphericalCheck spherical_bound_check(const KernelModel& model, double m, double s,
                                     std::size_t samples = 10000, std::uint64_t seed = 0);

}  // namespace tau2
