#include "tau2/core.hpp"

#include "tau2/rng.hpp"

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <random>

namespace tau2 {

double norm_l1(const Vector& x) { return x.lpNorm<1>(); }

double norm_l2(const Vector& x) {
  // stableNorm avoids overflow for signals with a large dynamic range.
  return x.size() == 0 ? 0.0 : x.stableNorm();
}

double tau_q(const Vector& x, double q) {
  if (!(q > 0.0) || q == 1.0 || !std::isfinite(q)) {
    throw DomainError("tau_q: q must be finite, positive and != 1");
  }
  const double scale = x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    throw DomainError("tau_q: zero vector");
  }
  if (q == 2.0) {
    return tau2(x);
  }
  const Vector a = x.cwiseAbs() / scale;
  const double l1 = a.sum();
  const double lq = std::pow(a.array().pow(q).sum(), 1.0 / q);
  return std::pow(lq / l1, q / (1.0 - q));
}

double tau2(const Vector& x) {
  const double l2 = norm_l2(x);
  if (l2 == 0.0) {
    throw DomainError("tau2: zero vector");
  }
  const double r = norm_l1(x) / l2;
  return r * r;
}

Vector phi_map(const Vector& x) { return tau2(x) * x; }

double dinkelbach_value(const Vector& x, double alpha) {
  const double l1 = norm_l1(x);
  return l1 * l1 - alpha * x.squaredNorm();
}

SparsityReport sparsity_report(const Vector& x, double zero_tol) {
  SparsityReport r;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > zero_tol) ++r.l0;
  }
  r.l1 = norm_l1(x);
  r.l2 = norm_l2(x);
  if (r.l2 > 0.0) {
    r.l1_over_l2 = r.l1 / r.l2;
    r.tau2 = r.l1_over_l2 * r.l1_over_l2;
  }
  return r;
}

double lambda_max_gram(const Matrix& a, double tol, int max_iter) {
  if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0) {
    throw DomainError("lambda_max_gram: matrix is zero");
  }
  CounterRng rng(0x5EEDULL, Stream::PowerIteration);
  std::normal_distribution<double> normal;
  Vector v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  v.normalize();

  Vector av(a.rows());
  Vector w(a.cols());
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    av.noalias() = a * v;
    w.noalias() = a.transpose() * av;
    const double next = v.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) {
      // Start vector in the kernel; restart along a deterministic direction.
      v.setConstant(1.0 / std::sqrt(static_cast<double>(v.size())));
      v[it % v.size()] += 1.0;
      v.normalize();
      continue;
    }
    v = w / wn;
    if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next)) {
      return next;
    }
    lambda = next;
  }
  throw ConvergenceError("lambda_max_gram: power iteration did not converge", lambda);
}

Vector least_norm_solution(const Matrix& a, const Vector& b, double tol) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
  cod.setThreshold(tol);
  cod.compute(a);
  return cod.solve(b);
}

std::size_t numerical_rank(const Matrix& a, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > rel_tol * s[0]) ++r;
  }
  return r;
}

Vector split_signs(const Vector& x) {
  const Eigen::Index n = x.size();
  Vector v(2 * n);
  v.head(n) = x.cwiseMax(0.0);
  v.tail(n) = (-x).cwiseMax(0.0);
  return v;
}

}  // namespace tau2
