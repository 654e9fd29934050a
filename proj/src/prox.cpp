#include "tau2/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tau2 {

void prox_sq_l1(const Vector& x, double beta, ProxWorkspace& ws, Vector& out) {
  if (!(beta > 0.0)) throw std::invalid_argument("prox_sq_l1: beta must be positive");
  const Eigen::Index n = x.size();
  out.setZero(n);
  if (n == 0) return;

  ws.order.resize(n);
  std::iota(ws.order.begin(), ws.order.end(), Eigen::Index{0});
  std::stable_sort(ws.order.begin(), ws.order.end(), [&x](Eigen::Index a, Eigen::Index b) {
    return std::abs(x[a]) > std::abs(x[b]);
  });
  ws.sorted_abs.resize(n);
  ws.permutation.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = ws.order[i];
    ws.sorted_abs[i] = std::abs(x[j]);
    ws.permutation[i] = {j, x[j] < 0.0 ? -1.0 : 1.0};
  }
  if (ws.sorted_abs[0] == 0.0) return;

  const double two_beta = 2.0 * beta;
  Eigen::Index k = 1;
  double sum = ws.sorted_abs[0];
  double r = sum / (two_beta + 1.0);
  while (k < n) {
    if (ws.sorted_abs[k] <= two_beta * r) break;
    sum += ws.sorted_abs[k];
    ++k;
    r = sum / (two_beta * static_cast<double>(k) + 1.0);
  }

  const double shrink = two_beta * r;
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto [j, sign] = ws.permutation[i];
    out[j] = sign * std::max(ws.sorted_abs[i] - shrink, 0.0);
  }
}

Vector prox_sq_l1(const Vector& x, double beta) {
  ProxWorkspace ws;
  Vector out;
  prox_sq_l1(x, beta, ws, out);
  return out;
}

double prox_sq_l1_kkt_residual(const Vector& x, double beta, const Vector& u) {
  if (x.size() != u.size()) throw std::invalid_argument("prox_sq_l1_kkt_residual: dimension mismatch");
  const double l1 = u.lpNorm<1>();
  if (l1 == 0.0) return x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (u[i] != 0.0) {
      const double s = u[i] > 0.0 ? 1.0 : -1.0;
      worst = std::max(worst, std::abs((x[i] - u[i]) / (2.0 * beta) - l1 * s));
    } else {
      worst = std::max(worst, std::abs(x[i]) - 2.0 * beta * l1);
    }
  }
  return worst;
}

void prox_l1(const Vector& x, double t, Vector& out) {
  if (!(t > 0.0)) throw std::invalid_argument("prox_l1: threshold must be positive");
  out = x.array().sign() * (x.array().abs() - t).max(0.0);
}

Vector prox_l1(const Vector& x, double t) {
  Vector out;
  prox_l1(x, t, out);
  return out;
}

void project_ball(const Vector& u, const Vector& b, double eps, Vector& out) {
  if (u.size() != b.size()) throw std::invalid_argument("project_ball: dimension mismatch");
  if (eps < 0.0) throw std::invalid_argument("project_ball: negative radius");
  if (eps == 0.0) {
    out = b;
    return;
  }
  const double dist = (u - b).norm();
  if (dist <= eps) {
    out = u;
    return;
  }
  out = b + (eps / dist) * (u - b);
}

Vector project_ball(const Vector& u, const Vector& b, double eps) {
  Vector out;
  project_ball(u, b, eps, out);
  return out;
}

}  // namespace tau2
