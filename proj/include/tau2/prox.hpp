#pragma once

#include "tau2/core.hpp"

#include <vector>

namespace tau2 {

/// Scratch space for prox_sq_l1. Holds the magnitude-sorted input and the
/// signed permutation that maps it back; reused across calls to avoid
/// allocating inside solver loops.
struct ProxWorkspace {
  struct SignedIndex {
    Eigen::Index index;
    double sign;
  };
  Vector sorted_abs;
  std::vector<SignedIndex> permutation;
  std::vector<Eigen::Index> order;
};

/// Proximity operator of beta * ||.||_1^2:
///   argmin_u  beta * ||u||_1^2 + 0.5 * ||u - x||_2^2.
///
/// Sort |x| in decreasing order, grow the active prefix while the next
/// magnitude exceeds 2 * beta * r with r = (sum of active) / (2 k beta + 1),
/// then shrink the active entries by 2 * beta * r. If every entry stays
/// active the loop ends at k = n. prox(0) = 0. Ties in magnitude keep
/// their original index order.
Vector prox_sq_l1(const Vector& x, double beta);
void prox_sq_l1(const Vector& x, double beta, ProxWorkspace& ws, Vector& out);

/// Largest violation of the optimality conditions of u = prox(x): on the
/// support (x_i - u_i) / (2 beta) = ||u||_1 sign(u_i), off it
/// |x_i| <= 2 beta ||u||_1 (u = 0 is optimal only for x = 0).
double prox_sq_l1_kkt_residual(const Vector& x, double beta, const Vector& u);

/// Soft thresholding, the proximity operator of t * ||.||_1.
Vector prox_l1(const Vector& x, double t);
void prox_l1(const Vector& x, double t, Vector& out);

/// Projection onto the closed ball of radius eps around b:
///   b + min(1, eps / ||u - b||) (u - b).
Vector project_ball(const Vector& u, const Vector& b, double eps);
void project_ball(const Vector& u, const Vector& b, double eps, Vector& out);

}  // namespace tau2
