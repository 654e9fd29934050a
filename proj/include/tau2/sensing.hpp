#pragma once

#include "tau2/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tau2 {

enum class MatrixFamily { OversampledDCT, CorrelatedGaussian, RankDeficientDCT };
enum class AugmentMode { Copy, Combine };

struct MatrixSpec {
  MatrixFamily family = MatrixFamily::OversampledDCT;
  std::size_t m = 64;
  std::size_t n = 1024;
  double coherence = 1.0;    // E, DCT families only
  double correlation = 0.0;  // r, Gaussian only
  std::size_t extra_rows = 0;
  AugmentMode mode = AugmentMode::Copy;
  std::uint64_t seed = 0;
};

enum class MagnitudeModel { DynamicRange, UnitGaussian };

struct SignalSpec {
  std::size_t n = 1024;
  std::size_t s = 1;
  MagnitudeModel magnitude = MagnitudeModel::DynamicRange;
  double dynamic_range = 3.0;  // D, used by DynamicRange
  std::size_t min_separation = 1;
  std::uint64_t seed = 0;
};

struct NoiseSpec {
  double sigma = 0.0;
  double eps_factor = 1.0;
};

struct Measurements {
  Vector b;
  double eps = 0.0;
};

/// Column j (1-based) is cos(2 pi j w / E) / sqrt(m), with w ~ U[0,1]^m
/// drawn once per (spec, seed).
Matrix gen_dct_matrix(const MatrixSpec& spec);

/// Rows i.i.d. N(0, Sigma), Sigma_ii = 1, Sigma_ij = r, sampled as
/// sqrt(r) g 1 + sqrt(1 - r) z. Requires r in [0, 1).
Matrix gen_gaussian_matrix(const MatrixSpec& spec);

/// spec.m x n oversampled DCT plus spec.extra_rows rows that are copies of
/// (Copy) or Gaussian combinations of (Combine) randomly selected base rows.
Matrix gen_rank_deficient(const MatrixSpec& spec);

/// Dispatches on spec.family.
Matrix gen_matrix(const MatrixSpec& spec);

/// Support of size s with all pairwise index gaps >= min_separation, drawn
/// uniformly over the valid placements. Magnitudes are sign * 10^(D u) with
/// u ~ U[0,1] for DynamicRange, or N(0,1) for UnitGaussian.
Vector gen_signal(const SignalSpec& spec);

/// Sorted support indices of a valid placement (exposed for tests).
std::vector<std::size_t> sample_support(const SignalSpec& spec);

/// b = A x + sigma xi, xi ~ N(0, I); eps = eps_factor * ||sigma xi||.
Measurements synthesize_measurements(const Matrix& a, const Vector& x, const NoiseSpec& noise,
                                     std::uint64_t seed);

/// Largest over smallest nonzero magnitude.
double dynamic_range_of(const Vector& x);

/// max_{i != j} |<a_i, a_j>| / (||a_i|| ||a_j||) over the columns.
double mutual_coherence(const Matrix& a);

std::string to_string(MatrixFamily family);
MatrixFamily parse_matrix_family(const std::string& name);
std::string to_string(AugmentMode mode);
AugmentMode parse_augment_mode(const std::string& name);

}  // namespace tau2
