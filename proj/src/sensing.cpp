#include "tau2/sensing.hpp"

#include "tau2/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace tau2 {

Matrix gen_dct_matrix(const MatrixSpec& spec) {
  if (spec.m == 0 || spec.n == 0) throw std::invalid_argument("gen_dct_matrix: empty shape");
  if (!(spec.coherence >= 1.0)) throw std::invalid_argument("gen_dct_matrix: E must be >= 1");
  CounterRng rng(spec.seed, Stream::Matrix);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector w(spec.m);
  for (auto& wi : w) wi = uniform(rng);

  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.m));
  const double omega = 2.0 * std::numbers::pi / spec.coherence;
  Matrix a(spec.m, spec.n);
  for (std::size_t j = 0; j < spec.n; ++j) {
    const double freq = omega * static_cast<double>(j + 1);
    for (std::size_t i = 0; i < spec.m; ++i) a(i, j) = scale * std::cos(freq * w[i]);
  }
  return a;
}

Matrix gen_gaussian_matrix(const MatrixSpec& spec) {
  if (spec.m == 0 || spec.n == 0) throw std::invalid_argument("gen_gaussian_matrix: empty shape");
  const double r = spec.correlation;
  if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("gen_gaussian_matrix: r must lie in [0, 1)");
  CounterRng rng(spec.seed, Stream::Matrix);
  std::normal_distribution<double> normal;
  const double shared = std::sqrt(r);
  const double own = std::sqrt(1.0 - r);
  Matrix a(spec.m, spec.n);
  for (std::size_t i = 0; i < spec.m; ++i) {
    const double g = normal(rng);
    for (std::size_t j = 0; j < spec.n; ++j) a(i, j) = shared * g + own * normal(rng);
  }
  return a;
}

Matrix gen_rank_deficient(const MatrixSpec& spec) {
  MatrixSpec base_spec = spec;
  base_spec.family = MatrixFamily::OversampledDCT;
  const Matrix base = gen_dct_matrix(base_spec);
  if (spec.extra_rows == 0) return base;

  CounterRng rng(spec.seed, Stream::Augment);
  std::vector<std::size_t> rows(spec.m);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::vector<std::size_t> picked;
  if (spec.extra_rows <= spec.m) {
    std::shuffle(rows.begin(), rows.end(), rng);
    picked.assign(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(spec.extra_rows));
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, spec.m - 1);
    for (std::size_t k = 0; k < spec.extra_rows; ++k) picked.push_back(pick(rng));
  }

  Matrix a(spec.m + spec.extra_rows, spec.n);
  a.topRows(spec.m) = base;
  std::normal_distribution<double> normal;
  for (std::size_t k = 0; k < spec.extra_rows; ++k) {
    auto row = a.row(spec.m + k);
    if (spec.mode == AugmentMode::Copy) {
      row = base.row(picked[k]);
    } else {
      row.setZero();
      for (const std::size_t src : picked) row += normal(rng) * base.row(src);
    }
  }
  return a;
}

Matrix gen_matrix(const MatrixSpec& spec) {
  switch (spec.family) {
    case MatrixFamily::OversampledDCT:
      return gen_dct_matrix(spec);
    case MatrixFamily::CorrelatedGaussian:
      return gen_gaussian_matrix(spec);
    case MatrixFamily::RankDeficientDCT:
      return gen_rank_deficient(spec);
  }
  throw std::invalid_argument("gen_matrix: unknown family");
}

std::vector<std::size_t> sample_support(const SignalSpec& spec) {
  if (spec.s == 0) throw std::invalid_argument("gen_signal: s must be >= 1");
  const std::size_t sep = std::max<std::size_t>(spec.min_separation, 1);
  const std::size_t reserved = (spec.s - 1) * (sep - 1);
  if (spec.s > spec.n || reserved + spec.s > spec.n) {
    throw std::invalid_argument("gen_signal: cannot place " + std::to_string(spec.s) +
                                " spikes with separation " + std::to_string(sep) + " in length " +
                                std::to_string(spec.n));
  }
  // Valid placements are in bijection with s-subsets of n - (s-1)(sep-1)
  // slots: the k-th chosen slot is shifted right by k (sep - 1).
  const std::size_t slots = spec.n - reserved;
  CounterRng rng(spec.seed, Stream::Signal);
  std::vector<std::size_t> all(slots);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> chosen;
  chosen.reserve(spec.s);
  std::sample(all.begin(), all.end(), std::back_inserter(chosen), spec.s, rng);
  std::sort(chosen.begin(), chosen.end());
  for (std::size_t k = 0; k < chosen.size(); ++k) chosen[k] += k * (sep - 1);
  return chosen;
}

Vector gen_signal(const SignalSpec& spec) {
  const auto support = sample_support(spec);
  // Magnitudes use their own sub-stream so they do not depend on how many
  // draws the placement consumed.
  CounterRng rng = CounterRng(spec.seed, Stream::Signal).split(1);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Vector x = Vector::Zero(spec.n);
  for (const std::size_t idx : support) {
    double value = 0.0;
    if (spec.magnitude == MagnitudeModel::DynamicRange) {
      const double sign = normal(rng) < 0.0 ? -1.0 : 1.0;
      value = sign * std::pow(10.0, spec.dynamic_range * uniform(rng));
    } else {
      do {
        value = normal(rng);
      } while (value == 0.0);
    }
    x[idx] = value;
  }
  return x;
}

Measurements synthesize_measurements(const Matrix& a, const Vector& x, const NoiseSpec& noise,
                                     std::uint64_t seed) {
  if (a.cols() != x.size()) throw std::invalid_argument("synthesize_measurements: dimension mismatch");
  if (noise.sigma < 0.0) throw std::invalid_argument("synthesize_measurements: sigma must be >= 0");
  Measurements out;
  out.b = a * x;
  if (noise.sigma == 0.0) return out;
  CounterRng rng(seed, Stream::Noise);
  std::normal_distribution<double> normal;
  Vector e(a.rows());
  for (auto& ei : e) ei = noise.sigma * normal(rng);
  out.b += e;
  out.eps = noise.eps_factor * e.norm();
  return out;
}

double dynamic_range_of(const Vector& x) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const double v : x) {
    if (v == 0.0) continue;
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  if (hi == 0.0) throw DomainError("dynamic_range_of: zero vector");
  return hi / lo;
}

double mutual_coherence(const Matrix& a) {
  const Vector norms = a.colwise().norm();
  const Matrix gram = a.transpose() * a;
  double best = 0.0;
  for (Eigen::Index j = 0; j < gram.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const double d = norms[i] * norms[j];
      if (d > 0.0) best = std::max(best, std::abs(gram(i, j)) / d);
    }
  }
  return best;
}

std::string to_string(MatrixFamily family) {
  switch (family) {
    case MatrixFamily::OversampledDCT:
      return "dct";
    case MatrixFamily::CorrelatedGaussian:
      return "gaussian";
    case MatrixFamily::RankDeficientDCT:
      return "rank-deficient";
  }
  return "unknown";
}

MatrixFamily parse_matrix_family(const std::string& name) {
  if (name == "dct") return MatrixFamily::OversampledDCT;
  if (name == "gaussian") return MatrixFamily::CorrelatedGaussian;
  if (name == "rank-deficient") return MatrixFamily::RankDeficientDCT;
  throw std::invalid_argument("unknown matrix family '" + name + "'");
}

std::string to_string(AugmentMode mode) { return mode == AugmentMode::Copy ? "copy" : "combine"; }

AugmentMode parse_augment_mode(const std::string& name) {
  if (name == "copy") return AugmentMode::Copy;
  if (name == "combine") return AugmentMode::Combine;
  throw std::invalid_argument("unknown augmentation mode '" + name + "'");
}

}  // namespace tau2
