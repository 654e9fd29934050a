#include "tau2/harness.hpp"
#include "tau2/prox.hpp"
#include "tau2/reform.hpp"
#include "tau2/rng.hpp"

#include <array>
#include <cmath>
#include <random>
#include <sstream>

namespace tau2 {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void add(std::vector<VerifyCheck>& out, std::string group, std::string name, bool ok, std::string detail) {
  out.push_back({std::move(group), std::move(name), ok, std::move(detail)});
}

void check_spectrum(const VerifyOptions& opt, std::vector<VerifyCheck>& out) {
  std::vector<std::pair<long, double>> cases;
  if (opt.n || opt.alpha) {
    cases.emplace_back(opt.n.value_or(16), opt.alpha.value_or(1.0));
  } else {
    for (const long n : {2L, 4L, 8L, 16L, 32L}) {
      for (const double a : {0.5, 1.0, 2.0, static_cast<double>(n)}) cases.emplace_back(n, a);
    }
  }
  for (const auto& [n, a] : cases) {
    const SpectrumReport r = verify_H_spectrum(n, a);
    std::string detail = "eig err " + fmt(r.eigen_error) + ", reconstruction err " +
                         fmt(r.reconstruction_error) + " (" + r.reconstruction + ")";
    for (const auto& d : r.deviations) detail += "; " + d;
    add(out, "spectrum", "n=" + std::to_string(n) + " alpha=" + fmt(a), r.passed, detail);
  }
}

void check_examples(std::vector<VerifyCheck>& out) {
  const RecoveryProblem e1 = worked_example(1);
  const RecoveryProblem e2 = worked_example(2);
  const KernelModel k1 = kernel_model(e1.a, e1.b);
  const KernelModel k2 = kernel_model(e2.a, e2.b);

  const double a1 = alpha_star_exact(k1);
  add(out, "examples", "example 1 alpha* = 121/27", std::abs(a1 - 121.0 / 27.0) <= 1e-9, fmt(a1));
  const AlphaBar b1 = alpha_bar_exact(k1);
  add(out, "examples", "example 1 alpha_bar = 1521/581 (attained)",
      std::abs(b1.value - 1521.0 / 581.0) <= 1e-6 && b1.attained, fmt(b1.value));
  const FValue f1 = eval_F_bruteforce(k1, a1);
  add(out, "examples", "example 1 F(alpha*) = -inf", f1.unbounded, f1.unbounded ? "unbounded" : fmt(f1.value));

  const double a2 = alpha_star_exact(k2);
  add(out, "examples", "example 2 alpha* = 2", std::abs(a2 - 2.0) <= 1e-6, fmt(a2));
  const AlphaBar b2 = alpha_bar_exact(k2);
  add(out, "examples", "example 2 alpha_bar = 2 (limit only)",
      std::abs(b2.value - 2.0) <= 1e-4 && !b2.attained, fmt(b2.value));
  const FValue f2 = eval_F_bruteforce(k2, a2);
  add(out, "examples", "example 2 F(alpha*) finite", !f2.unbounded && std::isfinite(f2.value), fmt(f2.value));
}

void check_prox(std::uint64_t seed, std::vector<VerifyCheck>& out) {
  CounterRng rng(seed, Stream::Sampler);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(-3.0, 2.0);
  double worst = 0.0;
  const int count = 200;
  for (int t = 0; t < count; ++t) {
    const Eigen::Index n = std::array<Eigen::Index, 5>{1, 2, 3, 6, 50}[t % 5];
    Vector x(n);
    for (auto& xi : x) xi = normal(rng);
    const double beta = std::pow(10.0, unif(rng));
    const Vector u = prox_sq_l1(x, beta);
    worst = std::max(worst, prox_sq_l1_kkt_residual(x, beta, u) / std::max(1.0, x.cwiseAbs().maxCoeff()));
  }
  add(out, "prox", "optimality certificate on " + std::to_string(count) + " random inputs", worst <= 1e-8,
      "max violation " + fmt(worst));
}

void check_lipschitz(std::uint64_t seed, std::vector<VerifyCheck>& out) {
  CounterRng rng(seed, Stream::Sampler);
  std::normal_distribution<double> normal;
  for (const Eigen::Index n : {2, 10, 100}) {
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      Vector x(n), y(n);
      for (auto& v : x) v = normal(rng);
      // Mix near pairs and far pairs.
      const double scale = t % 2 ? 1e-3 : 1.0;
      for (auto& v : y) v = normal(rng);
      y = x + scale * y;
      const double lhs = (phi_map(x) - phi_map(y)).norm();
      const double rhs = 5.0 * static_cast<double>(n) * (x - y).norm();
      worst = std::max(worst, lhs / rhs);
    }
    add(out, "lipschitz", "n=" + std::to_string(n) + " ratio to 5n bound", worst <= 1.0, "max " + fmt(worst));
  }
}

}  // namespace

std::vector<VerifyCheck> run_verify(const VerifyOptions& options) {
  const std::string& c = options.check;
  if (c != "all" && c != "spectrum" && c != "examples" && c != "prox" && c != "lipschitz") {
    throw std::invalid_argument("unknown check '" + c + "'");
  }
  std::vector<VerifyCheck> out;
  if (c == "all" || c == "spectrum") check_spectrum(options, out);
  if (c == "all" || c == "examples") check_examples(out);
  if (c == "all" || c == "prox") check_prox(options.seed, out);
  if (c == "all" || c == "lipschitz") check_lipschitz(options.seed, out);
  return out;
}

}  // namespace tau2
