#include "doctest.h"
#include "oracles.hpp"

#include "tau2/csv.hpp"
#include "tau2/harness.hpp"
#include "tau2/reform.hpp"
#include "tau2/rng.hpp"
#include "tau2/solver.hpp"

#include <random>

using namespace tau2;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Matrix gaussian(Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  CounterRng rng(seed, Stream::Matrix);
  std::normal_distribution<double> normal;
  Matrix a(m, n);
  for (auto& v : a.reshaped()) v = normal(rng) / std::sqrt(static_cast<double>(m));
  return a;
}

RecoveryProblem sparse_instance(Eigen::Index m, Eigen::Index n, std::uint64_t seed, double sigma) {
  RecoveryProblem p;
  p.a = gaussian(m, n, seed);
  SignalSpec s;
  s.n = static_cast<std::size_t>(n);
  s.s = 3;
  s.magnitude = MagnitudeModel::UnitGaussian;
  s.seed = seed;
  const Measurements meas = synthesize_measurements(p.a, gen_signal(s), {sigma, 1.2}, seed);
  p.b = meas.b;
  p.eps = meas.eps;
  return p;
}

double l1_sq_objective(const Vector& x, double alpha, const Vector& c) {
  const double l1 = x.lpNorm<1>();
  return l1 * l1 - 2.0 * alpha * c.dot(x);
}

SolverConfig gaussian_config() { return default_solver_config(MatrixFamily::CorrelatedGaussian, false); }

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("subproblem: identity constraint pins the answer") {
  const RecoveryProblem p{Matrix::Identity(2, 2), vec({1, 0}), 0.0};
  const SubproblemResult r = adlpmm_subproblem(p, 0.0, Vector::Zero(2), gaussian_config());
  CHECK((r.x - vec({1, 0})).norm() < 1e-7);
  CHECK_FALSE(r.hit_max_iter);
}

TEST_CASE("subproblem: a ball containing the origin gives zero") {
  const RecoveryProblem p{gaussian(4, 6, 1), vec({0.3, -0.2, 0.1, 0.4}), 1.0};
  const SubproblemResult r = adlpmm_subproblem(p, 0.0, Vector::Zero(6), gaussian_config());
  CHECK(r.x.norm() < 1e-7);
}

TEST_CASE("subproblem matches the exported convex QP solved by an independent method") {
  for (std::uint64_t seed : {1, 2, 3}) {
    RecoveryProblem p{gaussian(8, 32, seed), Vector(), 0.0};
    CounterRng rng(seed, Stream::Sampler);
    std::normal_distribution<double> normal;
    Vector xt = Vector::Zero(32);
    for (int k = 0; k < 4; ++k) xt[static_cast<Eigen::Index>(rng() % 32)] = normal(rng);
    p.b = p.a * xt;
    Vector c(32);
    for (auto& v : c) v = normal(rng);
    const double alpha = 1.5;

    SolverConfig cfg = gaussian_config();
    cfg.inner_tol = 1e-10;
    cfg.inner_max_iter = 200000;
    const SubproblemResult r = adlpmm_subproblem(p, alpha, c, cfg);

    const QpExport qp = export_qp(p, alpha, QpMode::LinearizedConvex, c);
    const oracle::QpSolution ref = oracle::solve_qp(qp.quad.dense(), qp.linear, qp.c_matrix, qp.rhs);
    CHECK(ref.residual < 1e-8);
    CHECK(std::abs(qp.objective(ref.v) - ref.objective) < 1e-9 * std::max(1.0, std::abs(ref.objective)));
    CHECK((p.a * r.x - p.b).norm() < 1e-6);
    const double gap = l1_sq_objective(r.x, alpha, c) - ref.objective;
    INFO("seed " << seed << " solver " << l1_sq_objective(r.x, alpha, c) << " oracle " << ref.objective);
    CHECK(std::abs(gap) < 1e-4);
  }
}

TEST_CASE("subproblem reports exhausted iterations") {
  const RecoveryProblem p = sparse_instance(16, 64, 4, 0.0);
  SolverConfig cfg = gaussian_config();
  cfg.inner_max_iter = 3;
  const SubproblemResult r = adlpmm_subproblem(p, 1.0, Vector::Ones(64), cfg);
  CHECK(r.hit_max_iter);
  CHECK(r.inner_iters == 3);
}

TEST_CASE("l1 initializer") {
  const Vector b = vec({1.5, -2, 0, 3});
  CHECK((l1_initializer({Matrix::Identity(4, 4), b, 0.0}) - b).norm() < 1e-6);

  Matrix row(1, 2);
  row << 1, 1;
  const Vector x = l1_initializer({row, vec({2}), 0.0});
  CHECK(std::abs(x.sum() - 2.0) < 1e-8);
  CHECK(x.lpNorm<1>() <= 2.0 + 1e-6);
}

TEST_CASE("l1 initializer matches an independent linear-programming solve") {
  for (std::uint64_t seed : {11, 12}) {
    const RecoveryProblem p = sparse_instance(16, 64, seed, 0.0);
    const Vector x = l1_initializer(p, 1e-10, 200000);
    Matrix c(16, 128);
    c << p.a, -p.a;
    const oracle::QpSolution ref =
        oracle::solve_qp(Matrix::Zero(128, 128), Vector::Ones(128), c, p.b);
    CHECK(ref.residual < 1e-8);
    CHECK((p.a * x - p.b).norm() < 1e-8);
    INFO("solver " << x.lpNorm<1>() << " oracle " << ref.objective);
    CHECK(std::abs(x.lpNorm<1>() - ref.objective) < 1e-4);
  }
}

TEST_CASE("noisy initial point") {
  const RecoveryProblem p = sparse_instance(16, 64, 21, 0.05);
  REQUIRE(p.eps > 0.0);
  const Vector pinv = least_norm_solution(p.a, p.b);

  // Already feasible: unchanged.
  CHECK((noisy_initial_point(p, pinv) - pinv).norm() == 0.0);

  CounterRng rng(3, Stream::Sampler);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 20; ++t) {
    Vector x(64);
    for (auto& v : x) v = normal(rng);
    const Vector y = noisy_initial_point(p, x);
    CHECK(p.residual(y) <= p.eps + 1e-8);
    if (p.residual(x) <= p.eps) CHECK((y - x).norm() == 0.0);
  }
}

TEST_CASE("outer loop: a unique feasible point is found in one step") {
  const Matrix a = (Matrix(3, 3) << 2, 1, 0, 0, 1, 0, 1, 0, 3).finished();
  const Vector b = vec({1, 2, 3});
  const Vector expected = a.fullPivLu().solve(b);
  const SolverResult r = dinkelbach_solve({a, b, 0.0}, expected + vec({0, 0, 0}), gaussian_config());
  CHECK(r.status == SolverStatus::Converged);
  CHECK(r.outer_iters == 1);
  CHECK((r.x - expected).norm() < 1e-7);
}

TEST_CASE("outer loop reaches the optimal ratio on the kernel-dimension-one example") {
  const RecoveryProblem p = worked_example(1);
  const Vector x0 = csv::read_vector(std::filesystem::path(TAU2_FIXTURES) / "example1" / "x0.csv");
  REQUIRE(p.feasible(x0));
  const SolverResult r = dinkelbach_solve(p, x0, default_solver_config(MatrixFamily::OversampledDCT, false));
  CHECK(r.status == SolverStatus::Converged);
  CHECK(std::abs(tau2::tau2(r.x) - 1521.0 / 581.0) < 1e-4);
  CHECK(r.feasibility_residual < 1e-6);
}

TEST_CASE("outer loop invariants on random instances") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const RecoveryProblem p = sparse_instance(16, 64, seed, seed % 2 ? 0.01 : 0.0);
    const SolverResult r = recover(p, gaussian_config());
    CHECK(r.status != SolverStatus::Degenerate);
    CHECK(p.residual(r.x) <= p.eps + 1e-6 * std::max(1.0, p.b.norm()));
    for (std::size_t k = 1; k < r.alpha_trace.size(); ++k) CHECK(r.alpha_trace[k] <= r.alpha_trace[k - 1]);
    for (std::size_t k = 1; k < r.dinkelbach_trace.size(); ++k) CHECK(r.dinkelbach_trace[k] <= 1e-6);
    const std::size_t accepted = r.outer_iters - r.rejected_steps;
    CHECK(r.rejected_steps <= 1);
    CHECK(r.dinkelbach_trace.size() == accepted);
    CHECK(r.step_trace.size() == accepted);
    CHECK(r.alpha_trace.size() == accepted + 1);
    CHECK(r.iterate_norm_trace.size() == accepted + 1);
    const double t = tau2::tau2(r.x);
    CHECK(t >= 1.0);
    CHECK(t <= 64.0);
    CHECK(r.alpha_trace.back() == doctest::Approx(t).epsilon(1e-12));

    const SolverResult again = recover(p, gaussian_config());
    CHECK((again.x.array() == r.x.array()).all());
    CHECK(again.alpha_trace == r.alpha_trace);
    CHECK(again.dinkelbach_trace == r.dinkelbach_trace);
    CHECK(again.inner_iters_total == r.inner_iters_total);
  }
}

TEST_CASE("outer loop stops at its iteration cap") {
  const RecoveryProblem p = worked_example(1);
  const Vector x0 = csv::read_vector(std::filesystem::path(TAU2_FIXTURES) / "example1" / "x0.csv");
  SolverConfig cfg = default_solver_config(MatrixFamily::OversampledDCT, false);
  cfg.outer_max_iter = 1;
  const SolverResult r = dinkelbach_solve(p, x0, cfg);
  CHECK(r.outer_iters == 1);
  CHECK(r.status == SolverStatus::MaxIter);
  CHECK(p.feasible(r.x));
}

TEST_CASE("input validation") {
  const RecoveryProblem p = worked_example(1);
  CHECK_THROWS_AS(dinkelbach_solve(p, Vector::Zero(6), gaussian_config()), std::invalid_argument);
  CHECK_THROWS_AS(dinkelbach_solve(p, Vector::Ones(6), gaussian_config()), std::invalid_argument);

  RecoveryProblem zero_b = p;
  zero_b.b.setZero();
  CHECK_THROWS(zero_b.validate());
  RecoveryProblem outside{Matrix::Ones(2, 3), vec({1, 2}), 0.0};
  CHECK_THROWS(outside.validate());
  outside.eps = 1.0;
  CHECK_NOTHROW(outside.validate());
  RecoveryProblem neg = p;
  neg.eps = -1.0;
  CHECK_THROWS(neg.validate());

  SolverConfig cfg;
  cfg.beta = cfg.rho / 2;
  CHECK_THROWS(cfg.validate());
  cfg = SolverConfig{};
  cfg.eta_factor = 0.5;
  CHECK_THROWS(cfg.validate());
  cfg = SolverConfig{};
  cfg.rho = 0.0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("noiseless recovery on the coherent cosine ensemble") {
  ExperimentSpec spec;
  spec.matrix.family = MatrixFamily::OversampledDCT;
  spec.matrix.m = 64;
  spec.matrix.n = 1024;
  spec.matrix.coherence = 1.0;
  spec.s_values = {5};
  spec.dynamic_range = 3.0;
  spec.solver = default_solver_config(MatrixFamily::OversampledDCT, false);
  spec.trials = 20;
  spec.base_seed = 500;
  spec.workers = 1;
  const ExperimentResult res = run_experiment(spec);
  std::size_t ok = 0;
  for (const auto& rec : res.records) ok += rec.success;
  CHECK(ok >= 16);
}

}  // TEST_SUITE
