#include "doctest.h"
#include "oracles.hpp"

#include "tau2/core.hpp"
#include "tau2/csv.hpp"
#include "tau2/harness.hpp"
#include "tau2/reform.hpp"
#include "tau2/rng.hpp"

#include <random>
#include <sstream>

using namespace tau2;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Vector random_vector(CounterRng& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Vector x(n);
  for (auto& v : x) v = normal(rng);
  return x;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("norms on small vectors") {
  CHECK(norm_l1(vec({1, -2, 3})) == 6.0);
  CHECK(norm_l1(vec({0, 0})) == 0.0);
  CHECK(norm_l1(vec({-5})) == 5.0);
  CHECK(norm_l2(vec({3, 4})) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(norm_l2(vec({0})) == 0.0);
  CHECK(norm_l2(vec({1, 1, 1, 1})) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("effective sparsity values") {
  for (Eigen::Index n : {1, 3, 17}) {
    CHECK(tau_q(Vector::Unit(n, 0), 2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(tau_q(Vector::Ones(n), 2.0) == doctest::Approx(static_cast<double>(n)).epsilon(1e-14));
  }
  CHECK(tau_q(vec({3, 4}), 2.0) == doctest::Approx(1.96).epsilon(1e-14));
  CHECK(tau2::tau2(vec({3, 4})) == doctest::Approx(49.0 / 25.0).epsilon(1e-14));
  // q = 3 on [1, 1]: (2^(1/3) / 2)^(-3/2) = 2.
  CHECK(tau_q(vec({1, 1}), 3.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(tau_q(vec({1, 1}), 0.5) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("effective sparsity rejects zero vectors and limit orders") {
  CHECK_THROWS_AS(tau_q(Vector::Zero(3), 2.0), DomainError);
  CHECK_THROWS_AS(tau2::tau2(Vector::Zero(2)), DomainError);
  CHECK_THROWS_AS(tau_q(vec({1, 2}), 1.0), DomainError);
  CHECK_THROWS_AS(tau_q(vec({1, 2}), 0.0), DomainError);
  CHECK_THROWS_AS(tau_q(vec({1, 2}), std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("phi map") {
  CHECK((phi_map(Vector::Unit(4, 2)) - Vector::Unit(4, 2)).norm() < 1e-15);
  CHECK((phi_map(vec({1, 1})) - vec({2, 2})).norm() < 1e-14);
  CHECK((phi_map(vec({3, 4})) - vec({5.88, 7.84})).norm() < 1e-13);
  CHECK_THROWS_AS(phi_map(Vector::Zero(2)), DomainError);
}

TEST_CASE("dinkelbach value") {
  CHECK(dinkelbach_value(vec({1, 1}), 2.0) == doctest::Approx(0.0));
  CHECK(dinkelbach_value(Vector::Unit(3, 0), 1.0) == doctest::Approx(0.0));
  CHECK(dinkelbach_value(vec({3, 4}), 1.0) == doctest::Approx(24.0).epsilon(1e-14));
}

TEST_CASE("sparsity measures: bounds, scale invariance, dinkelbach root") {
  CounterRng rng(11, Stream::Sampler);
  std::uniform_real_distribution<double> scale(-50.0, 50.0);
  for (int t = 0; t < 500; ++t) {
    const Eigen::Index n = 1 + t % 40;
    Vector x = random_vector(rng, n);
    if (t % 3 == 0) x.head(n / 2).setZero();
    if (x.isZero()) continue;
    const double tx = tau2::tau2(x);
    CHECK(tx >= 1.0 - 1e-12);
    CHECK(tx <= static_cast<double>(n) + 1e-12);
    double c = scale(rng);
    if (c == 0.0) c = 1.0;
    CHECK(std::abs(tau2::tau2(c * x) - tx) <= 1e-12 * tx);
    CHECK(std::abs(dinkelbach_value(x, tx)) <= 1e-10 * x.lpNorm<1>() * x.lpNorm<1>());
  }
}

TEST_CASE("phi map is 5n-Lipschitz on sampled pairs") {
  CounterRng rng(5, Stream::Sampler);
  for (Eigen::Index n : {2, 10, 100}) {
    for (int t = 0; t < 300; ++t) {
      const Vector x = random_vector(rng, n);
      const Vector y = x + (t % 2 ? 1e-4 : 1.0) * random_vector(rng, n);
      CHECK((phi_map(x) - phi_map(y)).norm() <= 5.0 * static_cast<double>(n) * (x - y).norm());
    }
  }
}

TEST_CASE("sparsity report") {
  const SparsityReport r = sparsity_report(vec({0, 3, -4, 1e-12}), 1e-9);
  CHECK(r.l0 == 2);
  CHECK(r.l1 == doctest::Approx(7.0));
  CHECK(r.l2 == doctest::Approx(5.0));
  CHECK(r.l1_over_l2 == doctest::Approx(1.4));
  CHECK(r.tau2 == doctest::Approx(1.96));
  const SparsityReport z = sparsity_report(Vector::Zero(3));
  CHECK(z.l0 == 0);
  CHECK(z.tau2 == 0.0);
}

TEST_CASE("largest Gram eigenvalue") {
  CHECK(lambda_max_gram(Matrix::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(lambda_max_gram(vec({1, 2, 3}).asDiagonal().toDenseMatrix()) == doctest::Approx(9.0).epsilon(1e-9));
  CounterRng rng(8, Stream::Matrix);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 5; ++t) {
    Matrix a(8, 16);
    for (auto& v : a.reshaped()) v = normal(rng);
    const double expected = oracle::jacobi_eigenvalues(a.transpose() * a).maxCoeff();
    const double got = lambda_max_gram(a, 1e-13, 100000);
    CHECK(std::abs(got - expected) <= 1e-8 * expected);
  }
}

TEST_CASE("largest Gram eigenvalue reports the estimate when out of iterations") {
  CounterRng rng(9, Stream::Matrix);
  std::normal_distribution<double> normal;
  Matrix a(20, 20);
  for (auto& v : a.reshaped()) v = normal(rng);
  try {
    lambda_max_gram(a, 1e-15, 2);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.estimate() > 0.0);
    CHECK(e.estimate() <= oracle::jacobi_eigenvalues(a.transpose() * a).maxCoeff() * (1 + 1e-12));
  }
}

TEST_CASE("least-norm solution") {
  CHECK((least_norm_solution(Matrix::Identity(2, 2), vec({1, 2})) - vec({1, 2})).norm() < 1e-14);
  Matrix row(1, 2);
  row << 1, 1;
  CHECK((least_norm_solution(row, vec({2})) - vec({1, 1})).norm() < 1e-14);

  const RecoveryProblem e1 = worked_example(1);
  const Vector x = least_norm_solution(e1.a, e1.b);
  CHECK((e1.a * x - e1.b).norm() <= 1e-10);
  Vector v(6);
  v << 1, 1, 1, -2, -4, 2;
  CHECK(std::abs(x.dot(v)) <= 1e-9 * v.norm());
}

TEST_CASE("least-norm solution is orthogonal to the kernel on rank-deficient matrices") {
  CounterRng rng(21, Stream::Matrix);
  std::normal_distribution<double> normal;
  for (int t = 0; t < 20; ++t) {
    Matrix base(6, 15);
    for (auto& v : base.reshaped()) v = normal(rng);
    Matrix a(9, 15);
    a << base, base.topRows(2), base.row(3) - 2.0 * base.row(5);
    Vector xt(15);
    for (auto& v : xt) v = normal(rng);
    const Vector b = a * xt;
    const Vector x = least_norm_solution(a, b);
    CHECK(numerical_rank(a) == 6);
    CHECK((a * x - b).norm() <= 1e-9 * b.norm());
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const Matrix kernel = svd.matrixV().rightCols(15 - 6);
    CHECK((kernel.transpose() * x).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, x.norm()));
  }
}

TEST_CASE("sign split") {
  const Vector v = split_signs(vec({1.5, -2, 0}));
  CHECK((v - vec({1.5, 0, 0, 0, 2, 0})).norm() == 0.0);
}

TEST_CASE("csv round trip keeps every bit") {
  CounterRng rng(2, Stream::Sampler);
  std::uniform_int_distribution<int> t_exp(-40, 40);
  Matrix m(4, 3);
  for (auto& v : m.reshaped()) v = std::ldexp(std::normal_distribution<double>()(rng), t_exp(rng));
  std::stringstream ss;
  csv::write_matrix(ss, m);
  const Matrix back = csv::read_matrix(ss);
  CHECK(back.rows() == 4);
  CHECK(back.cols() == 3);
  CHECK((back.array() == m.array()).all());

  std::stringstream vs;
  csv::write_vector(vs, m.col(1));
  CHECK((csv::read_vector(vs).array() == m.col(1).array()).all());
  std::stringstream row("1, 2.5 ,-3e2\n");
  CHECK((csv::read_vector(row) - vec({1, 2.5, -300})).norm() == 0.0);
}

TEST_CASE("csv rejects malformed input") {
  std::stringstream bad("1,abc\n");
  CHECK_THROWS_AS(csv::read_matrix(bad), csv::ParseError);
  std::stringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(csv::read_matrix(ragged), csv::ParseError);
  std::stringstream nan("1,nan\n");
  CHECK_THROWS_AS(csv::read_matrix(nan), csv::ParseError);
  std::stringstream empty("");
  CHECK_THROWS_AS(csv::read_matrix(empty), csv::ParseError);
  CHECK_THROWS(csv::read_matrix(std::filesystem::path("/nonexistent/file.csv")));
  CHECK(csv::parse_real(" 0.25 ") == 0.25);
  CHECK_THROWS_AS(csv::parse_real("1.0x"), csv::ParseError);
}

TEST_CASE("counter generator is a pure function of seed, stream and counter") {
  CounterRng a(42, Stream::Signal), b(42, Stream::Signal), c(42, Stream::Noise), d(43, Stream::Signal);
  bool differs_stream = false, differs_seed = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a(), vb = b(), vc = c(), vd = d();
    CHECK(va == vb);
    differs_stream |= va != vc;
    differs_seed |= va != vd;
  }
  CHECK(differs_stream);
  CHECK(differs_seed);
  CHECK(a.counter() == 100);
}

}  // TEST_SUITE
