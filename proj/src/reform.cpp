#include "tau2/reform.hpp"

#include "tau2/csv.hpp"
#include "tau2/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace tau2 {
namespace {

using Index = Eigen::Index;
constexpr double kInf = std::numeric_limits<double>::infinity();

double golden_min(const std::function<double(double)>& f, double lo, double hi, double& arg) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  arg = fc <= fd ? c : d;
  return std::min(fc, fd);
}

// The set x0 + t u, t in [lo, hi], cut at the points where a coordinate
// changes sign. On each piece ||x||_1 = P + W t exactly.
struct Piece {
  double lo, hi;
  double p, w;
};

std::vector<Piece> pieces(const Vector& x0, const Vector& u, double lo, double hi) {
  std::vector<double> cuts{lo};
  for (Index i = 0; i < u.size(); ++i) {
    if (u[i] == 0.0) continue;
    const double t = -x0[i] / u[i];
    if (t > lo && t < hi) cuts.push_back(t);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Piece> out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    double mid;
    if (std::isinf(a) && std::isinf(b)) {
      mid = 0.0;
    } else if (std::isinf(a)) {
      mid = b - 1.0 - std::abs(b);
    } else if (std::isinf(b)) {
      mid = a + 1.0 + std::abs(a);
    } else {
      mid = 0.5 * (a + b);
    }
    Piece pc{a, b, 0.0, 0.0};
    for (Index i = 0; i < u.size(); ++i) {
      const double xi = x0[i] + mid * u[i];
      const double s = xi > 0.0 ? 1.0 : (xi < 0.0 ? -1.0 : 0.0);
      pc.p += s * x0[i];
      pc.w += s * u[i];
    }
    out.push_back(pc);
  }
  return out;
}

struct LineMin {
  double value = kInf;
  double t = 0.0;
};

// min over |t| <= radius of ||x0 + t u||_1^2 - alpha ||x0 + t u||_2^2.
LineMin line_min_F(const Vector& x0, const Vector& u, double alpha, double radius) {
  const double c1 = x0.dot(u), c2 = u.squaredNorm();
  LineMin best;
  auto consider = [&](double t) {
    const double v = dinkelbach_value(x0 + t * u, alpha);
    if (v < best.value) best = {v, t};
  };
  for (const Piece& pc : pieces(x0, u, -radius, radius)) {
    consider(pc.lo);
    consider(pc.hi);
    const double a2 = pc.w * pc.w - alpha * c2;
    const double a1 = 2.0 * pc.p * pc.w - 2.0 * alpha * c1;
    if (a2 > 0.0) {
      const double t = -a1 / (2.0 * a2);
      if (t > pc.lo && t < pc.hi) consider(t);
    }
  }
  return best;
}

// min over t in R of tau2(x0 + t u), finite t only. The derivative of
// (P + W t)^2 / (c0 + 2 c1 t + c2 t^2) vanishes where (W c0 - P c1) + (W c1 - P c2) t = 0.
LineMin line_min_tau2(const Vector& x0, const Vector& u) {
  const double c0 = x0.squaredNorm(), c1 = x0.dot(u), c2 = u.squaredNorm();
  LineMin best;
  auto consider = [&](double t) {
    if (!std::isfinite(t)) return;
    const Vector x = x0 + t * u;
    if (x.squaredNorm() == 0.0) return;
    const double v = tau2(x);
    if (v < best.value) best = {v, t};
  };
  for (const Piece& pc : pieces(x0, u, -kInf, kInf)) {
    consider(pc.lo);
    consider(pc.hi);
    const double den = pc.w * c1 - pc.p * c2;
    if (den != 0.0) {
      const double t = (pc.p * c1 - pc.w * c0) / den;
      if (t > pc.lo && t < pc.hi) consider(t);
    }
  }
  return best;
}

Vector direction(const KernelModel& model, double theta) {
  return std::cos(theta) * model.basis.col(0) + std::sin(theta) * model.basis.col(1);
}

// Angles in [0, pi) where some coordinate of cos(t) v1 + sin(t) v2 vanishes.
std::vector<double> kink_angles(const KernelModel& model) {
  std::vector<double> out;
  const auto v1 = model.basis.col(0);
  const auto v2 = model.basis.col(1);
  for (Index i = 0; i < v1.size(); ++i) {
    if (v1[i] == 0.0 && v2[i] == 0.0) continue;
    double t = std::atan2(-v1[i], v2[i]);
    if (t < 0.0) t += std::numbers::pi;
    if (t >= std::numbers::pi) t -= std::numbers::pi;
    out.push_back(t);
  }
  return out;
}

// Scan theta in [0, pi) on a grid, refine around the best cell, and also
// evaluate any extra candidate angles.
double minimize_angle(const std::function<double(double)>& f, std::size_t grid_points,
                      const std::vector<double>& extra, double& arg) {
  const std::size_t k = std::max<std::size_t>(grid_points, 8);
  const double h = std::numbers::pi / static_cast<double>(k);
  double best = kInf;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double v = f(h * static_cast<double>(i));
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  arg = h * static_cast<double>(best_i);
  double t_ref = arg;
  const double v_ref = golden_min(f, arg - h, arg + h, t_ref);
  if (v_ref < best) {
    best = v_ref;
    arg = t_ref;
  }
  for (const double t : extra) {
    const double v = f(t);
    if (v < best) {
      best = v;
      arg = t;
    }
  }
  return best;
}

void require_small_kernel(const KernelModel& model, const char* what) {
  if (model.dim() == 0) throw DomainError(std::string(what) + ": kernel is trivial");
  if (model.dim() > 2) throw DomainError(std::string(what) + ": kernel dimension > 2");
}

// Constant term of ||x0 + t u||_1 = |t| ||u||_1 + q for large t > 0.
double asymptotic_offset(const Vector& x0, const Vector& u) {
  const double cut = 1e-12 * u.cwiseAbs().maxCoeff();
  double q = 0.0;
  for (Index i = 0; i < u.size(); ++i) {
    if (std::abs(u[i]) > cut) {
      q += u[i] > 0.0 ? x0[i] : -x0[i];
    } else {
      q += std::abs(x0[i]);
    }
  }
  return q;
}

nlohmann::json real(double v) { return csv::format_real(v == 0.0 ? 0.0 : v); }

nlohmann::json reals(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const double x : v) out.push_back(real(x));
  return out;
}

nlohmann::json rows(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(reals(m.row(i).transpose()));
  return out;
}

double read_real(const nlohmann::json& j) {
  if (j.is_string()) return csv::parse_real(j.get<std::string>());
  if (j.is_number()) return j.get<double>();
  throw std::invalid_argument("tau2-qp/1: expected a real");
}

Vector read_reals(const nlohmann::json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = read_real(j[i]);
  return v;
}

Matrix read_rows(const nlohmann::json& j, Index cols) {
  Matrix m(static_cast<Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vector r = read_reals(j[i]);
    if (r.size() != cols) throw std::invalid_argument("tau2-qp/1: ragged matrix");
    m.row(static_cast<Index>(i)) = r.transpose();
  }
  return m;
}

}  // namespace

Vector QuadForm::apply(const Vector& v) const {
  if (v.size() != 2 * n) throw std::invalid_argument("QuadForm::apply: wrong length");
  const auto p = v.head(n);
  const auto m = v.tail(n);
  const double s = v.sum();
  Vector out(2 * n);
  out.head(n) = Vector::Constant(n, s) - alpha * p + alpha * m;
  out.tail(n) = Vector::Constant(n, s) + alpha * p - alpha * m;
  return out;
}

Matrix QuadForm::dense() const {
  Matrix h = Matrix::Ones(2 * n, 2 * n);
  h.topLeftCorner(n, n).diagonal().array() -= alpha;
  h.bottomRightCorner(n, n).diagonal().array() -= alpha;
  h.topRightCorner(n, n).diagonal().array() += alpha;
  h.bottomLeftCorner(n, n).diagonal().array() += alpha;
  return h;
}

QuadForm build_H(Index n, double alpha) {
  if (n < 1) throw std::invalid_argument("build_H: n must be >= 1");
  return QuadForm{n, alpha};
}

Matrix dct2_matrix(Index n) {
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i) {
    const double scale = std::sqrt((i == 0 ? 1.0 : 2.0) / static_cast<double>(n));
    for (Index j = 0; j < n; ++j) {
      d(i, j) = scale * std::cos(static_cast<double>(i * (2 * j + 1)) * std::numbers::pi /
                                 (2.0 * static_cast<double>(n)));
    }
  }
  return d;
}

Matrix mixing_matrix(Index n) {
  const double h = std::sqrt(2.0) / 2.0;
  Matrix e = Matrix::Zero(2 * n, 2 * n);
  e(0, 0) = h;
  e(0, n) = h;
  e(n, 0) = h;
  e(n, n) = -h;
  for (Index k = 1; k < n; ++k) {
    e(k, k) = h;
    e(k, n + k) = h;
    e(n + k, k) = -h;
    e(n + k, n + k) = h;
  }
  return e;
}

SpectrumReport verify_H_spectrum(Index n, double alpha, double tol) {
  if (n < 2) throw std::invalid_argument("verify_H_spectrum: n must be >= 2");
  SpectrumReport rep;
  rep.n = n;
  rep.alpha = alpha;
  const Matrix h = build_H(n, alpha).dense();
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  rep.eigenvalues = es.eigenvalues();

  // Stated order: 2n, -2 alpha (n times), 0 (n-1 times).
  Vector stated(2 * n);
  stated[0] = 2.0 * static_cast<double>(n);
  stated.segment(1, n).setConstant(-2.0 * alpha);
  stated.tail(n - 1).setZero();
  rep.expected = stated;
  std::sort(rep.expected.begin(), rep.expected.end());
  rep.eigen_error = (rep.eigenvalues - rep.expected).cwiseAbs().maxCoeff();
  for (Index i = 0; i < 2 * n; ++i) {
    const double dev = std::abs(rep.eigenvalues[i] - rep.expected[i]);
    if (dev > tol) {
      std::ostringstream os;
      os << "eigenvalue " << i << ": got " << rep.eigenvalues[i] << ", expected " << rep.expected[i];
      rep.deviations.push_back(os.str());
    }
  }
  rep.trace_error = std::abs(h.trace() - 2.0 * static_cast<double>(n) * (1.0 - alpha));

  // Paired order: 2n, 0 (n-1 times), -2 alpha (n times), i.e. the block
  // eigenvalues listed per coordinate pair (k, n + k).
  Vector paired(2 * n);
  paired[0] = 2.0 * static_cast<double>(n);
  paired.segment(1, n - 1).setZero();
  paired.tail(n).setConstant(-2.0 * alpha);

  const Matrix d = dct2_matrix(n);
  Matrix b = Matrix::Zero(2 * n, 2 * n);
  b.topLeftCorner(n, n) = d.transpose();
  b.bottomRightCorner(n, n) = d.transpose();
  const Matrix e = mixing_matrix(n);

  struct Candidate {
    const char* name;
    Matrix m;
    const Vector* lambda;
  };
  const Candidate candidates[] = {
      {"columns of diag(D^T,D^T) E, stated order", e, &stated},
      {"columns of diag(D^T,D^T) E, paired order", e, &paired},
      {"columns of diag(D^T,D^T) E^T, stated order", e.transpose(), &stated},
      {"columns of diag(D^T,D^T) E^T, paired order", e.transpose(), &paired},
  };
  rep.reconstruction_error = kInf;
  for (const auto& c : candidates) {
    const Matrix v = b * c.m;
    const Matrix rec = v * c.lambda->asDiagonal() * v.transpose();
    const double err = (rec - h).cwiseAbs().maxCoeff();
    // First passing candidate wins, so the report is stable across alphas.
    if (rep.reconstruction_error <= tol) break;
    if (err < rep.reconstruction_error) {
      rep.reconstruction_error = err;
      rep.reconstruction = c.name;
    }
  }
  if (rep.trace_error > tol * std::max(1.0, std::abs(h.trace()))) {
    rep.deviations.push_back("trace mismatch");
  }
  if (rep.reconstruction_error > tol) rep.deviations.push_back("no factorization reconstructs H");
  rep.passed = rep.deviations.empty();
  return rep;
}

std::string to_string(QpMode mode) {
  return mode == QpMode::ExactIndefinite ? "exact-indefinite" : "linearized-convex";
}

std::string to_string(ConstraintKind kind) {
  return kind == ConstraintKind::AffineEquality ? "affine-equality" : "quadratic-ball";
}

double QpExport::objective(const Vector& v) const {
  return quad.eval(v) + (linear.size() ? linear.dot(v) : 0.0);
}

double QpExport::constraint_value(const Vector& v) const {
  const Vector r = c_matrix * v - rhs;
  if (constraint == ConstraintKind::AffineEquality) return r.norm();
  return r.squaredNorm() - eps * eps;
}

Matrix QpExport::ball_gram() const { return c_matrix.transpose() * c_matrix; }

Vector QpExport::ball_linear() const { return c_matrix.transpose() * rhs; }

nlohmann::json QpExport::to_json(bool dense_objective) const {
  nlohmann::json j;
  j["schema"] = "tau2-qp/1";
  j["mode"] = to_string(mode);
  j["n"] = quad.n;
  j["m"] = c_matrix.rows();
  j["alpha"] = real(alpha);
  j["variables"] = "v = [x_plus; x_minus], x = x_plus - x_minus";

  nlohmann::json obj;
  obj["form"] = "v^T P v + q^T v";
  obj["P"] = {{"structure", "[[J - a I, J + a I], [J + a I, J - a I]], J = ones(n, n)"},
              {"a", real(quad.alpha)}};
  if (dense_objective) obj["P_dense"] = rows(quad.dense());
  obj["q"] = reals(linear.size() ? linear : Vector::Zero(dim()));
  j["objective"] = obj;

  nlohmann::json con;
  con["kind"] = to_string(constraint);
  con["C"] = rows(c_matrix);
  if (constraint == ConstraintKind::AffineEquality) {
    con["form"] = "C v = rhs";
    con["rhs"] = reals(rhs);
  } else {
    con["form"] = "v^T Q v - 2 g^T v + constant <= 0, Q = C^T C";
    con["b"] = reals(rhs);
    con["eps"] = real(eps);
    con["g"] = reals(ball_linear());
    con["constant"] = real(ball_constant());
  }
  j["constraint"] = con;
  j["bounds"] = {{"v_nonnegative", nonnegative}};
  return j;
}

QpExport QpExport::from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != "tau2-qp/1") throw std::invalid_argument("not a tau2-qp/1 document");
  QpExport qp;
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "exact-indefinite") {
    qp.mode = QpMode::ExactIndefinite;
  } else if (mode == "linearized-convex") {
    qp.mode = QpMode::LinearizedConvex;
  } else {
    throw std::invalid_argument("tau2-qp/1: unknown mode " + mode);
  }
  const Index n = j.at("n").get<Index>();
  qp.alpha = read_real(j.at("alpha"));
  qp.quad = QuadForm{n, read_real(j.at("objective").at("P").at("a"))};
  qp.linear = read_reals(j.at("objective").at("q"));
  if (qp.linear.size() != 2 * n) throw std::invalid_argument("tau2-qp/1: q has wrong length");

  const auto& con = j.at("constraint");
  const std::string kind = con.at("kind").get<std::string>();
  qp.c_matrix = read_rows(con.at("C"), 2 * n);
  if (kind == "affine-equality") {
    qp.constraint = ConstraintKind::AffineEquality;
    qp.rhs = read_reals(con.at("rhs"));
  } else if (kind == "quadratic-ball") {
    qp.constraint = ConstraintKind::QuadraticBall;
    qp.rhs = read_reals(con.at("b"));
    qp.eps = read_real(con.at("eps"));
  } else {
    throw std::invalid_argument("tau2-qp/1: unknown constraint " + kind);
  }
  if (qp.rhs.size() != qp.c_matrix.rows()) throw std::invalid_argument("tau2-qp/1: rhs has wrong length");
  qp.nonnegative = j.at("bounds").value("v_nonnegative", true);
  return qp;
}

QpExport export_qp(const RecoveryProblem& problem, double alpha, QpMode mode,
                   const std::optional<Vector>& c) {
  const Index n = problem.a.cols();
  if (problem.b.size() != problem.a.rows()) throw std::invalid_argument("export_qp: b has wrong length");
  if (problem.eps < 0.0) throw std::invalid_argument("export_qp: eps must be >= 0");
  QpExport qp;
  qp.mode = mode;
  qp.alpha = alpha;
  qp.constraint = problem.eps == 0.0 ? ConstraintKind::AffineEquality : ConstraintKind::QuadraticBall;
  qp.c_matrix.resize(problem.a.rows(), 2 * n);
  qp.c_matrix << problem.a, -problem.a;
  qp.rhs = problem.b;
  qp.eps = problem.eps;
  if (mode == QpMode::ExactIndefinite) {
    qp.quad = build_H(n, alpha);
    qp.linear = Vector::Zero(2 * n);
  } else {
    if (!c) throw std::invalid_argument("export_qp: linearized mode needs the anchor c");
    if (c->size() != n) throw std::invalid_argument("export_qp: c has wrong length");
    qp.quad = build_H(n, 0.0);
    qp.linear.resize(2 * n);
    qp.linear << -2.0 * alpha * *c, 2.0 * alpha * *c;
  }
  return qp;
}

KernelModel kernel_model(const Matrix& a, const Vector& b, double rank_tol) {
  if (b.size() != a.rows()) throw std::invalid_argument("kernel_model: b has wrong length");
  const Index n = a.cols();
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  Index r = 0;
  const double cut = sv.size() ? rank_tol * sv[0] : 0.0;
  while (r < sv.size() && sv[r] > cut) ++r;

  KernelModel model;
  model.basis = svd.matrixV().rightCols(n - r);
  model.x0 = svd.matrixV().leftCols(r) *
             (svd.matrixU().leftCols(r).transpose() * b).cwiseQuotient(sv.head(r));
  if ((a * model.x0 - b).norm() > 1e-8 * std::max(1.0, b.norm())) {
    throw DomainError("kernel_model: b is not in the range of A");
  }
  return model;
}

double alpha_star_exact(const KernelModel& model) {
  require_small_kernel(model, "alpha_star_exact");
  if (model.dim() == 1) {
    const double r = norm_l1(model.basis.col(0)) / model.basis.col(0).norm();
    return r * r;
  }
  auto f = [&](double t) {
    const double l1 = norm_l1(direction(model, t));
    return l1 * l1;
  };
  double arg = 0.0;
  return minimize_angle(f, 100000, kink_angles(model), arg);
}

double alpha_star_sampled(const KernelModel& model, std::size_t samples, std::uint64_t seed) {
  if (model.dim() == 0) throw DomainError("alpha_star_sampled: kernel is trivial");
  if (model.dim() == 1) return alpha_star_exact(model);
  const Index d = model.dim();
  auto f = [&](const Vector& c) {
    const double l1 = norm_l1(model.basis * c);
    return l1 * l1;
  };

  CounterRng rng(seed, Stream::Sampler);
  std::normal_distribution<double> normal;
  struct Start {
    double value;
    Vector c;
  };
  std::vector<Start> starts;
  for (std::size_t s = 0; s < std::max<std::size_t>(samples, 1); ++s) {
    Vector c(d);
    for (auto& ci : c) ci = normal(rng);
    if (c.norm() == 0.0) continue;
    c.normalize();
    starts.push_back({f(c), std::move(c)});
  }
  const std::size_t polish = std::min<std::size_t>(starts.size(), 32);
  std::partial_sort(starts.begin(), starts.begin() + static_cast<std::ptrdiff_t>(polish), starts.end(),
                    [](const Start& x, const Start& y) { return x.value < y.value; });

  double best = kInf;
  for (std::size_t s = 0; s < starts.size(); ++s) best = std::min(best, starts[s].value);
  // Pattern search on the sphere along an orthonormal tangent basis.
  for (std::size_t s = 0; s < polish; ++s) {
    Vector c = starts[s].c;
    double fc = starts[s].value;
    double step = 0.25;
    while (step > 1e-12) {
      Eigen::HouseholderQR<Matrix> qr(c);
      const Matrix q = qr.householderQ() * Matrix::Identity(d, d);
      bool moved = false;
      for (Index k = 1; k < d && !moved; ++k) {
        for (const double sgn : {1.0, -1.0}) {
          const Vector trial = (c + sgn * step * q.col(k)).normalized();
          const double ft = f(trial);
          if (ft < fc) {
            c = trial;
            fc = ft;
            moved = true;
            break;
          }
        }
      }
      if (!moved) step *= 0.5;
    }
    best = std::min(best, fc);
  }
  return best;
}

FValue eval_F_bruteforce(const KernelModel& model, double alpha, double grid_radius,
                         std::size_t grid_points) {
  require_small_kernel(model, "eval_F_bruteforce");
  const double radius = grid_radius > 0.0 ? grid_radius : 1e4 * (1.0 + model.x0.norm());
  FValue out;

  // Directions achieving alpha*: along them the leading t^2 coefficient of
  // the objective is alpha* - alpha; the next term is 2 |t| ||u||_1 q.
  std::vector<Vector> dirs;
  const double astar = alpha_star_exact(model);
  if (model.dim() == 1) {
    dirs.push_back(model.basis.col(0));
  } else {
    for (const double t : kink_angles(model)) {
      const Vector u = direction(model, t);
      const double l1 = norm_l1(u);
      if (l1 * l1 <= astar * (1.0 + 1e-9)) dirs.push_back(u);
    }
  }
  const double tol = 1e-9 * std::max(1.0, astar);
  if (alpha > astar + tol) {
    out.unbounded = true;
  } else if (alpha >= astar - tol) {
    for (const Vector& u : dirs) {
      const double scale = std::max(1.0, norm_l1(model.x0));
      if (asymptotic_offset(model.x0, u) < -1e-12 * scale ||
          asymptotic_offset(model.x0, -u) < -1e-12 * scale) {
        out.unbounded = true;
      }
    }
  }

  if (model.dim() == 1) {
    out.box_min = line_min_F(model.x0, model.basis.col(0), alpha, radius).value;
  } else {
    auto f = [&](double t) { return line_min_F(model.x0, direction(model, t), alpha, radius).value; };
    double arg = 0.0;
    out.box_min = minimize_angle(f, grid_points, kink_angles(model), arg);
  }
  out.value = out.unbounded ? -kInf : out.box_min;
  return out;
}

AlphaBar alpha_bar_exact(const KernelModel& model, std::size_t grid_points) {
  require_small_kernel(model, "alpha_bar_exact");
  const double astar = alpha_star_exact(model);
  LineMin best;
  Vector best_dir;
  if (model.dim() == 1) {
    best_dir = model.basis.col(0);
    best = line_min_tau2(model.x0, best_dir);
  } else {
    auto f = [&](double t) { return line_min_tau2(model.x0, direction(model, t)).value; };
    double arg = 0.0;
    minimize_angle(f, grid_points, kink_angles(model), arg);
    best_dir = direction(model, arg);
    best = line_min_tau2(model.x0, best_dir);
  }

  AlphaBar out;
  if (best.value < astar - 1e-9 * std::max(1.0, astar)) {
    out.value = best.value;
    out.attained = true;
    out.minimizer = model.x0 + best.t * best_dir;
  } else {
    out.value = astar;
    out.attained = false;
  }
  return out;
}

SphericalCheck spherical_bound_check(const KernelModel& model, double m, double s,
                                     std::size_t samples, std::uint64_t seed) {
  if (!(s > 0.0)) throw std::invalid_argument("spherical_bound_check: s must be positive");
  SphericalCheck out;
  if (model.dim() == 0) {
    out.alpha_star = kInf;
  } else if (model.dim() <= 2) {
    out.alpha_star = alpha_star_exact(model);
  } else {
    out.alpha_star = alpha_star_sampled(model, samples, seed);
    out.exact = false;
  }
  out.holds = out.alpha_star >= m / s;
  return out;
}

}  // namespace tau2
