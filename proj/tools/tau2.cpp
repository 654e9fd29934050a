#include "tau2/csv.hpp"
#include "tau2/harness.hpp"
#include "tau2/reform.hpp"
#include "tau2/sensing.hpp"
#include "tau2/solver.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kMaxIter = 3;
constexpr int kDegenerate = 4;

// Bad input, missing files, unreadable data.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

tau2::Matrix load_matrix(const fs::path& p) {
  if (!fs::exists(p)) throw UsageError("no such file: " + p.string());
  try {
    return tau2::csv::read_matrix(p);
  } catch (const std::exception& e) {
    throw UsageError(p.string() + ": " + e.what());
  }
}

tau2::Vector load_vector(const fs::path& p) {
  if (!fs::exists(p)) throw UsageError("no such file: " + p.string());
  try {
    return tau2::csv::read_vector(p);
  } catch (const std::exception& e) {
    throw UsageError(p.string() + ": " + e.what());
  }
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create " + dir.string() + ": " + ec.message());
}

struct GenArgs {
  std::string family = "dct";
  std::size_t m = 64, n = 1024;
  double E = 1.0, r = 0.0;
  std::size_t extra_rows = 0;
  std::string mode = "copy";
  std::size_t s = 5;
  double D = 3.0;
  std::string magnitude = "dynamic-range";
  std::optional<std::size_t> min_sep;
  double sigma = 0.0, eps_factor = 1.0;
  std::uint64_t seed = 0;
  std::string out = ".";
};

int cmd_gen(const GenArgs& g) {
  tau2::MatrixSpec ms;
  try {
    ms.family = tau2::parse_matrix_family(g.family);
    ms.mode = tau2::parse_augment_mode(g.mode);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  ms.m = g.m;
  ms.n = g.n;
  ms.coherence = g.E;
  ms.correlation = g.r;
  ms.extra_rows = g.extra_rows;
  ms.seed = g.seed;
  if (g.magnitude != "dynamic-range" && g.magnitude != "gaussian") {
    throw UsageError("--magnitude must be dynamic-range or gaussian");
  }

  tau2::SignalSpec ss;
  ss.n = g.n;
  ss.s = g.s;
  ss.magnitude = g.magnitude == "gaussian" ? tau2::MagnitudeModel::UnitGaussian
                                           : tau2::MagnitudeModel::DynamicRange;
  ss.dynamic_range = g.D;
  ss.min_separation = g.min_sep.value_or(tau2::default_min_separation(ms));
  ss.seed = g.seed;

  tau2::Matrix a;
  tau2::Vector x;
  tau2::Measurements meas;
  try {
    a = tau2::gen_matrix(ms);
    x = tau2::gen_signal(ss);
    meas = tau2::synthesize_measurements(a, x, {g.sigma, g.eps_factor}, g.seed);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const fs::path dir(g.out);
  make_dir(dir);
  tau2::csv::write_matrix(dir / "A.csv", a);
  tau2::csv::write_vector(dir / "x_true.csv", x);
  tau2::csv::write_vector(dir / "b.csv", meas.b);
  json meta;
  meta["matrix"] = {{"family", g.family}, {"m", a.rows()},        {"n", a.cols()},
                    {"E", g.E},           {"r", g.r},             {"extra_rows", g.extra_rows},
                    {"mode", g.mode}};
  meta["signal"] = {{"s", g.s}, {"magnitude", g.magnitude}, {"D", g.D}, {"min_separation", ss.min_separation}};
  meta["noise"] = {{"sigma", g.sigma}, {"eps_factor", g.eps_factor}};
  meta["seed"] = g.seed;
  meta["eps"] = tau2::csv::format_real(meas.eps);
  write_json(dir / "meta.json", meta);
  std::cout << "wrote " << (dir / "A.csv").string() << " (" << a.rows() << "x" << a.cols() << "), x_true.csv, b.csv, meta.json\n";
  return kOk;
}

struct SolveArgs {
  std::string a_path, b_path, out = ".";
  std::optional<double> eps;
  std::string meta, x0, x_true;
  std::string family = "dct";
  std::optional<double> rho, beta, eta_factor, outer_tol, inner_tol;
  std::optional<std::size_t> outer_max_iter, inner_max_iter;
};

int cmd_solve(const SolveArgs& s) {
  tau2::RecoveryProblem problem;
  problem.a = load_matrix(s.a_path);
  problem.b = load_vector(s.b_path);
  if (s.eps) {
    problem.eps = *s.eps;
  } else if (!s.meta.empty()) {
    const json meta = read_json(s.meta);
    const auto& e = meta.at("eps");
    problem.eps = e.is_string() ? tau2::csv::parse_real(e.get<std::string>()) : e.get<double>();
  }
  try {
    problem.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  tau2::MatrixFamily family;
  try {
    family = tau2::parse_matrix_family(s.family);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  tau2::SolverConfig cfg = tau2::default_solver_config(family, problem.eps > 0.0);
  if (s.rho) cfg.rho = *s.rho;
  cfg.beta = s.beta ? *s.beta : std::max(cfg.beta, cfg.rho);
  if (s.eta_factor) cfg.eta_factor = *s.eta_factor;
  if (s.outer_tol) cfg.outer_tol = *s.outer_tol;
  if (s.inner_tol) cfg.inner_tol = *s.inner_tol;
  if (s.outer_max_iter) cfg.outer_max_iter = *s.outer_max_iter;
  if (s.inner_max_iter) cfg.inner_max_iter = *s.inner_max_iter;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const auto start = std::chrono::steady_clock::now();
  tau2::SolverResult res;
  std::string init = "l1";
  try {
    if (!s.x0.empty()) {
      init = "file";
      res = tau2::dinkelbach_solve(problem, load_vector(s.x0), cfg);
    } else {
      res = tau2::recover(problem, cfg);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path dir(s.out);
  make_dir(dir);
  tau2::csv::write_vector(dir / "x_hat.csv", res.x);
  json rep;
  rep["schema"] = "tau2-report/1";
  rep["status"] = tau2::to_string(res.status);
  rep["alpha_final"] = res.alpha_trace.back();
  rep["alpha_trace"] = res.alpha_trace;
  rep["dinkelbach_trace"] = res.dinkelbach_trace;
  rep["iterate_norm_trace"] = res.iterate_norm_trace;
  rep["outer_iters"] = res.outer_iters;
  rep["inner_iters_total"] = res.inner_iters_total;
  rep["inner_max_hits"] = res.inner_max_hits;
  rep["rejected_steps"] = res.rejected_steps;
  rep["feasibility_residual"] = res.feasibility_residual;
  rep["eps"] = problem.eps;
  rep["lambda_max"] = res.lipschitz;
  rep["init"] = init;
  rep["wall_seconds"] = std::round(wall * 1e4) / 1e4;
  rep["config"] = {{"rho", cfg.rho},
                   {"beta", cfg.beta},
                   {"eta_factor", cfg.eta_factor},
                   {"outer_tol", cfg.outer_tol},
                   {"outer_max_iter", cfg.outer_max_iter},
                   {"inner_tol", cfg.inner_tol},
                   {"inner_max_iter", cfg.inner_max_iter}};
  if (!s.x_true.empty()) rep["rel_error"] = tau2::relative_error(res.x, load_vector(s.x_true));
  write_json(dir / "report.json", rep);

  std::printf("status %s  alpha %.12g  outer %zu  inner %zu  residual %.3g  (%.2fs)\n",
              tau2::to_string(res.status).c_str(), res.alpha_trace.back(), res.outer_iters,
              res.inner_iters_total, res.feasibility_residual, wall);
  switch (res.status) {
    case tau2::SolverStatus::Converged:
      return kOk;
    case tau2::SolverStatus::MaxIter:
      return kMaxIter;
    case tau2::SolverStatus::Degenerate:
      return kDegenerate;
  }
  return kOk;
}

struct ExperimentArgs {
  std::string config;
  std::optional<std::size_t> trials, workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::vector<std::size_t> s;
  bool quiet = false;
};

int cmd_experiment(const ExperimentArgs& x) {
  tau2::ExperimentSpec spec;
  try {
    json j = read_json(x.config);
    if (x.trials) j["trials"] = *x.trials;
    if (x.workers) j["workers"] = *x.workers;
    if (x.seed) j["base_seed"] = *x.seed;
    if (x.output) j["output"] = *x.output;
    if (!x.s.empty()) j["signal"]["s"] = x.s;
    spec = tau2::ExperimentSpec::from_json(j);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(x.config + ": " + e.what());
  }

  const fs::path dir(spec.output);
  make_dir(dir);
  const std::size_t total = spec.trials * spec.s_values.size();
  std::size_t finished = 0;
  const auto result = tau2::run_experiment(spec, [&](const tau2::TrialRecord& r) {
    ++finished;
    if (!x.quiet) {
      std::fprintf(stderr, "[%zu/%zu] s=%zu trial=%zu err=%.3e %s (%.2fs)\n", finished, total, r.s, r.trial,
                   r.rel_error, r.status.c_str(), r.seconds);
    }
  });

  {
    std::ofstream out(dir / "results.csv");
    if (!out) throw UsageError("cannot write " + (dir / "results.csv").string());
    tau2::write_results_csv(out, result.records);
  }
  write_json(dir / "summary.json", tau2::summary_json(spec, result));
  for (const auto& c : result.cells) {
    std::printf("s=%-4zu success %zu/%zu (%.6f)  mean rel err %.4e  mean time %.4fs\n", c.s, c.successes,
                c.trials, c.success_rate, c.mean_rel_error, c.mean_seconds);
  }
  return kOk;
}

int cmd_verify(const tau2::VerifyOptions& opt) {
  std::vector<tau2::VerifyCheck> checks;
  try {
    checks = tau2::run_verify(opt);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  bool all = true;
  for (const auto& c : checks) {
    std::printf("%-4s  %-10s %-48s %s\n", c.passed ? "PASS" : "FAIL", c.group.c_str(), c.name.c_str(),
                c.detail.c_str());
    all = all && c.passed;
  }
  std::printf("%zu checks, %s\n", checks.size(), all ? "all passed" : "FAILURES");
  return all ? kOk : 1;
}

struct ExportArgs {
  std::string a_path, b_path, c_path, out;
  double eps = 0.0;
  double alpha = 1.0;
  std::string mode = "exact";
  bool dense = false;
};

int cmd_export(const ExportArgs& e) {
  tau2::RecoveryProblem problem{load_matrix(e.a_path), load_vector(e.b_path), e.eps};
  if (problem.b.size() != problem.a.rows()) throw UsageError("b has wrong length");
  tau2::QpMode mode;
  if (e.mode == "exact") {
    mode = tau2::QpMode::ExactIndefinite;
  } else if (e.mode == "linearized") {
    mode = tau2::QpMode::LinearizedConvex;
  } else {
    throw UsageError("--mode must be exact or linearized");
  }
  std::optional<tau2::Vector> c;
  if (!e.c_path.empty()) c = load_vector(e.c_path);
  if (mode == tau2::QpMode::LinearizedConvex && !c) throw UsageError("--mode linearized needs --c");
  tau2::QpExport qp;
  try {
    qp = tau2::export_qp(problem, e.alpha, mode, c);
  } catch (const std::invalid_argument& ex) {
    throw UsageError(ex.what());
  }
  const std::string text = qp.to_json(e.dense).dump();
  if (e.out.empty() || e.out == "-") {
    std::cout << text << '\n';
  } else {
    std::ofstream out(e.out);
    if (!out) throw UsageError("cannot write " + e.out);
    out << text << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tau2: sparse recovery by minimizing (||x||_1 / ||x||_2)^2"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate a sensing matrix, sparse signal and measurements");
  g->add_option("--family", gen.family, "dct | gaussian | rank-deficient")->capture_default_str();
  g->add_option("--m", gen.m, "rows of the base matrix")->capture_default_str();
  g->add_option("--n", gen.n, "columns")->capture_default_str();
  g->add_option("--E", gen.E, "DCT coherence parameter")->capture_default_str();
  g->add_option("--r", gen.r, "Gaussian correlation in [0, 1)")->capture_default_str();
  g->add_option("--extra-rows", gen.extra_rows, "rank-deficient: rows appended")->capture_default_str();
  g->add_option("--mode", gen.mode, "rank-deficient: copy | combine")->capture_default_str();
  g->add_option("--s", gen.s, "sparsity")->capture_default_str();
  g->add_option("--D", gen.D, "dynamic range exponent")->capture_default_str();
  g->add_option("--magnitude", gen.magnitude, "dynamic-range | gaussian")->capture_default_str();
  g->add_option("--min-separation", gen.min_sep, "support gap (default ceil(2E) for DCT, 1 for Gaussian)");
  g->add_option("--sigma", gen.sigma, "noise standard deviation")->capture_default_str();
  g->add_option("--eps-factor", gen.eps_factor, "eps = factor * ||noise||")->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--out", gen.out, "output directory")->capture_default_str();

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "l1 start, then the Dinkelbach / AD-LPMM solver");
  s->add_option("--A", solve.a_path, "matrix CSV")->required();
  s->add_option("--b", solve.b_path, "measurement CSV")->required();
  s->add_option("--eps", solve.eps, "noise budget (default: meta.json or 0)");
  s->add_option("--meta", solve.meta, "meta.json written by gen (for eps)");
  s->add_option("--x0", solve.x0, "feasible start instead of the l1 solution");
  s->add_option("--x-true", solve.x_true, "ground truth, adds rel_error to the report");
  s->add_option("--family", solve.family, "parameter defaults: dct | gaussian")->capture_default_str();
  s->add_option("--rho", solve.rho);
  s->add_option("--beta", solve.beta);
  s->add_option("--eta-factor", solve.eta_factor);
  s->add_option("--outer-tol", solve.outer_tol);
  s->add_option("--inner-tol", solve.inner_tol);
  s->add_option("--outer-max-iter", solve.outer_max_iter);
  s->add_option("--inner-max-iter", solve.inner_max_iter);
  s->add_option("--out", solve.out, "output directory")->capture_default_str();

  ExperimentArgs exp;
  auto* x = app.add_subcommand("experiment", "run a seeded experiment grid from a tau2-exp/1 file");
  x->add_option("config", exp.config, "experiment JSON")->required();
  x->add_option("--trials", exp.trials);
  x->add_option("--seed", exp.seed, "base seed");
  x->add_option("--workers", exp.workers);
  x->add_option("--output", exp.output, "output directory");
  x->add_option("--s", exp.s, "sparsity levels")->delimiter(',');
  x->add_flag("--quiet", exp.quiet);

  tau2::VerifyOptions ver;
  auto* v = app.add_subcommand("verify", "built-in verification suite");
  v->add_option("--check", ver.check, "all | spectrum | examples | prox | lipschitz")->capture_default_str();
  v->add_option("--n", ver.n);
  v->add_option("--alpha", ver.alpha);
  v->add_option("--seed", ver.seed)->capture_default_str();

  ExportArgs ex;
  auto* q = app.add_subcommand("export-qp", "write the QP reformulation as tau2-qp/1 JSON");
  q->add_option("--A", ex.a_path)->required();
  q->add_option("--b", ex.b_path)->required();
  q->add_option("--eps", ex.eps)->capture_default_str();
  q->add_option("--alpha", ex.alpha)->capture_default_str();
  q->add_option("--mode", ex.mode, "exact | linearized")->capture_default_str();
  q->add_option("--c", ex.c_path, "linearization anchor CSV");
  q->add_flag("--dense", ex.dense, "also write P densely");
  q->add_option("--out", ex.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*s) return cmd_solve(solve);
    if (*x) return cmd_experiment(exp);
    if (*v) return cmd_verify(ver);
    if (*q) return cmd_export(ex);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
