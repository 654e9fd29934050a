#include "tau2/harness.hpp"

#include "tau2/csv.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace tau2 {
namespace {

double round_to(double v, double digits) {
  const double scale = std::pow(10.0, digits);
  return std::round(v * scale) / scale;
}

std::string magnitude_name(MagnitudeModel m) {
  return m == MagnitudeModel::DynamicRange ? "dynamic-range" : "gaussian";
}

MagnitudeModel parse_magnitude(const std::string& name) {
  if (name == "dynamic-range") return MagnitudeModel::DynamicRange;
  if (name == "gaussian") return MagnitudeModel::UnitGaussian;
  throw std::invalid_argument("unknown magnitude model '" + name + "'");
}

}  // namespace

double relative_error(const Vector& x_hat, const Vector& x_true) {
  if (x_hat.size() != x_true.size()) throw std::invalid_argument("relative_error: dimension mismatch");
  const double denom = x_true.norm();
  if (denom == 0.0) throw DomainError("relative_error: zero reference vector");
  return (x_hat - x_true).norm() / denom;
}

SolverConfig default_solver_config(MatrixFamily family, bool noisy) {
  SolverConfig c;
  const bool gaussian = family == MatrixFamily::CorrelatedGaussian;
  const double rho = gaussian ? 2.0 : (noisy ? 80.0 : 100.0);
  c.rho = rho;
  c.beta = rho;
  return c;
}

std::size_t default_min_separation(const MatrixSpec& matrix) {
  if (matrix.family == MatrixFamily::CorrelatedGaussian) return 1;
  return static_cast<std::size_t>(std::ceil(2.0 * matrix.coherence));
}

void ExperimentSpec::validate() const {
  if (trials == 0) throw std::invalid_argument("experiment: trials must be >= 1");
  if (!(success_threshold > 0.0)) throw std::invalid_argument("experiment: success_threshold must be > 0");
  if (s_values.empty()) throw std::invalid_argument("experiment: no sparsity levels");
  if (noise.sigma < 0.0) throw std::invalid_argument("experiment: sigma must be >= 0");
  if (noise.sigma > 0.0 && noise.eps_factor < 1.0) {
    throw std::invalid_argument("experiment: eps_factor must be >= 1 with noise");
  }
  solver.validate();
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  const std::string schema = j.value("schema", "tau2-exp/1");
  if (schema != "tau2-exp/1") throw std::invalid_argument("unsupported experiment schema '" + schema + "'");
  ExperimentSpec spec;
  spec.name = j.value("name", spec.name);

  const nlohmann::json mj = j.value("matrix", nlohmann::json::object());
  spec.matrix.family = parse_matrix_family(mj.value("family", "dct"));
  spec.matrix.m = mj.value("m", spec.matrix.m);
  spec.matrix.n = mj.value("n", spec.matrix.n);
  spec.matrix.coherence = mj.value("E", spec.matrix.coherence);
  spec.matrix.correlation = mj.value("r", spec.matrix.correlation);
  spec.matrix.extra_rows = mj.value("extra_rows", spec.matrix.extra_rows);
  spec.matrix.mode = parse_augment_mode(mj.value("mode", "copy"));

  const nlohmann::json sj = j.value("signal", nlohmann::json::object());
  if (sj.contains("s")) {
    const auto& s = sj.at("s");
    spec.s_values = s.is_array() ? s.get<std::vector<std::size_t>>() : std::vector<std::size_t>{s.get<std::size_t>()};
  }
  spec.magnitude = parse_magnitude(sj.value("magnitude", "dynamic-range"));
  spec.dynamic_range = sj.value("D", spec.dynamic_range);
  if (sj.contains("min_separation") && !sj.at("min_separation").is_null()) {
    spec.min_separation = sj.at("min_separation").get<std::size_t>();
  }

  const nlohmann::json nj = j.value("noise", nlohmann::json::object());
  spec.noise.sigma = nj.value("sigma", 0.0);
  spec.noise.eps_factor = nj.value("eps_factor", 1.0);

  spec.solver = default_solver_config(spec.matrix.family, spec.noise.sigma > 0.0);
  const nlohmann::json cj = j.value("solver", nlohmann::json::object());
  spec.solver.rho = cj.value("rho", spec.solver.rho);
  spec.solver.beta = cj.value("beta", std::max(spec.solver.beta, spec.solver.rho));
  spec.solver.eta_factor = cj.value("eta_factor", spec.solver.eta_factor);
  spec.solver.outer_tol = cj.value("outer_tol", spec.solver.outer_tol);
  spec.solver.outer_max_iter = cj.value("outer_max_iter", spec.solver.outer_max_iter);
  spec.solver.inner_tol = cj.value("inner_tol", spec.solver.inner_tol);
  spec.solver.inner_max_iter = cj.value("inner_max_iter", spec.solver.inner_max_iter);
  spec.solver.warm_start = cj.value("warm_start", spec.solver.warm_start);
  spec.l1.rho = cj.value("l1_rho", spec.l1.rho);
  spec.l1.tol = cj.value("l1_tol", spec.l1.tol);
  spec.l1.max_iter = cj.value("l1_max_iter", spec.l1.max_iter);

  spec.trials = j.value("trials", spec.trials);
  spec.base_seed = j.value("base_seed", spec.base_seed);
  spec.success_threshold = j.value("success_threshold", spec.success_threshold);
  spec.workers = j.value("workers", spec.workers);
  spec.output = j.value("output", spec.output);
  spec.validate();
  return spec;
}

nlohmann::json ExperimentSpec::to_json() const {
  nlohmann::json j;
  j["schema"] = "tau2-exp/1";
  j["name"] = name;
  j["matrix"] = {{"family", to_string(matrix.family)}, {"m", matrix.m},           {"n", matrix.n},
                 {"E", matrix.coherence},              {"r", matrix.correlation}, {"extra_rows", matrix.extra_rows},
                 {"mode", to_string(matrix.mode)}};
  j["signal"] = {{"s", s_values},
                 {"magnitude", magnitude_name(magnitude)},
                 {"D", dynamic_range},
                 {"min_separation", min_separation.value_or(default_min_separation(matrix))}};
  j["noise"] = {{"sigma", noise.sigma}, {"eps_factor", noise.eps_factor}};
  j["solver"] = {{"rho", solver.rho},
                 {"beta", solver.beta},
                 {"eta_factor", solver.eta_factor},
                 {"outer_tol", solver.outer_tol},
                 {"outer_max_iter", solver.outer_max_iter},
                 {"inner_tol", solver.inner_tol},
                 {"inner_max_iter", solver.inner_max_iter},
                 {"warm_start", solver.warm_start},
                 {"l1_rho", l1.rho},
                 {"l1_tol", l1.tol},
                 {"l1_max_iter", l1.max_iter}};
  j["trials"] = trials;
  j["base_seed"] = base_seed;
  j["success_threshold"] = success_threshold;
  j["workers"] = workers;
  j["output"] = output;
  return j;
}

TrialRecord run_trial(const ExperimentSpec& spec, std::size_t cell, std::size_t trial) {
  TrialRecord rec;
  rec.cell = cell;
  rec.s = spec.s_values.at(cell);
  rec.trial = trial;
  rec.seed = spec.base_seed + trial;
  const auto start = std::chrono::steady_clock::now();
  try {
    MatrixSpec ms = spec.matrix;
    ms.seed = rec.seed;
    const Matrix a = gen_matrix(ms);

    SignalSpec ss;
    ss.n = ms.n;
    ss.s = rec.s;
    ss.magnitude = spec.magnitude;
    ss.dynamic_range = spec.dynamic_range;
    ss.min_separation = spec.min_separation.value_or(default_min_separation(ms));
    ss.seed = rec.seed;
    const Vector x = gen_signal(ss);
    const Measurements meas = synthesize_measurements(a, x, spec.noise, rec.seed);

    const RecoveryProblem problem{a, meas.b, meas.eps};
    const SolverResult res = recover(problem, spec.solver, spec.l1);

    rec.rel_error = relative_error(res.x, x);
    rec.success = rec.rel_error < spec.success_threshold;
    rec.outer_iters = res.outer_iters;
    rec.inner_iters = res.inner_iters_total;
    rec.alpha_final = res.alpha_trace.back();
    rec.status = to_string(res.status);
    rec.residual = res.feasibility_residual;
    rec.eps = meas.eps;
    rec.b_norm = meas.b.norm();
    rec.max_dinkelbach = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < res.dinkelbach_trace.size(); ++k) {
      rec.max_dinkelbach = std::max(rec.max_dinkelbach, res.dinkelbach_trace[k]);
    }
    rec.max_alpha_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < res.alpha_trace.size(); ++k) {
      const double dx = res.step_trace[k];
      const double nx = res.iterate_norm_trace[k + 1];
      const double bound = res.alpha_trace[k] * (1.0 - dx * dx / (nx * nx));
      rec.max_alpha_excess = std::max(rec.max_alpha_excess, res.alpha_trace[k + 1] - bound);
    }
  } catch (const std::exception& e) {
    rec.rel_error = std::numeric_limits<double>::quiet_NaN();
    rec.success = false;
    rec.status = "Error";
    rec.message = e.what();
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::function<void(const TrialRecord&)>& progress) {
  spec.validate();
  const std::size_t total = spec.s_values.size() * spec.trials;
  std::size_t workers = spec.workers ? spec.workers : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, total);

  ExperimentResult result;
  result.records.resize(total);
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::size_t> done;

  auto work = [&] {
    for (std::size_t idx = next++; idx < total; idx = next++) {
      TrialRecord rec = run_trial(spec, idx / spec.trials, idx % spec.trials);
      std::lock_guard<std::mutex> lock(mu);
      result.records[idx] = std::move(rec);
      done.push_back(idx);
      cv.notify_one();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);

  for (std::size_t collected = 0; collected < total; ++collected) {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return !done.empty(); });
    const std::size_t idx = done.front();
    done.pop_front();
    const TrialRecord rec = result.records[idx];
    lock.unlock();
    if (progress) progress(rec);
  }
  for (auto& t : pool) t.join();

  for (std::size_t c = 0; c < spec.s_values.size(); ++c) {
    CellSummary cs;
    cs.s = spec.s_values[c];
    cs.trials = spec.trials;
    double err_sum = 0.0, time_sum = 0.0;
    std::size_t err_count = 0;
    for (std::size_t t = 0; t < spec.trials; ++t) {
      const TrialRecord& r = result.records[c * spec.trials + t];
      if (r.success) ++cs.successes;
      if (std::isfinite(r.rel_error)) {
        err_sum += r.rel_error;
        ++err_count;
      }
      time_sum += r.seconds;
    }
    cs.success_rate = static_cast<double>(cs.successes) / static_cast<double>(cs.trials);
    cs.mean_rel_error = err_count ? err_sum / static_cast<double>(err_count)
                                  : std::numeric_limits<double>::quiet_NaN();
    cs.mean_seconds = time_sum / static_cast<double>(cs.trials);
    result.cells.push_back(cs);
  }
  return result;
}

void write_results_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << "cell,s,trial,seed,rel_error,success,outer_iters,inner_iters,seconds,alpha_final,status,"
         "residual,eps,max_dinkelbach,max_alpha_excess,message\n";
  char secs[32];
  for (const auto& r : records) {
    std::snprintf(secs, sizeof secs, "%.4f", r.seconds);
    std::string msg = r.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out << r.cell << ',' << r.s << ',' << r.trial << ',' << r.seed << ','
        << (std::isfinite(r.rel_error) ? csv::format_real(r.rel_error) : "nan") << ','
        << (r.success ? 1 : 0) << ',' << r.outer_iters << ',' << r.inner_iters << ',' << secs << ','
        << csv::format_real(r.alpha_final) << ',' << r.status << ',' << csv::format_real(r.residual)
        << ',' << csv::format_real(r.eps) << ','
        << (std::isfinite(r.max_dinkelbach) ? csv::format_real(r.max_dinkelbach) : "") << ','
        << (std::isfinite(r.max_alpha_excess) ? csv::format_real(r.max_alpha_excess) : "") << ','
        << msg << '\n';
  }
}

nlohmann::json summary_json(const ExperimentSpec& spec, const ExperimentResult& result) {
  nlohmann::json j;
  j["schema"] = "tau2-summary/1";
  j["name"] = spec.name;
  j["spec"] = spec.to_json();
  nlohmann::json cells = nlohmann::json::array();
  std::size_t failed = 0;
  for (const auto& r : result.records) failed += r.status == "Error";
  for (const auto& c : result.cells) {
    nlohmann::json cj;
    cj["s"] = c.s;
    cj["trials"] = c.trials;
    cj["successes"] = c.successes;
    cj["success_rate"] = round_to(c.success_rate, 6);
    if (std::isfinite(c.mean_rel_error)) {
      cj["mean_rel_error"] = c.mean_rel_error;
    } else {
      cj["mean_rel_error"] = nullptr;
    }
    cj["mean_seconds"] = round_to(c.mean_seconds, 4);
    cells.push_back(cj);
  }
  j["cells"] = cells;
  j["failed_trials"] = failed;
  return j;
}

RecoveryProblem worked_example(int which) {
  Matrix a(5, 6);
  a << 1, -1, 0, 0, 0, 0,
       1, 0, -1, 0, 0, 0,
       0, 1, 1, 1, 0, 0,
       2, 2, 0, 0, 1, 0,
       1, 1, 0, 0, 0, -1;
  Vector b(5);
  b << 0, 0, 20, 40, 18;
  if (which == 1) return {a, b, 0.0};
  if (which == 2) {
    // Drop the second row: the kernel becomes two-dimensional.
    Matrix a2(4, 6);
    a2 << a.row(0), a.bottomRows(3);
    Vector b2(4);
    b2 << b[0], b.tail(3);
    return {a2, b2, 0.0};
  }
  throw std::invalid_argument("worked_example: expected 1 or 2");
}

}  // namespace tau2
