#pragma once

#include "tau2/sensing.hpp"
#include "tau2/solver.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace tau2 {

/// ||x_hat - x_true|| / ||x_true||; DomainError for a zero truth.
double relative_error(const Vector& x_hat, const Vector& x_true);

/// rho = beta = 100 (DCT families) or 2 (Gaussian) without noise,
/// 80 (DCT) or 2 (Gaussian) with noise.
SolverConfig default_solver_config(MatrixFamily family, bool noisy);

/// ceil(2E) for the DCT families, 1 for Gaussian.
std::size_t default_min_separation(const MatrixSpec& matrix);

/// "tau2-exp/1" experiment manifest.
struct ExperimentSpec {
  std::string name = "experiment";
  MatrixSpec matrix;  // seed is replaced per trial
  std::vector<std::size_t> s_values{5};
  MagnitudeModel magnitude = MagnitudeModel::DynamicRange;
  double dynamic_range = 3.0;
  std::optional<std::size_t> min_separation;  // default_min_separation when empty
  NoiseSpec noise;
  SolverConfig solver;  // filled from default_solver_config unless given
  L1Options l1;
  std::size_t trials = 50;
  std::uint64_t base_seed = 0;
  double success_threshold = 1e-3;
  std::size_t workers = 0;  // 0: hardware concurrency
  std::string output = "results";

  void validate() const;
  static ExperimentSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct TrialRecord {
  std::size_t cell = 0;
  std::size_t s = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double rel_error = 0.0;
  bool success = false;
  std::size_t outer_iters = 0;
  std::size_t inner_iters = 0;
  double seconds = 0.0;
  double alpha_final = 0.0;
  std::string status;  // solver status, or "Error" when the trial threw
  double residual = 0.0;
  double eps = 0.0;
  double b_norm = 0.0;
  double max_dinkelbach = 0.0;  // largest subproblem objective after the first outer step
  double max_alpha_excess = 0.0;  // max_k alpha^(k+1) - alpha^(k) (1 - ||dx||^2 / ||x^(k+1)||^2)
  std::string message;
};

struct CellSummary {
  std::size_t s = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double mean_rel_error = 0.0;
  double mean_seconds = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;  // ordered by (cell, trial)
  std::vector<CellSummary> cells;
};

/// One seeded trial: seed = base_seed + trial, with the matrix, signal and
/// noise drawn from their own streams of that seed.
TrialRecord run_trial(const ExperimentSpec& spec, std::size_t cell, std::size_t trial);

/// Runs every (s, trial) pair on a worker pool; the records come back in
/// (cell, trial) order regardless of scheduling. `progress` is called from
/// the collecting thread after each completed trial.
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                 const std::function<void(const TrialRecord&)>& progress = {});

void write_results_csv(std::ostream& out, const std::vector<TrialRecord>& records);
nlohmann::json summary_json(const ExperimentSpec& spec, const ExperimentResult& result);

/// Worked examples: 1 (kernel dimension 1) or 2 (kernel dimension 2), eps = 0.
RecoveryProblem worked_example(int which);

struct VerifyCheck {
  std::string group;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::string check = "all";  // all | spectrum | examples | prox | lipschitz
  std::optional<long> n;       // spectrum: single size instead of the sweep
  std::optional<double> alpha;
  std::uint64_t seed = 0;
};

std::vector<VerifyCheck> run_verify(const VerifyOptions& options);

}  // namespace tau2
