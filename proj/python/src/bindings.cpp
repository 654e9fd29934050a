#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tau2/core.hpp"
#include "tau2/harness.hpp"
#include "tau2/prox.hpp"
#include "tau2/reform.hpp"
#include "tau2/sensing.hpp"
#include "tau2/solver.hpp"

#include <sstream>

namespace py = pybind11;
using namespace tau2;

namespace {

MatrixSpec matrix_spec(const std::string& family, std::size_t m, std::size_t n, double e, double r,
                       std::size_t extra_rows, const std::string& mode, std::uint64_t seed) {
  MatrixSpec s;
  s.family = parse_matrix_family(family);
  s.m = m;
  s.n = n;
  s.coherence = e;
  s.correlation = r;
  s.extra_rows = extra_rows;
  s.mode = parse_augment_mode(mode);
  s.seed = seed;
  return s;
}

KernelModel model_of(const Matrix& a, const Vector& b) { return kernel_model(a, b); }

py::object parse_json(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse recovery by minimizing ||x||_1^2 / ||x||_2^2 under ||Ax - b|| <= eps.";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  m.def("norm_l1", &norm_l1, py::arg("x"));
  m.def("norm_l2", &norm_l2, py::arg("x"));
  m.def("tau_q", &tau_q, py::arg("x"), py::arg("q"));
  m.def("tau2", &tau2::tau2, py::arg("x"));
  m.def("phi_map", &phi_map, py::arg("x"));
  m.def("dinkelbach_value", &dinkelbach_value, py::arg("x"), py::arg("alpha"));
  m.def("lambda_max_gram", &lambda_max_gram, py::arg("a"), py::arg("tol") = 1e-10, py::arg("max_iter") = 10000);
  m.def("least_norm_solution", &least_norm_solution, py::arg("a"), py::arg("b"), py::arg("tol") = 1e-10);
  m.def("numerical_rank", &numerical_rank, py::arg("a"), py::arg("rel_tol") = 1e-10);

  m.def("prox_sq_l1", py::overload_cast<const Vector&, double>(&prox_sq_l1), py::arg("x"), py::arg("beta"));
  m.def("prox_l1", py::overload_cast<const Vector&, double>(&prox_l1), py::arg("x"), py::arg("t"));
  m.def("project_ball", py::overload_cast<const Vector&, const Vector&, double>(&project_ball), py::arg("u"),
        py::arg("b"), py::arg("eps"));

  m.def(
      "gen_matrix",
      [](const std::string& family, std::size_t rows, std::size_t n, double e, double r, std::size_t extra_rows,
         const std::string& mode, std::uint64_t seed) {
        return gen_matrix(matrix_spec(family, rows, n, e, r, extra_rows, mode, seed));
      },
      py::arg("family") = "dct", py::arg("m") = 64, py::arg("n") = 1024, py::arg("E") = 1.0, py::arg("r") = 0.0,
      py::arg("extra_rows") = 0, py::arg("mode") = "copy", py::arg("seed") = 0);
  m.def(
      "gen_signal",
      [](std::size_t n, std::size_t s, double d, bool gaussian, std::size_t min_separation, std::uint64_t seed) {
        SignalSpec spec;
        spec.n = n;
        spec.s = s;
        spec.dynamic_range = d;
        spec.magnitude = gaussian ? MagnitudeModel::UnitGaussian : MagnitudeModel::DynamicRange;
        spec.min_separation = min_separation;
        spec.seed = seed;
        return gen_signal(spec);
      },
      py::arg("n"), py::arg("s"), py::arg("D") = 3.0, py::arg("gaussian") = false, py::arg("min_separation") = 1,
      py::arg("seed") = 0);
  m.def(
      "synthesize_measurements",
      [](const Matrix& a, const Vector& x, double sigma, double eps_factor, std::uint64_t seed) {
        const Measurements meas = synthesize_measurements(a, x, {sigma, eps_factor}, seed);
        return py::make_tuple(meas.b, meas.eps);
      },
      py::arg("a"), py::arg("x"), py::arg("sigma") = 0.0, py::arg("eps_factor") = 1.0, py::arg("seed") = 0);
  m.def("mutual_coherence", &mutual_coherence, py::arg("a"));

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("rho", &SolverConfig::rho)
      .def_readwrite("beta", &SolverConfig::beta)
      .def_readwrite("eta_factor", &SolverConfig::eta_factor)
      .def_readwrite("outer_tol", &SolverConfig::outer_tol)
      .def_readwrite("outer_max_iter", &SolverConfig::outer_max_iter)
      .def_readwrite("inner_tol", &SolverConfig::inner_tol)
      .def_readwrite("inner_max_iter", &SolverConfig::inner_max_iter)
      .def_readwrite("warm_start", &SolverConfig::warm_start)
      .def_static(
          "defaults",
          [](const std::string& family, bool noisy) { return default_solver_config(parse_matrix_family(family), noisy); },
          py::arg("family") = "dct", py::arg("noisy") = false);

  py::class_<SolverResult>(m, "SolverResult")
      .def_readonly("x", &SolverResult::x)
      .def_readonly("alpha_trace", &SolverResult::alpha_trace)
      .def_readonly("dinkelbach_trace", &SolverResult::dinkelbach_trace)
      .def_readonly("iterate_norm_trace", &SolverResult::iterate_norm_trace)
      .def_readonly("step_trace", &SolverResult::step_trace)
      .def_readonly("outer_iters", &SolverResult::outer_iters)
      .def_readonly("inner_iters_total", &SolverResult::inner_iters_total)
      .def_readonly("rejected_steps", &SolverResult::rejected_steps)
      .def_readonly("feasibility_residual", &SolverResult::feasibility_residual)
      .def_readonly("lipschitz", &SolverResult::lipschitz)
      .def_property_readonly("status", [](const SolverResult& r) { return to_string(r.status); });

  m.def(
      "recover",
      [](const Matrix& a, const Vector& b, double eps, const SolverConfig& config) {
        py::gil_scoped_release release;
        return recover({a, b, eps}, config);
      },
      py::arg("a"), py::arg("b"), py::arg("eps") = 0.0, py::arg("config") = SolverConfig{});
  m.def(
      "dinkelbach_solve",
      [](const Matrix& a, const Vector& b, double eps, const Vector& x0, const SolverConfig& config) {
        py::gil_scoped_release release;
        return dinkelbach_solve({a, b, eps}, x0, config);
      },
      py::arg("a"), py::arg("b"), py::arg("eps"), py::arg("x0"), py::arg("config") = SolverConfig{});
  m.def(
      "l1_initializer",
      [](const Matrix& a, const Vector& b, double eps, double tol, std::size_t max_iter) {
        return l1_initializer({a, b, eps}, tol, max_iter);
      },
      py::arg("a"), py::arg("b"), py::arg("eps") = 0.0, py::arg("tol") = 1e-8, py::arg("max_iter") = 20000);

  m.def("build_H", [](Eigen::Index n, double alpha) { return build_H(n, alpha).dense(); }, py::arg("n"),
        py::arg("alpha"));
  m.def(
      "verify_H_spectrum",
      [](Eigen::Index n, double alpha) {
        const SpectrumReport r = verify_H_spectrum(n, alpha);
        py::dict d;
        d["passed"] = r.passed;
        d["eigenvalues"] = r.eigenvalues;
        d["expected"] = r.expected;
        d["eigen_error"] = r.eigen_error;
        d["reconstruction_error"] = r.reconstruction_error;
        d["reconstruction"] = r.reconstruction;
        return d;
      },
      py::arg("n"), py::arg("alpha"));
  m.def(
      "export_qp",
      [](const Matrix& a, const Vector& b, double eps, double alpha, bool linearized, std::optional<Vector> c,
         bool dense) {
        const QpExport qp =
            export_qp({a, b, eps}, alpha, linearized ? QpMode::LinearizedConvex : QpMode::ExactIndefinite, c);
        return parse_json(qp.to_json(dense));
      },
      py::arg("a"), py::arg("b"), py::arg("eps") = 0.0, py::arg("alpha") = 1.0, py::arg("linearized") = false,
      py::arg("c") = py::none(), py::arg("dense") = false);
  m.def("alpha_star", [](const Matrix& a, const Vector& b) { return alpha_star_exact(model_of(a, b)); },
        py::arg("a"), py::arg("b"));
  m.def(
      "alpha_bar",
      [](const Matrix& a, const Vector& b) {
        const AlphaBar r = alpha_bar_exact(model_of(a, b));
        return py::make_tuple(r.value, r.attained);
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "dinkelbach_function",
      [](const Matrix& a, const Vector& b, double alpha) {
        const FValue f = eval_F_bruteforce(model_of(a, b), alpha);
        return py::make_tuple(f.value, f.unbounded);
      },
      py::arg("a"), py::arg("b"), py::arg("alpha"));
  m.def(
      "worked_example",
      [](int which) {
        const RecoveryProblem p = worked_example(which);
        return py::make_tuple(p.a, p.b);
      },
      py::arg("which"));

  m.def("relative_error", &relative_error, py::arg("x_hat"), py::arg("x_true"));
  m.def(
      "run_experiment",
      [](const std::string& spec_json) {
        const ExperimentSpec spec = ExperimentSpec::from_json(nlohmann::json::parse(spec_json));
        ExperimentResult res;
        {
          py::gil_scoped_release release;
          res = run_experiment(spec);
        }
        std::ostringstream csv;
        write_results_csv(csv, res.records);
        return py::make_tuple(csv.str(), parse_json(summary_json(spec, res)));
      },
      py::arg("spec_json"), "Runs a tau2-exp/1 manifest; returns (results_csv_text, summary_dict).");
  m.def(
      "verify",
      [](const std::string& check) {
        VerifyOptions opt;
        opt.check = check;
        py::list out;
        for (const auto& c : run_verify(opt)) out.append(py::make_tuple(c.group, c.name, c.passed, c.detail));
        return out;
      },
      py::arg("check") = "all");
}
