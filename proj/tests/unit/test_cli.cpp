#include "doctest.h"

#include "tau2/csv.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = TAU2_FIXTURES;
const fs::path kWork = TAU2_WORK;

int run(const std::string& args) {
  fs::create_directories(kWork);
  const std::string cmd = std::string("\"") + TAU2_CLI + "\" " + args + " > \"" +
                          (kWork / "last_output.txt").string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string fx(const std::string& rel) { return "\"" + (kFixtures / rel).string() + "\""; }
std::string wk(const std::string& rel) { return "\"" + (kWork / rel).string() + "\""; }

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("solve: identity instance returns b") {
  CHECK(run("solve --A " + fx("identity/A.csv") + " --b " + fx("identity/b.csv") + " --out " + wk("identity")) == 0);
  const auto x = tau2::csv::read_vector(kWork / "identity" / "x_hat.csv");
  const auto b = tau2::csv::read_vector(kFixtures / "identity" / "b.csv");
  CHECK((x - b).norm() < 1e-6);
  const auto report = read_json(kWork / "identity" / "report.json");
  CHECK(report.at("schema") == "tau2-report/1");
  CHECK(report.at("status") == "Converged");
}

TEST_CASE("solve: kernel-dimension-one example from the shipped start") {
  CHECK(run("solve --A " + fx("example1/A.csv") + " --b " + fx("example1/b.csv") + " --x0 " +
            fx("example1/x0.csv") + " --out " + wk("example1")) == 0);
  const auto report = read_json(kWork / "example1" / "report.json");
  CHECK(std::abs(report.at("alpha_final").get<double>() - 1521.0 / 581.0) < 1e-4);
}

TEST_CASE("solve: exit codes for missing input and iteration cap") {
  CHECK(run("solve --A " + wk("missing.csv") + " --b " + fx("identity/b.csv") + " --out " + wk("missing")) == 2);
  CHECK(run("solve --A " + fx("example1/A.csv") + " --b " + fx("identity/b.csv") + " --out " + wk("mismatch")) == 2);
  CHECK(run("solve --b " + fx("identity/b.csv")) == 2);
  CHECK(run("solve --A " + fx("example1/A.csv") + " --b " + fx("example1/b.csv") + " --x0 " +
            fx("example1/x0.csv") + " --outer-max-iter 1 --out " + wk("capped")) == 3);
  CHECK(read_json(kWork / "capped" / "report.json").at("status") == "MaxIter");
}

TEST_CASE("usage errors") {
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("gen --family fourier --out " + wk("bad")) == 2);
  CHECK(run("gen --m notanumber --out " + wk("bad")) == 2);
  CHECK(run("verify --check nothing") == 2);
}

TEST_CASE("gen: deterministic files and shapes") {
  const std::string args = "gen --family dct --m 64 --n 1024 --E 10 --s 8 --D 3 --seed 7 --out ";
  REQUIRE(run(args + wk("gen_a")) == 0);
  REQUIRE(run(args + wk("gen_b")) == 0);
  for (const char* f : {"A.csv", "x_true.csv", "b.csv", "meta.json"}) {
    CHECK(fs::exists(kWork / "gen_a" / f));
    CHECK(read_text(kWork / "gen_a" / f) == read_text(kWork / "gen_b" / f));
  }
  const auto x = tau2::csv::read_vector(kWork / "gen_a" / "x_true.csv");
  CHECK(x.size() == 1024);
  CHECK((x.array() != 0.0).count() == 8);

  REQUIRE(run("gen --family rank-deficient --m 64 --n 1024 --E 10 --extra-rows 5 --mode combine --s 5 --seed 7 --out " +
              wk("gen_rd")) == 0);
  const auto a = tau2::csv::read_matrix(kWork / "gen_rd" / "A.csv");
  CHECK(a.rows() == 69);
  CHECK(a.cols() == 1024);

  REQUIRE(run("gen --family gaussian --r 0.5 --m 32 --n 128 --s 4 --seed 3 --out " + wk("gen_g")) == 0);
  CHECK(tau2::csv::read_matrix(kWork / "gen_g" / "A.csv").rows() == 32);
  CHECK(read_json(kWork / "gen_g" / "meta.json").at("matrix").at("family") == "gaussian");
}

TEST_CASE("gen then solve with the noise budget from meta.json") {
  REQUIRE(run("gen --family gaussian --m 32 --n 128 --s 3 --magnitude gaussian --sigma 0.01 --eps-factor 1.2 --seed 5 --out " +
              wk("noisy")) == 0);
  REQUIRE(run("solve --A " + wk("noisy/A.csv") + " --b " + wk("noisy/b.csv") + " --meta " + wk("noisy/meta.json") +
              " --x-true " + wk("noisy/x_true.csv") + " --family gaussian --out " + wk("noisy_solve")) == 0);
  const auto report = read_json(kWork / "noisy_solve" / "report.json");
  const double eps = report.at("eps").get<double>();
  CHECK(eps > 0.0);
  CHECK(report.at("feasibility_residual").get<double>() <= eps + 1e-6);
  CHECK(report.contains("rel_error"));
}

TEST_CASE("experiment: single trial gives a single row") {
  REQUIRE(run("experiment \"" + std::string(TAU2_CONFIGS) + "/gaussian_r0.json\" --trials 1 --s 4 --quiet --output " +
              wk("exp1")) == 0);
  const std::string csv = read_text(kWork / "exp1" / "results.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  const auto summary = read_json(kWork / "exp1" / "summary.json");
  CHECK(summary.at("cells").size() == 1);
  CHECK(run("experiment " + wk("no_such_config.json")) == 2);
}

TEST_CASE("verify and export-qp") {
  CHECK(run("verify") == 0);
  CHECK(run("verify --check examples") == 0);
  const std::string out = read_text(kWork / "last_output.txt");
  CHECK(out.find("121/27") != std::string::npos);
  CHECK(run("verify --check spectrum --n 16 --alpha 3") == 0);

  REQUIRE(run("export-qp --A " + fx("example1/A.csv") + " --b " + fx("example1/b.csv") +
              " --alpha 2 --mode exact --out " + wk("qp.json")) == 0);
  const auto qp = read_json(kWork / "qp.json");
  CHECK(qp.at("schema") == "tau2-qp/1");
  CHECK(run("export-qp --A " + fx("example1/A.csv") + " --b " + fx("example1/b.csv") +
            " --alpha 2 --mode linearized --out " + wk("qp_lin.json")) == 2);
}

}  // TEST_SUITE
