#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "clsel/errors.hpp"
#include "clsel/harness.hpp"
#include "clsel/io.hpp"

using namespace clsel;

namespace {

std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(dir);
  return dir.string();
}

int count_lines(const std::string& path) {
  std::ifstream in(path);
  int lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  return lines;
}

}  // namespace

TEST_CASE("hamming distance") {
  const auto a = ComponentMask::from_string("101");
  const auto b = ComponentMask::from_string("001");
  CHECK(hamming_distance(a, a) == 0);
  CHECK(hamming_distance(a, b) == 1);
  ComponentMask complement(3);
  for (int m = 0; m < 3; ++m) complement.set(m, !a.test(m));
  CHECK(hamming_distance(a, complement) == 3);
  CHECK_THROWS_AS(hamming_distance(a, ComponentMask(4)), ParameterError);
}

TEST_CASE("brute force optimum") {
  // Self-consistent enumeration on the analytic location-model objective.
  {
    const auto objective = [](const ComponentMask& m) {
      return g0_common_location(m, 0.9, 2);
    };
    const auto [mask, value] = brute_force_optimum(objective, 3);
    double expected = kInf;
    ComponentMask expected_mask;
    for (std::uint64_t v = 1; v < 8; ++v) {
      const auto candidate = ComponentMask::from_integer(3, v);
      const double candidate_value = objective(candidate);
      if (candidate_value < expected) {
        expected = candidate_value;
        expected_mask = candidate;
      }
    }
    CHECK(mask == expected_mask);
    CHECK(value == expected);
  }

  // M = 1: the only non-zero mask.
  {
    const auto [mask, value] =
        brute_force_optimum([](const ComponentMask&) { return 1.0; }, 1);
    CHECK(mask.to_string() == "1");
    CHECK(value == 1.0);
  }

  // Constant objective: lowest bit pattern in scan order wins.
  {
    const auto [mask, value] =
        brute_force_optimum([](const ComponentMask&) { return 0.5; }, 3);
    CHECK(mask == ComponentMask::from_integer(3, 1));
  }

  CHECK_THROWS_AS(
      brute_force_optimum([](const ComponentMask&) { return 0.0; }, 21),
      ParameterError);
}

TEST_CASE("g0 structure helpers") {
  // Derived by scanning the analytic objective by hand: at rho = 0.9 a single
  // block component is optimal, at rho = 0.5 two are.
  const auto strong = optimal_g0_structure(10, 8, 0.9);
  CHECK(strong.uncorrelated == 2);
  CHECK(strong.correlated == 1);
  const auto mild = optimal_g0_structure(10, 8, 0.5);
  CHECK(mild.uncorrelated == 2);
  CHECK(mild.correlated == 2);

  const ComponentMask mask = structure_mask(10, 8, 2, 1);
  CHECK(mask.count() == 3);
  CHECK(mask.test(0));
  CHECK(mask.test(8));
  CHECK(mask.test(9));

  CHECK(structure_distance(mask, 8, strong) == 0);
  ComponentMask off = mask;
  off.set(5, true);  // one extra block component
  CHECK(structure_distance(off, 8, strong) == 1);
  off.set(9, false);  // and one missing uncorrelated component
  CHECK(structure_distance(off, 8, strong) == 2);
}

TEST_CASE("plan parsing: keys, defaults and errors") {
  const std::string text = R"(# comment
table = table1
n = 5, 25
d = 10
rho = 0.5, 0.9
B = 7
xi = 0.7
lambda = 1
)";
  const ExperimentPlan plan = ExperimentPlan::parse(text);
  CHECK(plan.table == "table1");
  CHECK(plan.n_values == std::vector<int>{5, 25});
  CHECK(plan.d_values == std::vector<int>{10});
  CHECK(plan.rho_values == std::vector<double>{0.5, 0.9});
  CHECK(plan.replicates == 7);
  CHECK(plan.tau == -1.0);   // defaults to d at run time
  CHECK(plan.sweeps == -1);  // defaults to 10 d at run time
  REQUIRE(plan.methods.size() == 5);
  CHECK(plan.methods.front() == "no-selection");

  CHECK_THROWS_AS(ExperimentPlan::parse("table = table1\nn = 5\nd = 3\n"
                                        "rho = 0.5\nbogus_key = 1\n"),
                  ParameterError);
  CHECK_THROWS_AS(ExperimentPlan::parse("table = nope\nn = 5\nd = 3\nrho = 0.5\n"),
                  ParameterError);
  CHECK_THROWS_AS(ExperimentPlan::parse("table = table1\nn = 5\nd = 3\n"
                                        "rho = 0.5\nmethods = magic\n"),
                  ParameterError);
}

TEST_CASE("table1 smoke run: structure, GLS equivalence at rho 0, ordering") {
  ExperimentPlan plan;
  plan.table = "table1";
  plan.n_values = {25};
  plan.d_values = {5};
  plan.rho_values = {0.0};
  plan.d_star_fraction = 0.8;
  plan.replicates = 6;
  plan.methods = {"no-selection", "cls1-min", "cls1-threshold", "cls2",
                  "mle-known-sigma", "mle-sample-sigma"};
  plan.sweeps = 20;

  const BenchResult result = run_table1(plan, 31, 2);
  REQUIRE(result.cells.size() == 6);
  for (const auto& cell : result.cells) {
    CHECK(cell.replicates_requested == 6);
    if (cell.replicates_used > 0) {
      CHECK(cell.mean_components >= 1.0);
      CHECK(cell.mean_components <= 5.0);
      if (cell.replicates_used > 1) CHECK(cell.var >= 0.0);
    }
  }
  // With rho = 0 the GLS weights are uniform, so the known-Sigma MLE equals
  // the equal-weight mean.
  const MethodCell* ns = nullptr;
  const MethodCell* mle = nullptr;
  for (const auto& cell : result.cells) {
    if (cell.method == "no-selection") ns = &cell;
    if (cell.method == "mle-known-sigma") mle = &cell;
  }
  REQUIRE(ns != nullptr);
  REQUIRE(mle != nullptr);
  CHECK(std::abs(ns->var - mle->var) < 1e-10);
  CHECK(std::abs(ns->bias2 - mle->bias2) < 1e-10);
}

TEST_CASE("replicate summaries are invariant to the worker count") {
  ExperimentPlan plan;
  plan.table = "table1";
  plan.n_values = {20};
  plan.d_values = {4};
  plan.rho_values = {0.6};
  plan.replicates = 5;
  plan.methods = {"no-selection", "cls1-min", "cls2"};
  plan.sweeps = 15;

  const BenchResult serial = run_table1(plan, 77, 1);
  const BenchResult parallel = run_table1(plan, 77, 2);
  CHECK(summary_to_csv(serial.cells) == summary_to_csv(parallel.cells));
}

TEST_CASE("table3: a single pair makes selection and no-selection coincide") {
  ExperimentPlan plan;
  plan.table = "table3";
  plan.n_values = {30};
  plan.d_values = {2};  // M = 1
  plan.rho_values = {0.5};
  plan.replicates = 6;
  plan.methods = {"no-selection", "cls1-min"};

  const BenchResult result = run_table3(plan, 5, 2);
  REQUIRE(result.cells.size() == 2);
  const MethodCell& cls = result.cells[1];
  CHECK(cls.method == "cls1-min");
  CHECK(cls.mean_components == doctest::Approx(1.0));
  CHECK(cls.re == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("summary csv marks unavailable Monte Carlo errors as NA") {
  ExperimentPlan plan;
  plan.table = "table3";
  plan.n_values = {20};
  plan.d_values = {2};
  plan.rho_values = {0.4};
  plan.replicates = 1;  // variance and its SE undefined
  plan.methods = {"no-selection"};
  const BenchResult result = run_table3(plan, 3, 1);
  const std::string csv = summary_to_csv(result.cells);
  CHECK(csv.find("NA") != std::string::npos);
}

TEST_CASE("figure1 artifacts have one row per sweep") {
  ExperimentPlan plan;
  plan.table = "figure1";
  plan.n_values = {30};
  plan.d_values = {8};
  plan.d_star = 6;
  plan.rho_values = {0.9};
  plan.sweeps = 20;
  plan.lambda = 1.0;
  plan.alpha = 0.1;

  const std::string dir = temp_dir("clsel_fig1_smoke");
  const auto meta = run_figure1(plan, 2024, dir);
  CHECK(meta.contains("oracle_structure"));
  CHECK(count_lines(dir + "/trace_objective.csv") == 21);    // header + T
  CHECK(count_lines(dir + "/trace_progressive.csv") == 21);
  CHECK(count_lines(dir + "/trace_hamming.csv") == 21);
  CHECK(count_lines(dir + "/trace_frequencies.csv") == 9);   // header + d
  std::filesystem::remove_all(dir);
}
