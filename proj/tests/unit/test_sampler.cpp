#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "clsel/errors.hpp"
#include "clsel/models/common_location.hpp"
#include "clsel/sampler.hpp"
#include "clsel/selection.hpp"

using namespace clsel;

namespace {

// Synthetic objective over masks defined by a table keyed on the bitstring;
// unknown masks get +inf.
CachedMaskObjective table_objective(std::map<std::string, double> table,
                                    double lambda = 0.0) {
  return CachedMaskObjective(
      [table = std::move(table)](const ComponentMask& mask) {
        auto it = table.find(mask.to_string());
        return it == table.end() ? kInf : it->second;
      },
      lambda);
}

ChainTrace manual_trace(const std::vector<std::string>& masks,
                        const std::vector<double>& g, int burn_in) {
  ChainTrace trace;
  for (const auto& m : masks) trace.masks.push_back(ComponentMask::from_string(m));
  trace.g = g;
  trace.g_total = g;
  trace.burn_in = burn_in;
  return trace;
}

}  // namespace

TEST_CASE("conditional probability examples") {
  CHECK(conditional_probability(1.7, 1.7, 2.0) == 0.5);
  // tau = 1, g0 = ln 3, g1 = 0 -> 1 / (1 + exp(-ln 3)) = 0.75.
  CHECK(conditional_probability(std::log(3.0), 0.0, 1.0) ==
        doctest::Approx(0.75).epsilon(1e-12));
  CHECK(conditional_probability(0.3, kInf, 5.0) == 0.0);
  CHECK(conditional_probability(kInf, 0.3, 5.0) == 1.0);
  CHECK_THROWS_AS(conditional_probability(kInf, kInf, 1.0),
                  DegenerateStateError);
}

TEST_CASE("conditional probability: exact complementarity and shift invariance") {
  RandomStream rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const double g0 = 10.0 * (rng.uniform() - 0.5);
    const double g1 = 10.0 * (rng.uniform() - 0.5);
    const double tau = 0.1 + 100.0 * rng.uniform();
    const double p = conditional_probability(g0, g1, tau);
    const double q = conditional_probability(g1, g0, tau);
    CHECK(p + q == 1.0);  // exact in the stable formulation
    // Shift invariance holds up to the rounding of (g + c) - (g + c); the
    // bitwise chain-level version lives in its own test below.
    const double c = 50.0 * (rng.uniform() - 0.5);
    const double shifted = conditional_probability(g0 + c, g1 + c, tau);
    CHECK(shifted == doctest::Approx(p).epsilon(1e-9));
  }
  // Extreme differences saturate without overflow.
  CHECK(conditional_probability(0.0, 1e6, 10.0) == 0.0);
  CHECK(conditional_probability(1e6, 0.0, 10.0) == 1.0);
}

TEST_CASE("gibbs sweep: large tau locks onto the better state") {
  int moved = 0;
  const int trials = 10000;
  RandomStream rng(4);
  auto objective = table_objective({{"0", 1.0}, {"1", 0.0}});
  for (int t = 0; t < trials; ++t) {
    const ComponentMask out =
        gibbs_sweep(ComponentMask::from_string("0"), objective, 1e4, rng);
    if (out.test(0)) ++moved;
  }
  CHECK(static_cast<double>(moved) / trials > 0.999);
}

TEST_CASE("gibbs sweep: symmetric objective mixes evenly") {
  RandomStream rng(9);
  auto objective = table_objective({{"0", 2.0}, {"1", 2.0}});
  int ones = 0;
  const int trials = 10000;
  ComponentMask state = ComponentMask::from_string("0");
  for (int t = 0; t < trials; ++t) {
    state = gibbs_sweep(state, objective, 3.0, rng);
    if (state.test(0)) ++ones;
  }
  CHECK(std::abs(static_cast<double>(ones) / trials - 0.5) < 0.02);
}

TEST_CASE("gibbs sweep: fixed seed reproduces the sweep") {
  auto obj1 = table_objective(
      {{"000", 0.0}, {"100", 1.0}, {"010", 0.5}, {"001", 2.0},
       {"110", 0.2}, {"101", 0.7}, {"011", 1.5}, {"111", 0.1}});
  auto obj2 = table_objective(
      {{"000", 0.0}, {"100", 1.0}, {"010", 0.5}, {"001", 2.0},
       {"110", 0.2}, {"101", 0.7}, {"011", 1.5}, {"111", 0.1}});
  RandomStream r1(33), r2(33);
  const ComponentMask start = ComponentMask::from_string("100");
  for (int t = 0; t < 20; ++t) {
    const ComponentMask a = gibbs_sweep(start, obj1, 2.0, r1);
    const ComponentMask b = gibbs_sweep(start, obj2, 2.0, r2);
    CHECK(a == b);
  }
}

TEST_CASE("chain matches the enumerated stationary distribution (synthetic)") {
  // pi(w) proportional to exp(-tau g(w)) over the 7 non-degenerate masks.
  const std::map<std::string, double> table = {
      {"000", kInf}, {"100", 0.4}, {"010", 1.0}, {"001", 1.3},
      {"110", 0.2},  {"101", 0.9}, {"011", 0.6}, {"111", 0.0}};
  const double tau = 1.0;

  auto objective = table_objective(table);
  SamplerConfig cfg;
  cfg.tau = tau;
  cfg.sweeps = 60000;
  cfg.burn_in = 5000;
  cfg.seed = 12;
  cfg.initial_active = 2;
  const ChainTrace trace = run_chain(objective, 3, cfg);

  std::map<std::string, double> counts;
  for (int t = cfg.burn_in; t < trace.sweeps(); ++t)
    counts[trace.masks[t].to_string()] += 1.0;
  const double total = trace.sweeps() - cfg.burn_in;

  double z = 0.0;
  for (const auto& [mask, g] : table)
    if (std::isfinite(g)) z += std::exp(-tau * g);
  double tv = 0.0;
  for (const auto& [mask, g] : table) {
    const double pi = std::isfinite(g) ? std::exp(-tau * g) / z : 0.0;
    const double emp = counts.count(mask) ? counts[mask] / total : 0.0;
    tv += std::abs(pi - emp);
  }
  tv /= 2.0;
  CHECK(tv < 0.05);
}

TEST_CASE("run_chain bookkeeping: cache hits, determinism, coherence") {
  CommonLocationSpec spec{3, 2, 0.6, 0.0};
  const Dataset data = simulate_common_location(spec, 25, 5);
  const CommonLocationFamily family(data);

  SamplerConfig cfg;
  cfg.tau = 3.0;
  cfg.sweeps = 10;
  cfg.seed = 21;
  EstimatorConfig est;

  const ChainTrace trace = run_chain(family, cfg, est);
  CHECK(trace.sweeps() == 10);
  // T * M = 30 > 2^3 candidate evaluations: revisits are guaranteed.
  CHECK(trace.cache_stats.hits > 0);

  const ChainTrace again = run_chain(family, cfg, est);
  for (int t = 0; t < 10; ++t) {
    CHECK(trace.masks[t] == again.masks[t]);
    CHECK(trace.g[t] == again.g[t]);
  }

  // Recorded objectives match a fresh recomputation (cache coherence).
  MaskObjectiveEvaluator fresh(family, est);
  for (int t = 0; t < trace.sweeps(); t += 2) {
    CHECK(trace.g[t] == fresh.evaluate(trace.masks[t]));
  }

  SamplerConfig other = cfg;
  other.seed = 22;
  const ChainTrace different = run_chain(family, other, est);
  bool same = true;
  for (int t = 0; t < 10; ++t) same = same && (different.masks[t] == trace.masks[t]);
  CHECK_FALSE(same);
}

TEST_CASE("constant objective shift leaves the chain bitwise unchanged") {
  CommonLocationSpec spec{4, 3, 0.7, 0.0};
  const Dataset data = simulate_common_location(spec, 20, 6);
  const CommonLocationFamily family(data);
  EstimatorConfig est;

  SamplerConfig cfg;
  cfg.tau = 4.0;
  cfg.sweeps = 25;
  cfg.seed = 77;

  MaskObjectiveEvaluator eval_a(family, est);
  CachedMaskObjective plain(
      [&eval_a](const ComponentMask& m) { return eval_a.evaluate(m); }, 0.0);
  const ChainTrace base = run_chain(plain, 4, cfg);

  MaskObjectiveEvaluator eval_b(family, est);
  CachedMaskObjective shifted(
      [&eval_b](const ComponentMask& m) { return eval_b.evaluate(m) + 123.5; },
      0.0);
  const ChainTrace moved = run_chain(shifted, 4, cfg);

  for (int t = 0; t < base.sweeps(); ++t) CHECK(base.masks[t] == moved.masks[t]);
}

TEST_CASE("select_min: earliest recorded minimum wins") {
  const ChainTrace trace =
      manual_trace({"100", "010", "001"}, {3.0, 1.0, 2.0}, 1);
  const MinSelection best = select_min(trace);
  CHECK(best.sweep_index == 1);
  CHECK(best.mask.to_string() == "010");
  CHECK(best.g == 1.0);

  const ChainTrace tie = manual_trace({"100", "010"}, {1.0, 1.0}, 1);
  CHECK(select_min(tie).sweep_index == 0);
  CHECK(select_min(tie).mask.to_string() == "100");

  const ChainTrace bad = manual_trace({"100"}, {kInf}, 0);
  CHECK_THROWS_AS(select_min(bad), NumericalError);
}

TEST_CASE("select_min_evaluated considers cached evaluations") {
  ChainTrace trace = manual_trace({"100", "010"}, {3.0, 2.0}, 1);
  trace.has_best_evaluated = true;
  trace.best_evaluated_mask = ComponentMask::from_string("001");
  trace.best_evaluated_g = 0.5;
  trace.best_evaluated_total = 0.5;
  const MinSelection best = select_min_evaluated(trace);
  CHECK(best.mask.to_string() == "001");
  CHECK(best.sweep_index == -1);
}

TEST_CASE("min tie set collects equivalent minima") {
  const ChainTrace trace = manual_trace({"100", "010", "100", "001"},
                                        {1.0, 1.0 + 5e-13, 1.0, 2.0}, 1);
  const auto ties = min_tie_set(trace);
  REQUIRE(ties.size() == 2);
  CHECK(ties[0].to_string() == "100");
  CHECK(ties[1].to_string() == "010");
}

TEST_CASE("select_threshold: frequencies and the boundary rule") {
  // Frequencies over all 10 sweeps: comp0 = 0.9, comp1 = 0.2, comp2 = 0.7.
  std::vector<std::string> masks;
  for (int t = 0; t < 10; ++t) {
    std::string m = "000";
    if (t < 9) m[0] = '1';
    if (t < 2) m[1] = '1';
    if (t < 7) m[2] = '1';
    masks.push_back(m);
  }
  ChainTrace trace = manual_trace(masks, std::vector<double>(10, 1.0), 0);
  trace.burn_in = 0;  // window = all recorded sweeps
  const ComponentMask mask = select_threshold(trace, 0.7);
  CHECK(mask.to_string() == "101");  // 0.7 >= 0.7 is included
  CHECK_THROWS_AS(select_threshold(trace, 0.5), ParameterError);
}

TEST_CASE("threshold rule keeps the uncorrelated components (location model)") {
  // d = 10, d* = 8, rho = 0.9, n = 100: the two uncorrelated components are
  // selected in at least 90% of seeded runs.
  CommonLocationSpec spec{10, 8, 0.9, 0.0};
  int hits = 0;
  const int runs = 50;
  for (int r = 0; r < runs; ++r) {
    const Dataset data = simulate_common_location(spec, 100, 9000 + r);
    const CommonLocationFamily family(data);
    SamplerConfig cfg;
    cfg.tau = 10.0;  // tau = d
    cfg.sweeps = 100;  // T = 10 d
    cfg.seed = 800 + r;
    EstimatorConfig est;
    const ChainTrace trace = run_chain(family, cfg, est);
    const ComponentMask mask = select_threshold(trace, 0.7);
    if (mask.test(8) && mask.test(9)) ++hits;
  }
  CHECK(hits >= 45);
}

TEST_CASE("control chart: constructed reference with known statistics") {
  // Nine reference values with min = -1, mean = -0.5, variance = 0.04
  // exactly, reproducing limit = -1 + sqrt(10 * 0.04 + 10 * 0.25).
  const double delta = std::sqrt(0.00484375);
  std::vector<double> values;
  values.push_back(-1.0);
  for (int i = 0; i < 4; ++i) values.push_back(-0.5 + 0.0625 + delta);
  for (int i = 0; i < 4; ++i) values.push_back(-0.5 + 0.0625 - delta);
  for (int i = 0; i < 5; ++i) values.push_back(-0.6);  // tail below the limit

  const auto diag = control_chart(values, std::sqrt(10.0), 9);
  REQUIRE(diag.available);
  CHECK(diag.reference_min == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(diag.reference_mean == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(diag.reference_variance == doctest::Approx(0.04).epsilon(1e-10));
  CHECK(diag.limit ==
        doctest::Approx(-1.0 + std::sqrt(2.9)).epsilon(1e-10));
  CHECK(diag.exceed_fraction == 0.0);
  CHECK(diag.equilibrium_ok);
}

TEST_CASE("control chart: constant sequence and constructed failure") {
  std::vector<double> constant(20, 1.25);
  const auto diag = control_chart(constant, std::sqrt(10.0), 10);
  REQUIRE(diag.available);
  CHECK(diag.limit == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(diag.exceed_fraction == 0.0);
  CHECK(diag.equilibrium_ok);

  // Second half jumps five units above the first half: verdict fail.
  std::vector<double> drifting;
  for (int t = 0; t < 10; ++t) drifting.push_back(0.1 * t);
  for (int t = 0; t < 10; ++t) drifting.push_back(5.0 + 0.1 * t);
  const auto bad = control_chart(drifting, std::sqrt(10.0), 10);
  REQUIRE(bad.available);
  CHECK_FALSE(bad.equilibrium_ok);

  // Too few finite reference values: diagnostic unavailable.
  std::vector<double> sparse = {kInf, 1.0, kInf, kInf};
  const auto missing = control_chart(sparse, std::sqrt(10.0), 3);
  CHECK_FALSE(missing.available);
}

TEST_CASE("sampler config validation") {
  SamplerConfig cfg;
  cfg.tau = 2.0;
  cfg.sweeps = 10;
  CHECK_NOTHROW(cfg.validate());
  cfg.tau = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg.tau = 1.0;
  cfg.xi = 0.5;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg.xi = 0.7;
  cfg.burn_in = 10;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
  cfg.burn_in = -1;
  cfg.chart_b = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ParameterError);
}

TEST_CASE("lru-capped cache keeps the chain runnable") {
  CommonLocationSpec spec{5, 4, 0.8, 0.0};
  const Dataset data = simulate_common_location(spec, 30, 3);
  const CommonLocationFamily family(data);
  EstimatorConfig est;
  MaskObjectiveEvaluator evaluator(family, est);
  CachedMaskObjective objective(
      [&evaluator](const ComponentMask& m) { return evaluator.evaluate(m); },
      0.0, 8);
  SamplerConfig cfg;
  cfg.tau = 5.0;
  cfg.sweeps = 30;
  cfg.seed = 14;
  const ChainTrace trace = run_chain(objective, 5, cfg);
  CHECK(trace.sweeps() == 30);
  CHECK(trace.cache_stats.entries <= 8);
  CHECK(trace.cache_stats.evictions > 0);
}
