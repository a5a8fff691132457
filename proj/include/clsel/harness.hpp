#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clsel/estimator.hpp"
#include "clsel/mask.hpp"
#include "clsel/sampler.hpp"
#include "clsel/stability.hpp"

namespace clsel {

// Count of positions where two masks differ.
int hamming_distance(const ComponentMask& a, const ComponentMask& b);

// Exhaustive scan of all non-zero masks in increasing integer order (bit m of
// the integer = component m); first-encountered minimum wins. Guarded to
// M <= 20.
std::pair<ComponentMask, double> brute_force_optimum(
    const std::function<double(const ComponentMask&)>& objective,
    int component_count);

// Structure of a common-location mask: how many active components fall
// inside/outside the correlated block. g0 depends on a mask only through this
// pair, so the global optimum can be found by scanning (u, c) pairs.
struct CommonLocationStructure {
  int uncorrelated = 0;  // active components outside the block
  int correlated = 0;    // active components inside the block
};

CommonLocationStructure optimal_g0_structure(int d, int d_star, double rho);
// Canonical mask with the given structure: all of the last u uncorrelated
// positions and the first c correlated positions.
ComponentMask structure_mask(int d, int d_star, int u, int c);
// Minimum Hamming distance from mask to any mask with the target structure.
int structure_distance(const ComponentMask& mask, int d_star,
                       const CommonLocationStructure& target);

// Monte Carlo experiment plan (flat key=value file; see README for keys).
struct ExperimentPlan {
  std::string table;  // "table1", "table3" or "figure1"
  std::vector<int> n_values;
  std::vector<int> d_values;
  std::vector<double> rho_values;
  double d_star_fraction = 0.8;
  int d_star = -1;  // explicit override (figure1)
  double mu = 0.0;
  int replicates = 50;
  std::vector<std::string> methods;

  // Sampler / estimator settings; tau and sweeps default to d and 10 d.
  double tau = -1.0;
  int sweeps = -1;
  double xi = 0.7;
  double alpha = 0.1;
  double lambda = 1.0;
  double chart_b = 3.1622776601683795;
  int jackknife_group_size = 1;
  double ridge = 0.0;
  int initial_active = 5;

  static ExperimentPlan parse_file(const std::string& path);
  static ExperimentPlan parse(const std::string& content);
  void validate() const;
};

struct MethodCell {
  std::string method;
  int n = 0;
  int d = 0;
  double rho = 0.0;
  int replicates_requested = 0;
  int replicates_used = 0;
  int failures = 0;
  double var = kNaN;
  double bias2 = kNaN;
  double mse = kNaN;
  double mean_components = kNaN;
  double se_var = kNaN;          // Monte Carlo standard errors
  double se_components = kNaN;
  double re = kNaN;              // vs the no-selection method, when present
  double se_re = kNaN;
  bool valid = true;  // false when more than 5% of replicates failed
};

using ProgressFn = std::function<void(const std::string&)>;

struct BenchResult {
  std::vector<MethodCell> cells;
  nlohmann::json meta;
};

// Location-model benchmark: per (n, d, rho) cell and method, the Monte Carlo
// variance and squared bias of mu-hat plus mean selected-component counts.
// Methods: no-selection, cls1-min, cls1-threshold, cls2, mle-known-sigma,
// mle-sample-sigma (the last only where d < n).
BenchResult run_table1(const ExperimentPlan& plan, std::uint64_t base_seed,
                       int jobs, const ProgressFn& progress = nullptr);

// Pairwise-likelihood benchmark on the exchangeable model: relative
// efficiency of rho-hat under selection versus all pairs, plus component
// counts. Methods: no-selection (all pairs) and cls1-min.
BenchResult run_table3(const ExperimentPlan& plan, std::uint64_t base_seed,
                       int jobs, const ProgressFn& progress = nullptr);

// Single penalized-chain demonstration run; writes the four plot-ready series
// (objective + control limit, final frequencies, progressive stable-mask
// objective, Hamming distance to the g0-optimal structure) under out_dir.
nlohmann::json run_figure1(const ExperimentPlan& plan, std::uint64_t seed,
                           const std::string& out_dir);

std::string summary_to_csv(const std::vector<MethodCell>& cells);
void write_bench_outputs(const std::string& out_dir, const BenchResult& result);

}  // namespace clsel
