#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "clsel/estimator.hpp"
#include "clsel/sampler.hpp"
#include "clsel/stability.hpp"

namespace clsel {

enum class Algorithm { kCls1, kCls2 };

Algorithm algorithm_from_string(const std::string& name);
std::string algorithm_name(Algorithm a);

struct SelectionRuleResult {
  std::string rule;  // "min", "threshold" or "stability"
  ComponentMask mask;
  double g = kInf;        // recorded objective at the mask
  double g_total = kInf;  // penalized objective at the mask
  bool estimated = false;
  Eigen::VectorXd theta;
  Eigen::VectorXd standard_error;  // delete-k jackknife SE
  std::string warning;
};

struct SelectionOutcome {
  Algorithm algorithm = Algorithm::kCls1;
  ChainTrace trace;
  std::vector<SelectionRuleResult> rules;
  ControlChartDiagnostic chart;
  Eigen::VectorXd frequencies;  // default-window frequencies
  std::optional<StabilityReport> stability;
  std::vector<ComponentMask> min_ties;
  // Size of the complexity penalty against the spread of the sampled
  // objective, for judging whether the penalty dominates.
  double penalty_span = 0.0;
  double g_range = 0.0;
  bool estimation_failure = false;  // some non-empty rule could not be fit

  const SelectionRuleResult* rule(const std::string& name) const;
};

// Runs Algorithm 1 (cls1: unpenalized chain, argmin + threshold rules) or
// Algorithm 2 (cls2: penalized chain, argmin + PCER stability rule) end to
// end and estimates theta at each selected mask.
SelectionOutcome run_selection(const SubLikelihoodFamily& family,
                               Algorithm algorithm, SamplerConfig sampler_cfg,
                               EstimatorConfig est_cfg,
                               const StabilityConfig& stability_cfg);

// Report body (schema_version 1); callers may add run metadata before
// writing.
nlohmann::json selection_report_json(const SelectionOutcome& outcome,
                                     const SubLikelihoodFamily& family,
                                     const SamplerConfig& sampler_cfg,
                                     const EstimatorConfig& est_cfg,
                                     const StabilityConfig& stability_cfg);

// One row per sweep: sweep index, mask bitstring, g, g_lambda and the
// cumulative per-component selection frequencies up to that sweep.
std::string trace_to_csv(const ChainTrace& trace);

}  // namespace clsel
