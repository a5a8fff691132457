#include "clsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "clsel/errors.hpp"
#include "clsel/io.hpp"
#include "clsel/version.hpp"

namespace clsel {

using nlohmann::json;

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "cls1") return Algorithm::kCls1;
  if (name == "cls2") return Algorithm::kCls2;
  throw ParameterError("unknown algorithm '" + name + "' (expected cls1 or cls2)");
}

std::string algorithm_name(Algorithm a) {
  return a == Algorithm::kCls1 ? "cls1" : "cls2";
}

const SelectionRuleResult* SelectionOutcome::rule(
    const std::string& name) const {
  for (const auto& r : rules) {
    if (r.rule == name) return &r;
  }
  return nullptr;
}

namespace {

SelectionRuleResult make_rule(const std::string& name,
                              const ComponentMask& mask, double lambda,
                              MaskObjectiveEvaluator& evaluator,
                              bool* failure) {
  SelectionRuleResult out;
  out.rule = name;
  out.mask = mask;
  if (!mask.any()) {
    out.warning = "no component selected; estimation refused";
    return out;
  }
  const auto fit = evaluator.fit(mask);
  if (!fit.has_value()) {
    out.warning = "estimation failed at the selected mask";
    if (failure != nullptr) *failure = true;
    return out;
  }
  out.estimated = true;
  out.theta = fit->theta;
  out.standard_error = fit->jackknife.standard_errors();
  out.g = fit->g;
  out.g_total = fit->g + lambda * mask.count();
  return out;
}

}  // namespace

SelectionOutcome run_selection(const SubLikelihoodFamily& family,
                               Algorithm algorithm, SamplerConfig sampler_cfg,
                               EstimatorConfig est_cfg,
                               const StabilityConfig& stability_cfg) {
  stability_cfg.validate();
  est_cfg.penalty_lambda =
      algorithm == Algorithm::kCls2 ? stability_cfg.lambda : 0.0;

  MaskObjectiveEvaluator evaluator(family, est_cfg);
  CachedMaskObjective objective(
      [&evaluator](const ComponentMask& mask) {
        return evaluator.evaluate(mask);
      },
      est_cfg.penalty_lambda, sampler_cfg.cache_capacity);

  SelectionOutcome outcome;
  outcome.algorithm = algorithm;
  outcome.trace = run_chain(objective, family.component_count(), sampler_cfg);
  outcome.chart = control_chart(outcome.trace, sampler_cfg.chart_b);
  outcome.frequencies = selection_frequencies(outcome.trace);
  outcome.min_ties = min_tie_set(outcome.trace);

  const double lambda = est_cfg.penalty_lambda;
  const MinSelection best = select_min_evaluated(outcome.trace);
  outcome.rules.push_back(
      make_rule("min", best.mask, lambda, evaluator, &outcome.estimation_failure));

  if (algorithm == Algorithm::kCls1) {
    const ComponentMask thresh_mask =
        select_threshold(outcome.trace, sampler_cfg.xi);
    outcome.rules.push_back(make_rule("threshold", thresh_mask, lambda,
                                      evaluator, &outcome.estimation_failure));
  } else {
    outcome.stability = stability_select(outcome.trace, stability_cfg);
    outcome.rules.push_back(make_rule("stability", outcome.stability->stable_mask,
                                      lambda, evaluator,
                                      &outcome.estimation_failure));
  }

  double g_min = kInf, g_max = -kInf;
  for (double g : outcome.trace.g) {
    if (!std::isfinite(g)) continue;
    g_min = std::min(g_min, g);
    g_max = std::max(g_max, g);
  }
  outcome.g_range = g_max >= g_min ? g_max - g_min : 0.0;
  outcome.penalty_span = lambda * family.component_count();
  return outcome;
}

namespace {

json finite_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(finite_or_null(v(i)));
  return arr;
}

}  // namespace

json selection_report_json(const SelectionOutcome& outcome,
                           const SubLikelihoodFamily& family,
                           const SamplerConfig& sampler_cfg,
                           const EstimatorConfig& est_cfg,
                           const StabilityConfig& stability_cfg) {
  json report;
  report["schema_version"] = 1;
  report["tool_version"] = kVersion;
  report["algorithm"] = algorithm_name(outcome.algorithm);
  report["components"] = family.component_count();
  report["n"] = family.observation_count();

  json labels = json::array();
  for (int m = 0; m < family.component_count(); ++m)
    labels.push_back(family.component_label(m));
  report["component_labels"] = labels;

  json cfg;
  cfg["tau"] = sampler_cfg.tau;
  cfg["sweeps"] = sampler_cfg.sweeps;
  cfg["initial_active"] = sampler_cfg.initial_active;
  cfg["xi"] = sampler_cfg.xi;
  cfg["burn_in"] = sampler_cfg.resolved_burn_in();
  cfg["chart_b"] = sampler_cfg.chart_b;
  cfg["seed"] = sampler_cfg.seed;
  cfg["frequency_window"] =
      sampler_cfg.frequencies_use_all_sweeps ? "all" : "post-burn-in";
  cfg["lambda"] =
      outcome.algorithm == Algorithm::kCls2 ? stability_cfg.lambda : 0.0;
  if (outcome.algorithm == Algorithm::kCls2) {
    cfg["alpha"] = stability_cfg.alpha;
    cfg["stability_window"] =
        stability_cfg.exclude_burn_in ? "post-burn-in" : "all";
  }
  cfg["jackknife_group_size"] = est_cfg.jackknife_group_size;
  cfg["theta_policy"] = est_cfg.theta_policy == ThetaTildePolicy::kResolvePerMask
                            ? "per-mask"
                            : "pilot";
  cfg["inner_matrix"] =
      est_cfg.inner_matrix == JackknifeInnerMatrix::kFamilyDefault
          ? "family-default"
          : (est_cfg.inner_matrix == JackknifeInnerMatrix::kSensitivity
                 ? "sensitivity"
                 : "score-outer");
  cfg["inner_matrix_resolved"] =
      resolve_inner_matrix(est_cfg, family) == JackknifeInnerMatrix::kSensitivity
          ? "sensitivity"
          : "score-outer";
  cfg["ridge"] = est_cfg.ridge;
  cfg["root_tol"] = est_cfg.root_tol;
  cfg["max_iter"] = est_cfg.max_iter;
  report["config"] = cfg;

  json rules = json::array();
  for (const auto& r : outcome.rules) {
    json rule;
    rule["rule"] = r.rule;
    rule["mask"] = r.mask.to_string();
    rule["active_count"] = r.mask.count();
    rule["g"] = finite_or_null(r.g);
    rule["g_penalized"] = finite_or_null(r.g_total);
    rule["estimated"] = r.estimated;
    if (r.estimated) {
      rule["theta"] = vector_to_json(r.theta);
      rule["standard_error"] = vector_to_json(r.standard_error);
    }
    if (!r.warning.empty()) rule["warning"] = r.warning;
    if (r.rule == "threshold") rule["xi"] = sampler_cfg.xi;
    if (r.rule == "stability" && outcome.stability.has_value()) {
      rule["eta_hat"] = outcome.stability->eta_hat;
      rule["xi_hat"] = outcome.stability->xi_hat;
      rule["ev_bound"] = finite_or_null(outcome.stability->ev_bound);
      rule["threshold_exceeds_one"] = outcome.stability->threshold_exceeds_one;
    }
    rules.push_back(rule);
  }
  report["rules"] = rules;

  report["frequencies"] = vector_to_json(outcome.frequencies);

  json ties = json::array();
  for (const auto& mask : outcome.min_ties) ties.push_back(mask.to_string());
  report["min_tie_set"] = ties;

  json chart;
  chart["available"] = outcome.chart.available;
  if (outcome.chart.available) {
    chart["limit"] = outcome.chart.limit;
    chart["exceed_fraction"] = outcome.chart.exceed_fraction;
    chart["equilibrium_ok"] = outcome.chart.equilibrium_ok;
    chart["b"] = outcome.chart.b;
    chart["reference_count"] = outcome.chart.reference_count;
  }

  json diagnostics;
  diagnostics["control_chart"] = chart;
  diagnostics["cache"] = {{"hits", outcome.trace.cache_stats.hits},
                          {"misses", outcome.trace.cache_stats.misses},
                          {"failures", outcome.trace.cache_stats.failures},
                          {"entries", outcome.trace.cache_stats.entries}};
  diagnostics["penalty_span"] = outcome.penalty_span;
  diagnostics["g_range"] = outcome.g_range;
  diagnostics["penalty_to_range_ratio"] =
      outcome.g_range > 0.0 ? finite_or_null(outcome.penalty_span / outcome.g_range)
                            : json(nullptr);
  report["diagnostics"] = diagnostics;
  return report;
}

std::string trace_to_csv(const ChainTrace& trace) {
  std::ostringstream out;
  const int m_count = trace.masks.empty() ? 0 : trace.masks.front().size();
  out << "sweep,mask,g,g_lambda";
  for (int m = 0; m < m_count; ++m) out << ",freq_" << (m + 1);
  out << '\n';
  std::vector<double> counts(m_count, 0.0);
  for (int t = 0; t < trace.sweeps(); ++t) {
    for (int m = 0; m < m_count; ++m)
      if (trace.masks[t].test(m)) counts[m] += 1.0;
    out << (t + 1) << ',' << trace.masks[t].to_string() << ','
        << format_double(trace.g[t]) << ',' << format_double(trace.g_total[t]);
    for (int m = 0; m < m_count; ++m)
      out << ',' << format_double(counts[m] / (t + 1));
    out << '\n';
  }
  return out.str();
}

}  // namespace clsel
