#include "clsel/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include <Eigen/LU>
#include <nlohmann/json.hpp>

#include "clsel/errors.hpp"
#include "clsel/io.hpp"
#include "clsel/models/common_location.hpp"
#include "clsel/models/exchangeable.hpp"
#include "clsel/random.hpp"
#include "clsel/selection.hpp"
#include "clsel/version.hpp"

namespace clsel {

using nlohmann::json;

int hamming_distance(const ComponentMask& a, const ComponentMask& b) {
  if (a.size() != b.size())
    throw ParameterError("hamming distance needs masks of equal length");
  int dist = 0;
  for (int m = 0; m < a.size(); ++m)
    if (a.test(m) != b.test(m)) ++dist;
  return dist;
}

std::pair<ComponentMask, double> brute_force_optimum(
    const std::function<double(const ComponentMask&)>& objective,
    int component_count) {
  if (component_count < 1) throw ParameterError("need at least one component");
  if (component_count > 20)
    throw ParameterError("brute force enumeration is guarded to M <= 20");
  ComponentMask best;
  double best_value = kInf;
  const std::uint64_t states = 1ULL << component_count;
  for (std::uint64_t v = 1; v < states; ++v) {
    const ComponentMask mask = ComponentMask::from_integer(component_count, v);
    const double value = objective(mask);
    if (value < best_value) {
      best_value = value;
      best = mask;
    }
  }
  if (!std::isfinite(best_value))
    throw NumericalError("no mask with finite objective");
  return {best, best_value};
}

CommonLocationStructure optimal_g0_structure(int d, int d_star, double rho) {
  if (d_star < 0 || d_star > d)
    throw ParameterError("need 0 <= d_star <= d");
  CommonLocationStructure best;
  double best_value = kInf;
  for (int u = 0; u <= d - d_star; ++u) {
    for (int c = 0; c <= d_star; ++c) {
      const int total = u + c;
      if (total == 0) continue;
      const double value = std::log(total + rho * c * (c - 1)) -
                           2.0 * std::log(static_cast<double>(total));
      if (value < best_value) {
        best_value = value;
        best = {u, c};
      }
    }
  }
  return best;
}

ComponentMask structure_mask(int d, int d_star, int u, int c) {
  if (c > d_star || u > d - d_star)
    throw ParameterError("structure does not fit the block sizes");
  ComponentMask mask(d);
  for (int m = 0; m < c; ++m) mask.set(m, true);
  for (int m = d_star; m < d_star + u; ++m) mask.set(m, true);
  return mask;
}

int structure_distance(const ComponentMask& mask, int d_star,
                       const CommonLocationStructure& target) {
  int in_block = 0;
  for (int m = 0; m < d_star; ++m)
    if (mask.test(m)) ++in_block;
  const int out_block = mask.count() - in_block;
  return std::abs(in_block - target.correlated) +
         std::abs(out_block - target.uncorrelated);
}

// ---------------------------------------------------------------------------
// Plan files
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_number(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ParameterError("plan key '" + key + "': cannot parse number '" +
                         value + "'");
  }
}

int parse_int(const std::string& value, const std::string& key) {
  const double v = parse_number(value, key);
  if (v != std::floor(v))
    throw ParameterError("plan key '" + key + "': expected an integer");
  return static_cast<int>(v);
}

}  // namespace

ExperimentPlan ExperimentPlan::parse_file(const std::string& path) {
  return parse(read_file(path));
}

ExperimentPlan ExperimentPlan::parse(const std::string& content) {
  ExperimentPlan plan;
  std::istringstream in(content);
  std::string line;
  bool methods_given = false;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParameterError("plan line is not 'key = value': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "table") {
      plan.table = value;
    } else if (key == "n") {
      plan.n_values.clear();
      for (const auto& v : split_list(value))
        plan.n_values.push_back(parse_int(v, key));
    } else if (key == "d") {
      plan.d_values.clear();
      for (const auto& v : split_list(value))
        plan.d_values.push_back(parse_int(v, key));
    } else if (key == "rho") {
      plan.rho_values.clear();
      for (const auto& v : split_list(value))
        plan.rho_values.push_back(parse_number(v, key));
    } else if (key == "d_star_fraction") {
      plan.d_star_fraction = parse_number(value, key);
    } else if (key == "d_star") {
      plan.d_star = parse_int(value, key);
    } else if (key == "mu") {
      plan.mu = parse_number(value, key);
    } else if (key == "B" || key == "replicates") {
      plan.replicates = parse_int(value, key);
    } else if (key == "methods") {
      plan.methods = split_list(value);
      methods_given = true;
    } else if (key == "tau") {
      plan.tau = parse_number(value, key);
    } else if (key == "sweeps" || key == "T") {
      plan.sweeps = parse_int(value, key);
    } else if (key == "xi") {
      plan.xi = parse_number(value, key);
    } else if (key == "alpha") {
      plan.alpha = parse_number(value, key);
    } else if (key == "lambda") {
      plan.lambda = parse_number(value, key);
    } else if (key == "chart_b") {
      plan.chart_b = parse_number(value, key);
    } else if (key == "k" || key == "jackknife_group_size") {
      plan.jackknife_group_size = parse_int(value, key);
    } else if (key == "ridge") {
      plan.ridge = parse_number(value, key);
    } else if (key == "initial_active") {
      plan.initial_active = parse_int(value, key);
    } else {
      throw ParameterError("unknown plan key '" + key + "'");
    }
  }
  if (!methods_given) {
    if (plan.table == "table3") {
      plan.methods = {"no-selection", "cls1-min"};
    } else {
      plan.methods = {"no-selection", "cls1-min", "cls1-threshold", "cls2",
                      "mle-known-sigma"};
    }
  }
  plan.validate();
  return plan;
}

void ExperimentPlan::validate() const {
  if (table != "table1" && table != "table3" && table != "figure1")
    throw ParameterError("plan key 'table' must be table1, table3 or figure1");
  if (n_values.empty()) throw ParameterError("plan key 'n' is required");
  if (d_values.empty()) throw ParameterError("plan key 'd' is required");
  if (rho_values.empty()) throw ParameterError("plan key 'rho' is required");
  if (replicates < 1) throw ParameterError("plan key 'B' must be >= 1");
  if (d_star < 0 && (d_star_fraction <= 0.0 || d_star_fraction > 1.0))
    throw ParameterError("plan key 'd_star_fraction' must lie in (0, 1]");
  if (!(xi > 0.5 && xi < 1.0))
    throw ParameterError("plan key 'xi' must lie in (0.5, 1)");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ParameterError("plan key 'alpha' must lie in (0, 1)");
  if (lambda < 0.0) throw ParameterError("plan key 'lambda' must be >= 0");
  if (jackknife_group_size < 1)
    throw ParameterError("plan key 'k' must be >= 1");
  for (const auto& m : methods) {
    if (m != "no-selection" && m != "cls1-min" && m != "cls1-threshold" &&
        m != "cls2" && m != "mle-known-sigma" && m != "mle-sample-sigma")
      throw ParameterError("unknown method '" + m + "' in plan");
  }
}

// ---------------------------------------------------------------------------
// Replicate execution
// ---------------------------------------------------------------------------

namespace {

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& t : workers) t.join();
}

struct ReplicateResult {
  double estimate = kNaN;
  double components = kNaN;
  bool ok = false;
};

struct MethodAccumulator {
  std::string method;
  std::vector<ReplicateResult> replicates;
};

MethodCell summarize(const std::string& method, int n, int d, double rho,
                     double true_value,
                     const std::vector<ReplicateResult>& reps) {
  MethodCell cell;
  cell.method = method;
  cell.n = n;
  cell.d = d;
  cell.rho = rho;
  cell.replicates_requested = static_cast<int>(reps.size());

  std::vector<double> est, comp;
  for (const auto& r : reps) {
    if (!r.ok) continue;
    est.push_back(r.estimate);
    comp.push_back(r.components);
  }
  cell.replicates_used = static_cast<int>(est.size());
  cell.failures = cell.replicates_requested - cell.replicates_used;
  cell.valid =
      cell.failures <= 0.05 * cell.replicates_requested || cell.failures == 0;
  if (est.empty()) {
    cell.valid = false;
    return cell;
  }

  const int b = cell.replicates_used;
  double mean = 0.0;
  for (double v : est) mean += v;
  mean /= b;
  double var = 0.0;
  for (double v : est) var += (v - mean) * (v - mean);
  var = b > 1 ? var / (b - 1) : kNaN;
  cell.var = var;
  cell.bias2 = (mean - true_value) * (mean - true_value);
  cell.mse = var + cell.bias2;
  cell.se_var = b > 1 ? var * std::sqrt(2.0 / (b - 1)) : kNaN;

  double cmean = 0.0;
  for (double v : comp) cmean += v;
  cmean /= b;
  cell.mean_components = cmean;
  if (b > 1) {
    double cvar = 0.0;
    for (double v : comp) cvar += (v - cmean) * (v - cmean);
    cvar /= (b - 1);
    cell.se_components = std::sqrt(cvar / b);
  }
  return cell;
}

void fill_relative_efficiency(std::vector<MethodCell>& cells, int cell_offset,
                              int method_count) {
  const MethodCell* reference = nullptr;
  for (int j = 0; j < method_count; ++j) {
    if (cells[cell_offset + j].method == "no-selection")
      reference = &cells[cell_offset + j];
  }
  if (reference == nullptr || !(reference->var > 0.0)) return;
  for (int j = 0; j < method_count; ++j) {
    MethodCell& cell = cells[cell_offset + j];
    if (!(cell.var > 0.0)) continue;
    cell.re = reference->var / cell.var;
    if (cell.replicates_used > 1 && reference->replicates_used > 1) {
      cell.se_re = cell.re * std::sqrt(2.0 / (cell.replicates_used - 1) +
                                       2.0 / (reference->replicates_used - 1));
    }
  }
}

SamplerConfig make_sampler_config(const ExperimentPlan& plan, int d,
                                  std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.tau = plan.tau > 0 ? plan.tau : static_cast<double>(d);
  cfg.sweeps = plan.sweeps > 0 ? plan.sweeps : 10 * d;
  cfg.xi = plan.xi;
  cfg.chart_b = plan.chart_b;
  cfg.initial_active = plan.initial_active;
  cfg.seed = seed;
  return cfg;
}

EstimatorConfig make_estimator_config(const ExperimentPlan& plan,
                                      std::uint64_t group_seed) {
  EstimatorConfig cfg;
  cfg.jackknife_group_size = plan.jackknife_group_size;
  cfg.ridge = plan.ridge;
  cfg.group_shuffle_seed = group_seed;
  return cfg;
}

json plan_to_json(const ExperimentPlan& plan) {
  json j;
  j["table"] = plan.table;
  j["n"] = plan.n_values;
  j["d"] = plan.d_values;
  j["rho"] = plan.rho_values;
  if (plan.d_star >= 0) {
    j["d_star"] = plan.d_star;
  } else {
    j["d_star_fraction"] = plan.d_star_fraction;
  }
  j["mu"] = plan.mu;
  j["replicates"] = plan.replicates;
  j["methods"] = plan.methods;
  j["tau"] = plan.tau > 0 ? json(plan.tau) : json("d");
  j["sweeps"] = plan.sweeps > 0 ? json(plan.sweeps) : json("10d");
  j["xi"] = plan.xi;
  j["alpha"] = plan.alpha;
  j["lambda"] = plan.lambda;
  j["chart_b"] = plan.chart_b;
  j["jackknife_group_size"] = plan.jackknife_group_size;
  j["ridge"] = plan.ridge;
  j["initial_active"] = plan.initial_active;
  // Var / Bias^2 are reported on the natural scale of the estimates; no
  // rescaling is applied.
  j["value_scaling"] = "none";
  return j;
}

}  // namespace

BenchResult run_table1(const ExperimentPlan& plan, std::uint64_t base_seed,
                       int jobs, const ProgressFn& progress) {
  const auto t_start = std::chrono::steady_clock::now();
  BenchResult result;
  int cell_index = 0;

  for (int n : plan.n_values) {
    for (int d : plan.d_values) {
      for (double rho : plan.rho_values) {
        const int d_star =
            plan.d_star >= 0
                ? plan.d_star
                : static_cast<int>(std::lround(plan.d_star_fraction * d));
        CommonLocationSpec spec{d, d_star, rho, plan.mu};
        spec.validate();
        const Eigen::MatrixXd sigma = spec.covariance();

        // GLS weights for the known-Sigma MLE of the common location.
        Eigen::VectorXd gls_weights;
        {
          Eigen::FullPivLU<Eigen::MatrixXd> lu(sigma);
          const Eigen::VectorXd si = lu.solve(Eigen::VectorXd::Ones(d));
          gls_weights = si / si.sum();
        }

        const std::uint64_t cell_seed =
            RandomStream::derive_seed(base_seed, cell_index);
        const int b_total = plan.replicates;

        std::vector<MethodAccumulator> acc;
        for (const auto& m : plan.methods) {
          acc.push_back({m, std::vector<ReplicateResult>(b_total)});
        }

        const bool needs_cls1 =
            std::count(plan.methods.begin(), plan.methods.end(), "cls1-min") +
                std::count(plan.methods.begin(), plan.methods.end(),
                           "cls1-threshold") >
            0;
        const bool needs_cls2 =
            std::count(plan.methods.begin(), plan.methods.end(), "cls2") > 0;

        parallel_for(b_total, jobs, [&](int b) {
          const std::uint64_t rep_seed =
              RandomStream::derive_seed(cell_seed, b);
          const Dataset data = simulate_common_location(
              spec, n, RandomStream::derive_seed(rep_seed, 0));
          const CommonLocationFamily family(data);
          const ComponentMask all = ComponentMask::all_ones(d);

          SelectionOutcome cls1, cls2;
          StabilityConfig stab;
          stab.alpha = plan.alpha;
          stab.lambda = plan.lambda;
          if (needs_cls1) {
            cls1 = run_selection(
                family, Algorithm::kCls1,
                make_sampler_config(plan, d, RandomStream::derive_seed(rep_seed, 1)),
                make_estimator_config(plan, RandomStream::derive_seed(rep_seed, 3)),
                stab);
          }
          if (needs_cls2) {
            cls2 = run_selection(
                family, Algorithm::kCls2,
                make_sampler_config(plan, d, RandomStream::derive_seed(rep_seed, 2)),
                make_estimator_config(plan, RandomStream::derive_seed(rep_seed, 3)),
                stab);
          }

          for (std::size_t j = 0; j < acc.size(); ++j) {
            const std::string& method = acc[j].method;
            ReplicateResult& slot = acc[j].replicates[b];
            if (method == "no-selection") {
              slot.estimate = family.closed_form_mcle(all)(0);
              slot.components = d;
              slot.ok = true;
            } else if (method == "mle-known-sigma") {
              slot.estimate = gls_weights.dot(family.column_means().transpose());
              slot.components = d;
              slot.ok = true;
            } else if (method == "mle-sample-sigma") {
              if (d >= n) continue;  // sample covariance not invertible
              const Eigen::MatrixXd centered =
                  data.observations.rowwise() - family.column_means();
              const Eigen::MatrixXd sample_cov =
                  centered.transpose() * centered / (n - 1);
              Eigen::FullPivLU<Eigen::MatrixXd> lu(sample_cov);
              if (!lu.isInvertible()) continue;
              const Eigen::VectorXd si = lu.solve(Eigen::VectorXd::Ones(d));
              slot.estimate =
                  si.dot(family.column_means().transpose()) / si.sum();
              slot.components = d;
              slot.ok = true;
            } else {
              const SelectionOutcome& outcome =
                  method == "cls2" ? cls2 : cls1;
              const char* rule_name =
                  method == "cls1-min"
                      ? "min"
                      : (method == "cls1-threshold" ? "threshold" : "stability");
              const SelectionRuleResult* rule = outcome.rule(rule_name);
              if (rule != nullptr && rule->estimated) {
                slot.estimate = rule->theta(0);
                slot.components = rule->mask.count();
                slot.ok = true;
              }
            }
          }
        });

        const int cell_offset = static_cast<int>(result.cells.size());
        for (const auto& a : acc) {
          result.cells.push_back(
              summarize(a.method, n, d, rho, plan.mu, a.replicates));
        }
        fill_relative_efficiency(result.cells, cell_offset,
                                 static_cast<int>(acc.size()));
        ++cell_index;
        if (progress) {
          std::ostringstream msg;
          msg << "cell n=" << n << " d=" << d << " rho=" << rho << " done ("
              << cell_index << ")";
          progress(msg.str());
        }
      }
    }
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  result.meta = json{{"tool_version", kVersion},
                     {"table", "table1"},
                     {"base_seed", base_seed},
                     {"plan", plan_to_json(plan)},
                     {"runtime_seconds", seconds}};
  return result;
}

BenchResult run_table3(const ExperimentPlan& plan, std::uint64_t base_seed,
                       int jobs, const ProgressFn& progress) {
  const auto t_start = std::chrono::steady_clock::now();
  BenchResult result;
  int cell_index = 0;

  for (int n : plan.n_values) {
    for (int d : plan.d_values) {
      for (double rho : plan.rho_values) {
        ExchangeableSpec spec{d, rho};
        spec.validate();
        const int m_count = pair_count(d);
        const std::uint64_t cell_seed =
            RandomStream::derive_seed(base_seed, cell_index);
        const int b_total = plan.replicates;

        std::vector<MethodAccumulator> acc;
        for (const auto& m : plan.methods) {
          if (m == "mle-known-sigma" || m == "mle-sample-sigma")
            throw ParameterError("method '" + m + "' is not defined for table3");
          acc.push_back({m, std::vector<ReplicateResult>(b_total)});
        }
        const bool needs_cls1 =
            std::count(plan.methods.begin(), plan.methods.end(), "cls1-min") +
                std::count(plan.methods.begin(), plan.methods.end(),
                           "cls1-threshold") >
            0;
        const bool needs_cls2 =
            std::count(plan.methods.begin(), plan.methods.end(), "cls2") > 0;

        parallel_for(b_total, jobs, [&](int b) {
          const std::uint64_t rep_seed =
              RandomStream::derive_seed(cell_seed, b);
          const Dataset data = simulate_exchangeable(
              spec, n, RandomStream::derive_seed(rep_seed, 0));
          const ExchangeablePairFamily family(data);
          const ComponentMask all = ComponentMask::all_ones(m_count);

          SelectionOutcome cls1, cls2;
          StabilityConfig stab;
          stab.alpha = plan.alpha;
          stab.lambda = plan.lambda;
          if (needs_cls1) {
            cls1 = run_selection(
                family, Algorithm::kCls1,
                make_sampler_config(plan, d, RandomStream::derive_seed(rep_seed, 1)),
                make_estimator_config(plan, RandomStream::derive_seed(rep_seed, 3)),
                stab);
          }
          if (needs_cls2) {
            cls2 = run_selection(
                family, Algorithm::kCls2,
                make_sampler_config(plan, d, RandomStream::derive_seed(rep_seed, 2)),
                make_estimator_config(plan, RandomStream::derive_seed(rep_seed, 3)),
                stab);
          }

          for (std::size_t j = 0; j < acc.size(); ++j) {
            const std::string& method = acc[j].method;
            ReplicateResult& slot = acc[j].replicates[b];
            if (method == "no-selection") {
              EstimatorConfig est = make_estimator_config(
                  plan, RandomStream::derive_seed(rep_seed, 3));
              try {
                slot.estimate =
                    solve_mcle(family, all, family.initial_theta(), est)(0);
                slot.components = m_count;
                slot.ok = true;
              } catch (const NumericalError&) {
              }
            } else {
              const SelectionOutcome& outcome =
                  method == "cls2" ? cls2 : cls1;
              const char* rule_name =
                  method == "cls1-min"
                      ? "min"
                      : (method == "cls1-threshold" ? "threshold" : "stability");
              const SelectionRuleResult* rule = outcome.rule(rule_name);
              if (rule != nullptr && rule->estimated) {
                slot.estimate = rule->theta(0);
                slot.components = rule->mask.count();
                slot.ok = true;
              }
            }
          }
        });

        const int cell_offset = static_cast<int>(result.cells.size());
        for (const auto& a : acc) {
          result.cells.push_back(
              summarize(a.method, n, d, rho, rho, a.replicates));
        }
        fill_relative_efficiency(result.cells, cell_offset,
                                 static_cast<int>(acc.size()));
        ++cell_index;
        if (progress) {
          std::ostringstream msg;
          msg << "cell n=" << n << " d=" << d << " rho=" << rho << " done ("
              << cell_index << ")";
          progress(msg.str());
        }
      }
    }
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  result.meta = json{{"tool_version", kVersion},
                     {"table", "table3"},
                     {"base_seed", base_seed},
                     {"plan", plan_to_json(plan)},
                     {"runtime_seconds", seconds}};
  return result;
}

json run_figure1(const ExperimentPlan& plan, std::uint64_t seed,
                 const std::string& out_dir) {
  const auto t_start = std::chrono::steady_clock::now();
  if (plan.n_values.size() != 1 || plan.d_values.size() != 1 ||
      plan.rho_values.size() != 1)
    throw ParameterError("figure1 plans need exactly one n, d and rho value");
  const int n = plan.n_values.front();
  const int d = plan.d_values.front();
  const double rho = plan.rho_values.front();
  const int d_star =
      plan.d_star >= 0 ? plan.d_star
                       : static_cast<int>(std::lround(plan.d_star_fraction * d));

  CommonLocationSpec spec{d, d_star, rho, plan.mu};
  spec.validate();
  const Dataset data =
      simulate_common_location(spec, n, RandomStream::derive_seed(seed, 0));
  const CommonLocationFamily family(data);

  EstimatorConfig est =
      make_estimator_config(plan, RandomStream::derive_seed(seed, 3));
  est.penalty_lambda = plan.lambda;
  SamplerConfig sampler =
      make_sampler_config(plan, d, RandomStream::derive_seed(seed, 1));

  MaskObjectiveEvaluator evaluator(family, est);
  CachedMaskObjective objective(
      [&evaluator](const ComponentMask& mask) {
        return evaluator.evaluate(mask);
      },
      est.penalty_lambda, sampler.cache_capacity);
  const ChainTrace trace = run_chain(objective, d, sampler);
  const ControlChartDiagnostic chart = control_chart(trace, sampler.chart_b);

  const CommonLocationStructure oracle = optimal_g0_structure(d, d_star, rho);
  const int t_count = trace.sweeps();

  // (a) objective per sweep with the control-chart limit.
  {
    std::ostringstream csv;
    csv << "sweep,g,g_lambda,control_limit\n";
    for (int t = 0; t < t_count; ++t) {
      csv << (t + 1) << ',' << format_double(trace.g[t]) << ','
          << format_double(trace.g_total[t]) << ','
          << format_double(chart.available ? chart.limit : kNaN) << '\n';
    }
    write_file_atomic(out_dir + "/trace_objective.csv", csv.str());
  }

  // (b) final component frequencies over all sweeps.
  {
    const Eigen::VectorXd freq = component_frequencies(trace, 0, t_count);
    std::ostringstream csv;
    csv << "component,frequency\n";
    for (int m = 0; m < d; ++m)
      csv << (m + 1) << ',' << format_double(freq(m)) << '\n';
    write_file_atomic(out_dir + "/trace_frequencies.csv", csv.str());
  }

  // (c)+(d) progressive stability selection from the first t sweeps: its
  // penalized objective and its Hamming distance to the oracle structure.
  {
    std::ostringstream obj_csv, ham_csv;
    obj_csv << "sweep,active_count,g,g_lambda\n";
    ham_csv << "sweep,hamming_distance\n";
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(d);
    for (int t = 0; t < t_count; ++t) {
      for (int m = 0; m < d; ++m)
        if (trace.masks[t].test(m)) counts(m) += 1.0;
      const Eigen::VectorXd freq = counts / (t + 1);
      const double eta = freq.sum();
      const double xi_hat = pcer_threshold(eta, d, plan.alpha);
      ComponentMask stable(d);
      if (xi_hat <= 1.0) {
        for (int m = 0; m < d; ++m) stable.set(m, freq(m) >= xi_hat);
      }
      double g_value = kInf, total_value = kInf;
      if (stable.any()) {
        const ObjectiveValue v = objective.get(stable);
        g_value = v.g;
        total_value = v.total();
      }
      obj_csv << (t + 1) << ',' << stable.count() << ','
              << format_double(g_value) << ',' << format_double(total_value)
              << '\n';
      ham_csv << (t + 1) << ','
              << structure_distance(stable, d_star, oracle) << '\n';
    }
    write_file_atomic(out_dir + "/trace_progressive.csv", obj_csv.str());
    write_file_atomic(out_dir + "/trace_hamming.csv", ham_csv.str());
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  json meta{{"tool_version", kVersion},
            {"table", "figure1"},
            {"base_seed", seed},
            {"plan", plan_to_json(plan)},
            {"oracle_structure",
             {{"uncorrelated", oracle.uncorrelated},
              {"correlated", oracle.correlated}}},
            {"control_chart_limit", chart.available ? json(chart.limit) : json(nullptr)},
            {"runtime_seconds", seconds}};
  return meta;
}

std::string summary_to_csv(const std::vector<MethodCell>& cells) {
  std::ostringstream out;
  out << "table_cell_n,d,rho,method,replicates,used,failures,valid,var,bias2,"
         "mse,re,se_var,se_re,mean_components,se_components\n";
  auto na = [](double v) { return std::isnan(v) ? std::string("NA") : format_double(v); };
  for (const auto& c : cells) {
    out << c.n << ',' << c.d << ',' << format_double(c.rho) << ',' << c.method
        << ',' << c.replicates_requested << ',' << c.replicates_used << ','
        << c.failures << ',' << (c.valid ? 1 : 0) << ',' << na(c.var) << ','
        << na(c.bias2) << ',' << na(c.mse) << ',' << na(c.re) << ','
        << na(c.se_var) << ',' << na(c.se_re) << ',' << na(c.mean_components)
        << ',' << na(c.se_components) << '\n';
  }
  return out.str();
}

void write_bench_outputs(const std::string& out_dir,
                         const BenchResult& result) {
  write_file_atomic(out_dir + "/summary.csv", summary_to_csv(result.cells));
  write_file_atomic(out_dir + "/meta.json", result.meta.dump(2) + "\n");
}

}  // namespace clsel
