#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "clsel/dataset.hpp"
#include "clsel/errors.hpp"
#include "clsel/harness.hpp"
#include "clsel/io.hpp"
#include "clsel/models/common_location.hpp"
#include "clsel/models/exchangeable.hpp"
#include "clsel/models/ordinal_probit.hpp"
#include "clsel/selection.hpp"
#include "clsel/version.hpp"

namespace {

using clsel::ParameterError;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDiagnostics = 3;
constexpr int kExitNumerical = 4;

// Flat key = value files (dataset specs); '#' starts a comment.
std::map<std::string, std::string> parse_flat_config(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  auto trim = [](const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParameterError("spec line is not 'key = value': " + line);
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

double parse_double_value(const std::string& v, const std::string& key) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ParameterError("key '" + key + "': cannot parse number '" + v + "'");
  return x;
}

std::vector<double> parse_double_list(const std::string& v,
                                      const std::string& key) {
  std::vector<double> out;
  std::string cur;
  for (char c : v + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(parse_double_value(cur, key));
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  return out;
}

Eigen::MatrixX2d gamma_from_list(const std::vector<double>& values, int d) {
  Eigen::MatrixX2d gamma(d, 2);
  if (static_cast<int>(values.size()) == 2) {
    for (int k = 0; k < d; ++k) {
      gamma(k, 0) = values[0];
      gamma(k, 1) = values[1];
    }
  } else if (static_cast<int>(values.size()) == 2 * d) {
    for (int k = 0; k < d; ++k) {
      gamma(k, 0) = values[2 * k];
      gamma(k, 1) = values[2 * k + 1];
    }
  } else {
    throw ParameterError(
        "key 'gamma': expected 2 values (shared by all SNPs) or 2*d values");
  }
  return gamma;
}

void write_json_atomic(const std::string& path, const json& j) {
  clsel::write_file_atomic(path, j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string model;
  std::string spec_path;
  std::string out;
  int d = -1;
  int d_star = -1;
  double rho = std::nan("");
  double mu = std::nan("");
  double theta = std::nan("");
  std::string gamma;
  double case_fraction = std::nan("");
  double latent_rho = std::nan("");
  int n = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

int run_simulate(SimulateArgs args) {
  std::map<std::string, std::string> spec;
  if (!args.spec_path.empty())
    spec = parse_flat_config(clsel::read_file(args.spec_path));

  auto resolve_str = [&](const std::string& key, const std::string& flag_value,
                         const std::string& fallback) {
    if (!flag_value.empty()) return flag_value;
    auto it = spec.find(key);
    if (it != spec.end()) return it->second;
    return fallback;
  };
  auto resolve_num = [&](const std::string& key, double flag_value,
                         std::optional<double> fallback) -> double {
    if (!std::isnan(flag_value)) return flag_value;
    auto it = spec.find(key);
    if (it != spec.end()) return parse_double_value(it->second, key);
    if (fallback.has_value()) return *fallback;
    throw ParameterError("key '" + key + "' is required");
  };
  auto resolve_int = [&](const std::string& key, int flag_value,
                         std::optional<int> fallback) -> int {
    if (flag_value >= 0) return flag_value;
    auto it = spec.find(key);
    if (it != spec.end())
      return static_cast<int>(parse_double_value(it->second, key));
    if (fallback.has_value()) return *fallback;
    throw ParameterError("key '" + key + "' is required");
  };

  const std::string model = resolve_str("model", args.model, "");
  if (model.empty()) throw ParameterError("key 'model' is required");
  if (!args.seed_given && spec.count("seed"))
    args.seed = static_cast<std::uint64_t>(
        parse_double_value(spec.at("seed"), "seed"));
  const int n = resolve_int("n", args.n, std::nullopt);

  json cfg;
  cfg["model"] = model;
  cfg["n"] = n;
  cfg["seed"] = args.seed;

  clsel::Dataset data;
  if (model == "common-location") {
    clsel::CommonLocationSpec s;
    s.d = resolve_int("d", args.d, std::nullopt);
    s.d_star = resolve_int("d_star", args.d_star, 0);
    s.rho = resolve_num("rho", args.rho, 0.0);
    s.mu = resolve_num("mu", args.mu, 0.0);
    data = clsel::simulate_common_location(s, n, args.seed);
    cfg["d"] = s.d;
    cfg["d_star"] = s.d_star;
    cfg["rho"] = s.rho;
    cfg["mu"] = s.mu;
  } else if (model == "exchangeable") {
    clsel::ExchangeableSpec s;
    s.d = resolve_int("d", args.d, std::nullopt);
    s.rho = resolve_num("rho", args.rho, std::nullopt);
    data = clsel::simulate_exchangeable(s, n, args.seed);
    cfg["d"] = s.d;
    cfg["rho"] = s.rho;
  } else if (model == "ordinal") {
    clsel::OrdinalProbitSpec s;
    s.d = resolve_int("d", args.d, std::nullopt);
    s.theta = resolve_num("theta", args.theta, 0.0);
    s.case_fraction = resolve_num("case_fraction", args.case_fraction, 0.5);
    const std::string gamma_text =
        resolve_str("gamma", args.gamma, "-0.5,0.5");
    s.gamma = gamma_from_list(parse_double_list(gamma_text, "gamma"), s.d);
    const double latent_rho = resolve_num("latent_rho", args.latent_rho, 0.0);
    if (latent_rho < 0.0 || latent_rho >= 1.0)
      throw ParameterError("key 'latent_rho' must lie in [0, 1)");
    const Eigen::MatrixXd r =
        (1.0 - latent_rho) * Eigen::MatrixXd::Identity(s.d, s.d) +
        latent_rho * Eigen::MatrixXd::Ones(s.d, s.d);
    data = clsel::simulate_ordinal(s, n, args.seed, r);
    cfg["d"] = s.d;
    cfg["theta"] = s.theta;
    cfg["case_fraction"] = s.case_fraction;
    cfg["latent_rho"] = latent_rho;
    json gamma_json = json::array();
    for (int k = 0; k < s.d; ++k)
      gamma_json.push_back({s.gamma(k, 0), s.gamma(k, 1)});
    cfg["gamma"] = gamma_json;
  } else {
    throw ParameterError(
        "key 'model': expected common-location, exchangeable or ordinal");
  }

  clsel::write_dataset_csv(args.out, data);

  json manifest;
  manifest["command"] = "simulate";
  manifest["tool_version"] = clsel::kVersion;
  manifest["config"] = cfg;
  if (!args.spec_path.empty()) {
    manifest["inputs"] = {{"spec", args.spec_path},
                          {"spec_fnv64", clsel::fnv1a64_hex(clsel::fnv1a64_file(
                                             args.spec_path))}};
  }
  manifest["outputs"] = {
      {{"path", args.out},
       {"fnv64", clsel::fnv1a64_hex(clsel::fnv1a64_file(args.out))}}};
  write_json_atomic(args.out + ".manifest.json", manifest);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// select
// ---------------------------------------------------------------------------

struct SelectArgs {
  std::string data_path;
  std::string model;
  std::string algorithm;
  std::string out;
  std::string trace_path;
  std::string gamma;
  double tau = std::nan("");
  int sweeps = -1;
  double xi = 0.7;
  int burn_in = -1;
  double chart_b = std::sqrt(10.0);
  int initial_active = 5;
  bool freq_all_sweeps = false;
  double alpha = 0.1;
  double lambda = 1.0;
  bool stability_exclude_burn_in = false;
  int group_size = 1;
  double ridge = 0.0;
  std::string theta_policy = "per-mask";
  std::string inner = "sensitivity";
  double root_tol = 1e-8;
  int max_iter = 60;
  std::uint64_t seed = 0;
  std::size_t cache_cap = 0;
};

int run_select(const SelectArgs& args) {
  const clsel::Dataset data = clsel::read_dataset_csv(args.data_path);
  const clsel::Algorithm algorithm =
      clsel::algorithm_from_string(args.algorithm);

  std::unique_ptr<clsel::SubLikelihoodFamily> family;
  json model_cfg;
  if (args.model == "common-location") {
    family = std::make_unique<clsel::CommonLocationFamily>(data);
  } else if (args.model == "exchangeable") {
    family = std::make_unique<clsel::ExchangeablePairFamily>(data);
  } else if (args.model == "ordinal") {
    if (args.gamma.empty())
      throw ParameterError("key 'gamma' is required for the ordinal model");
    const Eigen::MatrixX2d gamma =
        gamma_from_list(parse_double_list(args.gamma, "gamma"), data.d());
    family = std::make_unique<clsel::OrdinalProbitFamily>(data, gamma);
    json gamma_json = json::array();
    for (int k = 0; k < data.d(); ++k)
      gamma_json.push_back({gamma(k, 0), gamma(k, 1)});
    model_cfg["gamma"] = gamma_json;
  } else {
    throw ParameterError(
        "key 'model': expected common-location, exchangeable or ordinal");
  }

  clsel::SamplerConfig sampler;
  sampler.tau = std::isnan(args.tau) ? data.d() : args.tau;  // tau = d default
  sampler.sweeps = args.sweeps > 0 ? args.sweeps : 10 * data.d();
  sampler.xi = args.xi;
  sampler.burn_in = args.burn_in;
  sampler.chart_b = args.chart_b;
  sampler.initial_active = args.initial_active;
  sampler.frequencies_use_all_sweeps = args.freq_all_sweeps;
  sampler.seed = args.seed;
  sampler.cache_capacity = args.cache_cap;

  clsel::EstimatorConfig est;
  est.jackknife_group_size = args.group_size;
  est.ridge = args.ridge;
  est.root_tol = args.root_tol;
  est.max_iter = args.max_iter;
  est.group_shuffle_seed = clsel::RandomStream::derive_seed(args.seed, 0xD1CE);
  if (args.theta_policy == "per-mask") {
    est.theta_policy = clsel::ThetaTildePolicy::kResolvePerMask;
  } else if (args.theta_policy == "pilot") {
    est.theta_policy = clsel::ThetaTildePolicy::kFixedPilot;
  } else {
    throw ParameterError("key 'theta-policy': expected per-mask or pilot");
  }
  if (args.inner == "sensitivity") {
    est.inner_matrix = clsel::JackknifeInnerMatrix::kSensitivity;
  } else if (args.inner == "score-outer") {
    est.inner_matrix = clsel::JackknifeInnerMatrix::kScoreOuterProduct;
  } else {
    throw ParameterError("key 'inner': expected sensitivity or score-outer");
  }

  clsel::StabilityConfig stability;
  stability.alpha = args.alpha;
  stability.lambda = algorithm == clsel::Algorithm::kCls2 ? args.lambda : 0.0;
  stability.exclude_burn_in = args.stability_exclude_burn_in;

  const clsel::SelectionOutcome outcome =
      clsel::run_selection(*family, algorithm, sampler, est, stability);

  json report =
      clsel::selection_report_json(outcome, *family, sampler, est, stability);
  report["model"] = args.model;
  if (!model_cfg.is_null()) report["model_config"] = model_cfg;
  report["data"] = {{"path", args.data_path},
                    {"fnv64", clsel::fnv1a64_hex(
                                  clsel::fnv1a64_file(args.data_path))}};
  write_json_atomic(args.out, report);

  if (!args.trace_path.empty())
    clsel::write_file_atomic(args.trace_path,
                             clsel::trace_to_csv(outcome.trace));

  json manifest;
  manifest["command"] = "select";
  manifest["tool_version"] = clsel::kVersion;
  manifest["config"] = report["config"];
  manifest["config"]["model"] = args.model;
  manifest["config"]["algorithm"] = args.algorithm;
  manifest["inputs"] = report["data"];
  json outputs = json::array();
  outputs.push_back({{"path", args.out},
                     {"fnv64", clsel::fnv1a64_hex(
                                   clsel::fnv1a64_file(args.out))}});
  if (!args.trace_path.empty()) {
    outputs.push_back({{"path", args.trace_path},
                       {"fnv64", clsel::fnv1a64_hex(clsel::fnv1a64_file(
                                     args.trace_path))}});
  }
  manifest["outputs"] = outputs;
  write_json_atomic(args.out + ".manifest.json", manifest);

  if (outcome.estimation_failure) {
    std::cerr << "clsel: estimation failed at a selected mask (see report)\n";
    return kExitNumerical;
  }
  if (outcome.chart.available && !outcome.chart.equilibrium_ok) {
    std::cerr << "clsel: control-chart diagnostic flags non-equilibrium "
                 "(results written)\n";
    return kExitDiagnostics;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string plan_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int jobs = 0;
};

int run_bench(const BenchArgs& args) {
  const clsel::ExperimentPlan plan =
      clsel::ExperimentPlan::parse_file(args.plan_path);
  const int jobs = args.jobs > 0
                       ? args.jobs
                       : static_cast<int>(std::thread::hardware_concurrency());
  std::filesystem::create_directories(args.out_dir);

  auto progress = [](const std::string& msg) {
    std::cerr << "clsel bench: " << msg << "\n";
  };

  json manifest;
  manifest["command"] = "bench";
  manifest["tool_version"] = clsel::kVersion;
  manifest["seed"] = args.seed;
  manifest["inputs"] = {{"plan", args.plan_path},
                        {"plan_fnv64", clsel::fnv1a64_hex(clsel::fnv1a64_file(
                                           args.plan_path))}};

  if (plan.table == "figure1") {
    const json meta = clsel::run_figure1(plan, args.seed, args.out_dir);
    write_json_atomic(args.out_dir + "/meta.json", meta);
  } else {
    clsel::BenchResult result =
        plan.table == "table1"
            ? clsel::run_table1(plan, args.seed, jobs, progress)
            : clsel::run_table3(plan, args.seed, jobs, progress);
    clsel::write_bench_outputs(args.out_dir, result);
  }
  write_json_atomic(args.out_dir + "/manifest.json", manifest);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

int run_oracle_g0(const std::string& mask_str, double rho, int d_star) {
  const clsel::ComponentMask mask = clsel::ComponentMask::from_string(mask_str);
  const double value = clsel::g0_common_location(mask, rho, d_star);
  json out{{"mask", mask.to_string()}, {"g0", value}};
  std::cout << out.dump() << "\n";
  return kExitOk;
}

int run_oracle_g0_optimum(int d, int d_star, double rho, bool enumerate) {
  json out;
  if (enumerate) {
    const auto [mask, value] = clsel::brute_force_optimum(
        [&](const clsel::ComponentMask& m) {
          return clsel::g0_common_location(m, rho, d_star);
        },
        d);
    out = {{"mask", mask.to_string()}, {"g0", value}, {"method", "enumeration"}};
  } else {
    const auto structure = clsel::optimal_g0_structure(d, d_star, rho);
    const auto mask = clsel::structure_mask(d, d_star, structure.uncorrelated,
                                            structure.correlated);
    out = {{"mask", mask.to_string()},
           {"g0", clsel::g0_common_location(mask, rho, d_star)},
           {"uncorrelated", structure.uncorrelated},
           {"correlated", structure.correlated},
           {"method", "structure-scan"}};
  }
  std::cout << out.dump() << "\n";
  return kExitOk;
}

int run_oracle_brute_force(const std::string& data_path,
                           const std::string& model, const std::string& gamma,
                           double lambda, int group_size, std::uint64_t seed) {
  const clsel::Dataset data = clsel::read_dataset_csv(data_path);
  std::unique_ptr<clsel::SubLikelihoodFamily> family;
  if (model == "common-location") {
    family = std::make_unique<clsel::CommonLocationFamily>(data);
  } else if (model == "exchangeable") {
    family = std::make_unique<clsel::ExchangeablePairFamily>(data);
  } else if (model == "ordinal") {
    if (gamma.empty())
      throw ParameterError("key 'gamma' is required for the ordinal model");
    family = std::make_unique<clsel::OrdinalProbitFamily>(
        data, gamma_from_list(parse_double_list(gamma, "gamma"), data.d()));
  } else {
    throw ParameterError(
        "key 'model': expected common-location, exchangeable or ordinal");
  }

  clsel::EstimatorConfig est;
  est.jackknife_group_size = group_size;
  est.group_shuffle_seed = clsel::RandomStream::derive_seed(seed, 0xD1CE);
  clsel::MaskObjectiveEvaluator evaluator(*family, est);
  const auto [mask, value] = clsel::brute_force_optimum(
      [&](const clsel::ComponentMask& m) {
        return evaluator.evaluate(m) + lambda * m.count();
      },
      family->component_count());
  json out{{"mask", mask.to_string()},
           {"objective", value},
           {"lambda", lambda}};
  std::cout << out.dump() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composite likelihood selection by Gibbs sampling"};
  app.set_version_flag("--version", std::string("clsel ") + clsel::kVersion);
  app.require_subcommand(1);

  // simulate ---------------------------------------------------------------
  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a model dataset");
  simulate->add_option("--model", sim.model,
                       "common-location | exchangeable | ordinal");
  simulate->add_option("--spec", sim.spec_path, "Flat key=value spec file");
  simulate->add_option("--d", sim.d, "Variable count");
  simulate->add_option("--d-star", sim.d_star, "Correlated block size");
  simulate->add_option("--rho", sim.rho, "Correlation parameter");
  simulate->add_option("--mu", sim.mu, "Common location (common-location)");
  simulate->add_option("--theta", sim.theta, "Group effect (ordinal)");
  simulate->add_option("--gamma", sim.gamma,
                       "Threshold list: 2 or 2*d comma-separated values");
  simulate->add_option("--case-fraction", sim.case_fraction,
                       "Fraction of case observations (ordinal)");
  simulate->add_option("--latent-rho", sim.latent_rho,
                       "Exchangeable latent correlation (ordinal)");
  simulate->add_option("--n", sim.n, "Observation count");
  auto* sim_seed = simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--out", sim.out, "Output CSV path")->required();

  // select -----------------------------------------------------------------
  SelectArgs sel;
  auto* select =
      app.add_subcommand("select", "Run composite likelihood selection");
  select->add_option("--data", sel.data_path, "Dataset CSV")->required();
  select->add_option("--model", sel.model,
                     "common-location | exchangeable | ordinal")
      ->required();
  select->add_option("--algorithm", sel.algorithm, "cls1 | cls2")->required();
  select->add_option("--gamma", sel.gamma, "Thresholds (ordinal model)");
  select->add_option("--tau", sel.tau, "Gibbs temperature (default: d)");
  select->add_option("--sweeps", sel.sweeps, "Chain length T (default: 10*d)");
  select->add_option("--xi", sel.xi, "Threshold-rule cutoff (default 0.7)");
  select->add_option("--burn-in", sel.burn_in,
                     "Control-chart reference length N (default: T/2)");
  select->add_option("--chart-b", sel.chart_b,
                     "Control-chart constant b (default sqrt(10))");
  select->add_option("--init-active", sel.initial_active,
                     "Active components in the initial mask (default 5)");
  select->add_flag("--freq-all-sweeps", sel.freq_all_sweeps,
                   "Compute selection frequencies over all sweeps");
  select->add_option("--alpha", sel.alpha,
                     "PCER level for cls2 (default 0.1)");
  select->add_option("--lambda", sel.lambda,
                     "Complexity penalty for cls2 (default 1 = AIC)");
  select->add_flag("--stability-exclude-burn-in",
                   sel.stability_exclude_burn_in,
                   "Exclude burn-in from the stability frequencies");
  select->add_option("--k", sel.group_size,
                     "Delete-k jackknife group size (default 1)");
  select->add_option("--ridge", sel.ridge, "Scatter ridge epsilon");
  select->add_option("--theta-policy", sel.theta_policy,
                     "per-mask | pilot (default per-mask)");
  select->add_option("--inner", sel.inner,
                     "Jackknife inner matrix: sensitivity | score-outer");
  select->add_option("--root-tol", sel.root_tol, "Newton convergence tolerance");
  select->add_option("--max-iter", sel.max_iter, "Newton iteration cap");
  select->add_option("--seed", sel.seed, "RNG seed (default 0)");
  select->add_option("--cache-cap", sel.cache_cap,
                     "LRU bound on the objective cache (0 = unbounded)");
  select->add_option("--out", sel.out, "Report JSON path")->required();
  select->add_option("--trace", sel.trace_path, "Trace CSV path");

  // bench ------------------------------------------------------------------
  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a Monte Carlo plan");
  bench_cmd->add_option("--plan", bench.plan_path, "Plan file")->required();
  bench_cmd->add_option("--seed", bench.seed, "Base seed")->required();
  bench_cmd->add_option("--out-dir", bench.out_dir, "Output directory")
      ->required();
  bench_cmd->add_option("--jobs", bench.jobs,
                        "Parallel replicate workers (default: cores)");

  // oracle -----------------------------------------------------------------
  auto* oracle = app.add_subcommand("oracle", "Analytic and brute-force oracles");
  oracle->require_subcommand(1);

  std::string oracle_mask;
  double oracle_rho = 0.0;
  int oracle_d_star = 0;
  auto* g0 = oracle->add_subcommand("g0", "Analytic location-model objective");
  g0->add_option("--mask", oracle_mask, "Mask bitstring")->required();
  g0->add_option("--rho", oracle_rho, "Block correlation")->required();
  g0->add_option("--d-star", oracle_d_star, "Correlated block size")
      ->required();

  int opt_d = 0, opt_d_star = 0;
  double opt_rho = 0.0;
  bool opt_enumerate = false;
  auto* g0_opt = oracle->add_subcommand("g0-optimum",
                                        "Minimizer of the analytic objective");
  g0_opt->add_option("--d", opt_d, "Variable count")->required();
  g0_opt->add_option("--d-star", opt_d_star, "Correlated block size")
      ->required();
  g0_opt->add_option("--rho", opt_rho, "Block correlation")->required();
  g0_opt->add_flag("--enumerate", opt_enumerate,
                   "Scan all masks instead of structures (d <= 20)");

  std::string bf_data, bf_model, bf_gamma;
  double bf_lambda = 0.0;
  int bf_k = 1;
  std::uint64_t bf_seed = 0;
  auto* bf = oracle->add_subcommand(
      "brute-force", "Exhaustive argmin of the jackknife objective");
  bf->add_option("--data", bf_data, "Dataset CSV")->required();
  bf->add_option("--model", bf_model, "Model family")->required();
  bf->add_option("--gamma", bf_gamma, "Thresholds (ordinal)");
  bf->add_option("--lambda", bf_lambda, "Complexity penalty");
  bf->add_option("--k", bf_k, "Delete-k group size");
  bf->add_option("--seed", bf_seed, "Seed for the delete-k permutation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (simulate->parsed()) {
      sim.seed_given = sim_seed->count() > 0;
      return run_simulate(sim);
    }
    if (select->parsed()) return run_select(sel);
    if (bench_cmd->parsed()) return run_bench(bench);
    if (oracle->parsed()) {
      if (g0->parsed()) return run_oracle_g0(oracle_mask, oracle_rho, oracle_d_star);
      if (g0_opt->parsed())
        return run_oracle_g0_optimum(opt_d, opt_d_star, opt_rho, opt_enumerate);
      if (bf->parsed())
        return run_oracle_brute_force(bf_data, bf_model, bf_gamma, bf_lambda,
                                      bf_k, bf_seed);
    }
    std::cerr << "clsel: no command given\n";
    return kExitInput;
  } catch (const ParameterError& e) {
    std::cerr << "clsel: " << e.what() << "\n";
    return kExitInput;
  } catch (const clsel::NumericalError& e) {
    std::cerr << "clsel: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "clsel: " << e.what() << "\n";
    return kExitInput;
  }
}
