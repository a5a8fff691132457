#pragma once

#include <cstdint>
#include <functional>
#include <list>
#include <mutex>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "clsel/estimator.hpp"
#include "clsel/mask.hpp"
#include "clsel/random.hpp"

namespace clsel {

struct SamplerConfig {
  double tau = 1.0;        // Gibbs temperature; the CLI defaults this to d
  int sweeps = 1;          // T
  int initial_active = 5;  // randomly activated components at t = 0
  double xi = 0.7;         // threshold-rule cutoff
  int burn_in = -1;        // N; -1 resolves to floor(T/2)
  double chart_b = 3.1622776601683795;  // sqrt(10): >= 90% control limit
  std::uint64_t seed = 0;
  // Step 2 as printed uses all T sweeps for the selection frequencies; the
  // default here excludes burn-in, which is the safer reading.
  bool frequencies_use_all_sweeps = false;
  std::size_t cache_capacity = 0;  // 0 = unbounded; otherwise LRU-bounded

  int resolved_burn_in() const { return burn_in < 0 ? sweeps / 2 : burn_in; }
  void validate() const;
};

// P(w_m = 1) for candidate objectives (g at bit 0, g at bit 1): the Bernoulli
// conditional 1 / (1 + exp(tau * (g1 - g0))), evaluated in the stable
// difference form so that p(g0, g1) + p(g1, g0) == 1 exactly. An infinite
// objective forces probability 0 for that side; both infinite is an error.
double conditional_probability(double g_bit0, double g_bit1, double tau);

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t failures = 0;  // evaluations that came back +inf
  std::size_t entries = 0;
  std::uint64_t evictions = 0;
};

// Memoized mask objective with atomic get-or-compute semantics, keyed on the
// mask bits. Stores the unpenalized g; the penalty is recomputed on lookup so
// one cache serves any lambda. Tracks the best evaluation ever seen (by
// penalized total), which the argmin selection rule may consult in addition
// to the recorded end-of-sweep states.
class CachedMaskObjective {
 public:
  using ComputeFn = std::function<double(const ComponentMask&)>;

  CachedMaskObjective(ComputeFn compute, double lambda,
                      std::size_t capacity = 0);

  ObjectiveValue get(const ComponentMask& mask);

  double lambda() const { return lambda_; }
  CacheStats stats() const;
  bool has_best() const;
  ComponentMask best_mask() const;
  ObjectiveValue best_value() const;

 private:
  struct Entry {
    double g;
    std::list<ComponentMask>::iterator lru_pos;
  };

  ComputeFn compute_;
  double lambda_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::unordered_map<ComponentMask, Entry, ComponentMaskHash> entries_;
  std::list<ComponentMask> lru_;  // front = most recent
  CacheStats stats_;
  bool has_best_ = false;
  ComponentMask best_mask_;
  double best_g_ = kInf;
};

// One systematic Gibbs sweep: coordinates m = 1..M updated sequentially, each
// Bernoulli draw conditioning on the freshest values of the other
// coordinates. Consumes exactly M Bernoulli draws from rng. The complexity
// penalty enters the kernel as an untempered prior, so the chain targets
// probabilities proportional to exp(-tau * g(w) - lambda * |w|); with
// lambda = 0 this is the plain exp(-tau * g(w)) distribution.
ComponentMask gibbs_sweep(const ComponentMask& current,
                          CachedMaskObjective& objective, double tau,
                          RandomStream& rng);

struct ChainTrace {
  std::vector<ComponentMask> masks;  // end-of-sweep states, length T
  std::vector<double> g;             // unpenalized g-hat per recorded state
  std::vector<double> g_total;       // penalized objective per recorded state
  ComponentMask initial_mask;
  double lambda = 0.0;
  int burn_in = 0;
  bool frequencies_use_all_sweeps = false;
  CacheStats cache_stats;
  bool has_best_evaluated = false;
  ComponentMask best_evaluated_mask;
  double best_evaluated_g = kInf;
  double best_evaluated_total = kInf;

  int sweeps() const { return static_cast<int>(masks.size()); }
};

// Runs the full chain against a prepared objective (the core used by tests
// and oracles with synthetic objectives).
ChainTrace run_chain(CachedMaskObjective& objective, int component_count,
                     const SamplerConfig& cfg);

// Convenience wrapper building the jackknife objective from a family; lambda
// comes from est_cfg.penalty_lambda (0 = unpenalized chain).
ChainTrace run_chain(const SubLikelihoodFamily& family,
                     const SamplerConfig& cfg, const EstimatorConfig& est_cfg);

// Per-component visit frequencies over sweeps [from, to).
Eigen::VectorXd component_frequencies(const ChainTrace& trace, int from,
                                      int to);
// Frequencies over the trace's default window (post-burn-in unless the trace
// was run in all-sweeps mode).
Eigen::VectorXd selection_frequencies(const ChainTrace& trace);

struct MinSelection {
  ComponentMask mask;
  double g = kInf;
  double total = kInf;
  int sweep_index = -1;  // -1 when taken from the evaluation record
};

// Earliest recorded end-of-sweep state attaining the minimum penalized
// objective. Throws NumericalError when every recorded state is infinite.
MinSelection select_min(const ChainTrace& trace);

// Same rule, but additionally considering every cached evaluation the chain
// made (never worse than select_min).
MinSelection select_min_evaluated(const ChainTrace& trace);

// All recorded masks whose penalized objective lies within tol of the
// recorded minimum (the mode set may be non-unique).
std::vector<ComponentMask> min_tie_set(const ChainTrace& trace,
                                       double tol = 1e-12);

// Threshold rule: bit m set iff its selection frequency >= xi. May return the
// all-zero mask; callers must refuse estimation in that case.
ComponentMask select_threshold(const ChainTrace& trace, double xi);

struct ControlChartDiagnostic {
  bool available = false;
  double limit = kNaN;
  double exceed_fraction = kNaN;
  bool equilibrium_ok = false;
  double reference_min = kNaN;
  double reference_mean = kNaN;
  double reference_variance = kNaN;
  int reference_count = 0;
  double b = kNaN;
};

// Chebyshev-type upper control limit from the first reference_n objectives:
// limit = g_min + sqrt(b^2 s^2 + b^2 (mean - g_min)^2). Equilibrium passes
// when at most 1/b^2 of the later objectives exceed the limit.
ControlChartDiagnostic control_chart(const std::vector<double>& objectives,
                                     double b, int reference_n);
ControlChartDiagnostic control_chart(const ChainTrace& trace, double b);

}  // namespace clsel
