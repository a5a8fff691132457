#include "clsel/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "clsel/errors.hpp"

namespace clsel {

void SamplerConfig::validate() const {
  if (!(tau > 0.0)) throw ParameterError("tau must be positive");
  if (sweeps < 1) throw ParameterError("sweep count T must be >= 1");
  if (!(xi > 0.5 && xi < 1.0))
    throw ParameterError("xi must lie in (0.5, 1)");
  if (!(chart_b > 1.0)) throw ParameterError("control-chart b must be > 1");
  const int n_ref = resolved_burn_in();
  if (n_ref < 1 || n_ref >= sweeps)
    throw ParameterError("burn-in N must satisfy 1 <= N < T");
  if (initial_active < 1)
    throw ParameterError("initial active count must be >= 1");
}

double conditional_probability(double g_bit0, double g_bit1, double tau) {
  const bool inf0 = std::isinf(g_bit0) && g_bit0 > 0;
  const bool inf1 = std::isinf(g_bit1) && g_bit1 > 0;
  if (inf0 && inf1)
    throw DegenerateStateError("both Gibbs candidates have infinite objective");
  if (inf1) return 0.0;
  if (inf0) return 1.0;
  const double x = tau * (g_bit1 - g_bit0);
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(x));
  return 1.0 - 1.0 / (1.0 + std::exp(-x));
}

CachedMaskObjective::CachedMaskObjective(ComputeFn compute, double lambda,
                                         std::size_t capacity)
    : compute_(std::move(compute)), lambda_(lambda), capacity_(capacity) {
  if (lambda < 0.0) throw ParameterError("lambda must be >= 0");
}

ObjectiveValue CachedMaskObjective::get(const ComponentMask& mask) {
  double g;
  {
    std::unique_lock<std::mutex> lock(mutex_);
    auto it = entries_.find(mask);
    if (it != entries_.end()) {
      ++stats_.hits;
      if (capacity_ > 0) {
        lru_.splice(lru_.begin(), lru_, it->second.lru_pos);
        it->second.lru_pos = lru_.begin();
      }
      g = it->second.g;
      ObjectiveValue v;
      v.g = g;
      v.penalty = lambda_ * mask.count();
      return v;
    }
    lock.unlock();
    g = compute_(mask);
    lock.lock();

    it = entries_.find(mask);
    if (it == entries_.end()) {
      ++stats_.misses;
      if (!std::isfinite(g)) ++stats_.failures;
      Entry entry;
      entry.g = g;
      if (capacity_ > 0) {
        lru_.push_front(mask);
        entry.lru_pos = lru_.begin();
      }
      entries_.emplace(mask, entry);
      if (capacity_ > 0 && entries_.size() > capacity_) {
        entries_.erase(lru_.back());
        lru_.pop_back();
        ++stats_.evictions;
      }
      const double total = g + lambda_ * mask.count();
      if (!has_best_ || total < best_g_ + lambda_ * best_mask_.count()) {
        has_best_ = true;
        best_mask_ = mask;
        best_g_ = g;
      }
    } else {
      ++stats_.hits;
      g = it->second.g;
    }
    stats_.entries = entries_.size();
  }
  ObjectiveValue v;
  v.g = g;
  v.penalty = lambda_ * mask.count();
  return v;
}

CacheStats CachedMaskObjective::stats() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return stats_;
}

bool CachedMaskObjective::has_best() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return has_best_;
}

ComponentMask CachedMaskObjective::best_mask() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return best_mask_;
}

ObjectiveValue CachedMaskObjective::best_value() const {
  std::lock_guard<std::mutex> lock(mutex_);
  ObjectiveValue v;
  v.g = best_g_;
  v.penalty = lambda_ * best_mask_.count();
  return v;
}

ComponentMask gibbs_sweep(const ComponentMask& current,
                          CachedMaskObjective& objective, double tau,
                          RandomStream& rng) {
  ComponentMask state = current;
  const int m_count = state.size();
  for (int m = 0; m < m_count; ++m) {
    ComponentMask candidate0 = state;
    candidate0.set(m, false);
    ComponentMask candidate1 = state;
    candidate1.set(m, true);
    const ObjectiveValue v0 = objective.get(candidate0);
    const ObjectiveValue v1 = objective.get(candidate1);
    // The complexity penalty acts as a prior over masks and enters the
    // kernel untempered: the exponent is tau * (g1 - g0) + (pen1 - pen0),
    // folded into the tau-scaled difference below.
    const double p1 = conditional_probability(v0.g + v0.penalty / tau,
                                              v1.g + v1.penalty / tau, tau);
    state.set(m, rng.bernoulli(p1));
  }
  return state;
}

ChainTrace run_chain(CachedMaskObjective& objective, int component_count,
                     const SamplerConfig& cfg) {
  cfg.validate();
  RandomStream rng(cfg.seed);

  const int k0 = std::min(cfg.initial_active, component_count);
  ComponentMask state = ComponentMask::from_indices(
      component_count, rng.sample_without_replacement(component_count, k0));

  ChainTrace trace;
  trace.initial_mask = state;
  trace.lambda = objective.lambda();
  trace.burn_in = cfg.resolved_burn_in();
  trace.frequencies_use_all_sweeps = cfg.frequencies_use_all_sweeps;
  trace.masks.reserve(cfg.sweeps);
  trace.g.reserve(cfg.sweeps);
  trace.g_total.reserve(cfg.sweeps);

  objective.get(state);  // g(w^(0)), recorded in the cache
  for (int t = 0; t < cfg.sweeps; ++t) {
    state = gibbs_sweep(state, objective, cfg.tau, rng);
    const ObjectiveValue v = objective.get(state);
    trace.masks.push_back(state);
    trace.g.push_back(v.g);
    trace.g_total.push_back(v.total());
  }

  trace.cache_stats = objective.stats();
  if (objective.has_best()) {
    trace.has_best_evaluated = true;
    trace.best_evaluated_mask = objective.best_mask();
    const ObjectiveValue best = objective.best_value();
    trace.best_evaluated_g = best.g;
    trace.best_evaluated_total = best.total();
  }
  return trace;
}

ChainTrace run_chain(const SubLikelihoodFamily& family,
                     const SamplerConfig& cfg, const EstimatorConfig& est_cfg) {
  MaskObjectiveEvaluator evaluator(family, est_cfg);
  CachedMaskObjective objective(
      [&evaluator](const ComponentMask& mask) {
        return evaluator.evaluate(mask);
      },
      est_cfg.penalty_lambda, cfg.cache_capacity);
  return run_chain(objective, family.component_count(), cfg);
}

Eigen::VectorXd component_frequencies(const ChainTrace& trace, int from,
                                      int to) {
  if (trace.masks.empty()) throw ParameterError("empty chain trace");
  from = std::max(from, 0);
  to = std::min(to, trace.sweeps());
  if (from >= to) throw ParameterError("empty frequency window");
  const int m_count = trace.masks.front().size();
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(m_count);
  for (int t = from; t < to; ++t) {
    for (int m = 0; m < m_count; ++m) {
      if (trace.masks[t].test(m)) freq(m) += 1.0;
    }
  }
  freq /= (to - from);
  return freq;
}

Eigen::VectorXd selection_frequencies(const ChainTrace& trace) {
  const int from = trace.frequencies_use_all_sweeps ? 0 : trace.burn_in;
  return component_frequencies(trace, from, trace.sweeps());
}

MinSelection select_min(const ChainTrace& trace) {
  MinSelection best;
  for (int t = 0; t < trace.sweeps(); ++t) {
    if (trace.g_total[t] < best.total) {
      best.total = trace.g_total[t];
      best.g = trace.g[t];
      best.mask = trace.masks[t];
      best.sweep_index = t;
    }
  }
  if (best.sweep_index < 0)
    throw NumericalError("no recorded state with finite objective");
  return best;
}

MinSelection select_min_evaluated(const ChainTrace& trace) {
  MinSelection best;
  if (trace.has_best_evaluated &&
      std::isfinite(trace.best_evaluated_total)) {
    best.mask = trace.best_evaluated_mask;
    best.g = trace.best_evaluated_g;
    best.total = trace.best_evaluated_total;
    best.sweep_index = -1;
  }
  for (int t = 0; t < trace.sweeps(); ++t) {
    if (trace.g_total[t] < best.total) {
      best.total = trace.g_total[t];
      best.g = trace.g[t];
      best.mask = trace.masks[t];
      best.sweep_index = t;
    }
  }
  if (!std::isfinite(best.total))
    throw NumericalError("no evaluated state with finite objective");
  return best;
}

std::vector<ComponentMask> min_tie_set(const ChainTrace& trace, double tol) {
  const MinSelection best = select_min(trace);
  std::vector<ComponentMask> ties;
  for (int t = 0; t < trace.sweeps(); ++t) {
    if (trace.g_total[t] <= best.total + tol) {
      if (std::find(ties.begin(), ties.end(), trace.masks[t]) == ties.end())
        ties.push_back(trace.masks[t]);
    }
  }
  return ties;
}

ComponentMask select_threshold(const ChainTrace& trace, double xi) {
  if (!(xi > 0.5 && xi < 1.0))
    throw ParameterError("xi must lie in (0.5, 1)");
  const Eigen::VectorXd freq = selection_frequencies(trace);
  ComponentMask mask(static_cast<int>(freq.size()));
  for (int m = 0; m < freq.size(); ++m) mask.set(m, freq(m) >= xi);
  return mask;
}

ControlChartDiagnostic control_chart(const std::vector<double>& objectives,
                                     double b, int reference_n) {
  if (!(b > 1.0)) throw ParameterError("control-chart b must be > 1");
  if (reference_n < 1 || reference_n >= static_cast<int>(objectives.size()))
    throw ParameterError("control chart needs 1 <= N < T");

  ControlChartDiagnostic out;
  out.b = b;

  double sum = 0.0;
  double min_v = kInf;
  int finite = 0;
  for (int t = 0; t < reference_n; ++t) {
    const double v = objectives[t];
    if (!std::isfinite(v)) continue;
    ++finite;
    sum += v;
    min_v = std::min(min_v, v);
  }
  if (finite < 2) return out;  // diagnostic unavailable

  const double mean = sum / finite;
  double ss = 0.0;
  for (int t = 0; t < reference_n; ++t) {
    const double v = objectives[t];
    if (!std::isfinite(v)) continue;
    ss += (v - mean) * (v - mean);
  }
  const double variance = ss / (finite - 1);

  out.available = true;
  out.reference_min = min_v;
  out.reference_mean = mean;
  out.reference_variance = variance;
  out.reference_count = finite;
  out.limit =
      min_v + std::sqrt(b * b * variance + b * b * (mean - min_v) * (mean - min_v));

  int exceed = 0;
  const int tail = static_cast<int>(objectives.size()) - reference_n;
  for (int t = reference_n; t < static_cast<int>(objectives.size()); ++t) {
    if (objectives[t] > out.limit) ++exceed;
  }
  out.exceed_fraction = static_cast<double>(exceed) / tail;
  out.equilibrium_ok = out.exceed_fraction <= 1.0 / (b * b);
  return out;
}

ControlChartDiagnostic control_chart(const ChainTrace& trace, double b) {
  return control_chart(trace.g_total, b, trace.burn_in);
}

}  // namespace clsel
