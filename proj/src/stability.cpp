#include "clsel/stability.hpp"

#include <cmath>

#include "clsel/errors.hpp"
#include "clsel/math.hpp"

namespace clsel {

void StabilityConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ParameterError("alpha must lie in (0, 1)");
  if (lambda < 0.0) throw ParameterError("lambda must be >= 0");
  if (threshold_override.has_value() &&
      !(*threshold_override > 0.5 && *threshold_override < 1.0))
    throw ParameterError("threshold override must lie in (0.5, 1)");
}

double pcer_threshold(double eta_hat, int component_count, double alpha) {
  if (eta_hat < 0.0) throw ParameterError("eta_hat must be >= 0");
  if (component_count < 1) throw ParameterError("M must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ParameterError("alpha must lie in (0, 1)");
  const double m = component_count;
  return 0.5 * (eta_hat / (alpha * m * m) + 1.0);
}

StabilityReport stability_select(const ChainTrace& trace,
                                 const StabilityConfig& cfg) {
  cfg.validate();
  if (trace.masks.empty()) throw ParameterError("empty chain trace");

  const int from = cfg.exclude_burn_in ? trace.burn_in : 0;
  const int to = trace.sweeps();

  StabilityReport report;
  report.window_from = from;
  report.window_to = to;
  report.frequencies = component_frequencies(trace, from, to);
  report.eta_hat = report.frequencies.sum();

  const int m_count = static_cast<int>(report.frequencies.size());
  if (cfg.threshold_override.has_value()) {
    report.xi_hat = *cfg.threshold_override;
    report.used_override = true;
  } else {
    report.xi_hat = pcer_threshold(report.eta_hat, m_count, cfg.alpha);
  }
  report.threshold_exceeds_one = report.xi_hat > 1.0;

  report.stable_mask = ComponentMask(m_count);
  if (!report.threshold_exceeds_one) {
    for (int m = 0; m < m_count; ++m)
      report.stable_mask.set(m, report.frequencies(m) >= report.xi_hat);
  }

  const double denom = (2.0 * report.xi_hat - 1.0) * m_count;
  report.ev_bound = denom > 0.0 ? report.eta_hat / denom : kNaN;
  return report;
}

}  // namespace clsel
