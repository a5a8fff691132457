#pragma once

#include <optional>

#include <Eigen/Core>

#include "clsel/mask.hpp"
#include "clsel/sampler.hpp"

namespace clsel {

struct StabilityConfig {
  double alpha = 0.1;   // nominal per-comparison error rate
  double lambda = 1.0;  // complexity penalty level (1 = AIC)
  // Step 2' as printed averages over all T sweeps; setting this excludes the
  // burn-in segment instead (documented deviation).
  bool exclude_burn_in = false;
  // Forces the stability cutoff instead of the PCER-calibrated one; with
  // lambda = 0 this reproduces the plain threshold rule on the same trace.
  std::optional<double> threshold_override;

  void validate() const;
};

// PCER-calibrated stability cutoff: xi = (eta_hat / (alpha M^2) + 1) / 2.
// Values above 1 are returned as-is; no component can pass and the stable set
// is empty.
double pcer_threshold(double eta_hat, int component_count, double alpha);

struct StabilityReport {
  double eta_hat = 0.0;  // mean active-component count per sweep
  double xi_hat = 0.0;
  ComponentMask stable_mask;
  // Expected-false-selection bound eta / ((2 xi - 1) M) at the realized
  // cutoff; equals alpha * M by construction. NaN when xi <= 0.5.
  double ev_bound = 0.0;
  Eigen::VectorXd frequencies;
  bool threshold_exceeds_one = false;
  bool used_override = false;
  int window_from = 0;
  int window_to = 0;
};

StabilityReport stability_select(const ChainTrace& trace,
                                 const StabilityConfig& cfg);

}  // namespace clsel
