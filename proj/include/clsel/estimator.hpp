#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "clsel/family.hpp"
#include "clsel/mask.hpp"
#include "clsel/math.hpp"

namespace clsel {

// How the pilot estimate theta-tilde for the one-step jackknife is obtained:
// re-solve the McLE for every mask (warm-started along the chain), or fix a
// single cheap pilot computed once from a small component subset.
enum class ThetaTildePolicy { kResolvePerMask, kFixedPilot };

// Inner matrix of the one-step Newton-Raphson pseudo-value update. The
// sensitivity form uses the analytic score derivative and reproduces exact
// leave-one-out estimates for linear scores; the outer-product form uses the
// information-identity surrogate sum_m w_m sum_j U U' and needs scores only.
// kFamilyDefault defers to the family's preference (the location model uses
// sensitivities, matching its closed-form jackknife; the pairwise model uses
// outer products).
enum class JackknifeInnerMatrix {
  kFamilyDefault,
  kSensitivity,
  kScoreOuterProduct
};

struct EstimatorConfig {
  double root_tol = 1e-8;  // relative to the aggregate score magnitude
  int max_iter = 60;
  int jackknife_group_size = 1;  // delete-k group size
  ThetaTildePolicy theta_policy = ThetaTildePolicy::kResolvePerMask;
  double penalty_lambda = 0.0;
  double ridge = 0.0;  // epsilon added to the scatter before the log-det
  JackknifeInnerMatrix inner_matrix = JackknifeInnerMatrix::kFamilyDefault;
  std::uint64_t group_shuffle_seed = 0;  // delete-k permutation seed
  int pilot_components = 5;              // pilot mask size for kFixedPilot

  void validate(int n) const;
};

// Extended-real objective: g may be +inf to mark a degenerate or numerically
// failed mask, and +inf propagates through the penalized total.
struct ObjectiveValue {
  double g = kInf;
  double penalty = 0.0;

  double total() const { return g + penalty; }
  bool finite() const { return std::isfinite(g); }
};

struct JackknifeSet {
  Eigen::MatrixXd pseudo_values;  // one row per delete group
  int group_size = 1;
  int n_observations = 0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd scatter;  // sum of centered outer products, p x p

  // Classical delete-k jackknife standard errors,
  // sqrt((n - k) / (k * G) * diag(scatter)); uses the average group size when
  // k does not divide n. The raw scatter itself feeds g_hat unscaled.
  Eigen::VectorXd standard_errors() const;
};

struct SandwichEstimate {
  Eigen::MatrixXd h_hat;
  Eigen::MatrixXd k_hat;
  Eigen::MatrixXd v_hat;
};

// Partition of {0..n-1} into delete-k groups: contiguous blocks of a seeded
// permutation, with the remainder spread over the first groups. k = 1 keeps
// the natural order (the permutation is irrelevant for singletons).
std::vector<std::vector<int>> jackknife_groups(int n, int k,
                                               std::uint64_t shuffle_seed);

// The inner-matrix form actually used for a (config, family) combination.
JackknifeInnerMatrix resolve_inner_matrix(const EstimatorConfig& cfg,
                                          const SubLikelihoodFamily& family);

// Root of the masked aggregate score equation, by the family's closed form
// when available and damped Newton otherwise. Throws NonConvergenceError
// (carrying the last iterate) or SingularMatrixError on failure.
Eigen::VectorXd solve_mcle(const SubLikelihoodFamily& family,
                           const ComponentMask& mask,
                           const Eigen::VectorXd& theta_init,
                           const EstimatorConfig& cfg);

// One-step Newton-Raphson pseudo-values: for each delete group I,
// theta_tilde + B_I^{-1} * sum_{j not in I} of the masked score at
// theta_tilde, where B_I is the configured inner matrix over the retained
// observations. Cost is linear in the number of active components.
JackknifeSet one_step_pseudo_values(const SubLikelihoodFamily& family,
                                    const ComponentMask& mask,
                                    const Eigen::VectorXd& theta_tilde,
                                    const EstimatorConfig& cfg,
                                    const std::vector<std::vector<int>>& groups);

// Log-determinant of the (optionally ridged) jackknife scatter; +inf when the
// scatter is numerically singular and ridge == 0.
ObjectiveValue g_hat(const JackknifeSet& jk, double ridge = 0.0);

// total = g + lambda * popcount(mask).
ObjectiveValue g_hat_penalized(const ObjectiveValue& g,
                               const ComponentMask& mask, double lambda);

// Plug-in sandwich: H_hat = (n-1)^{-1} sum_m sum_i w_m U U',
// K_hat = n^{-1} sum_i (masked aggregate score per observation) outer square,
// V_hat = H^{-1} K H^{-1}.
SandwichEstimate sandwich_variance(const SubLikelihoodFamily& family,
                                   const ComponentMask& mask,
                                   const Eigen::VectorXd& theta_hat);

// Analytic O_F objective for the common-location model, up to an
// w-independent constant: log(S + 2 rho * C(c,2)) - 2 log S with S the active
// count and c the active count inside the correlated block. Oracle use only.
double g0_common_location(const ComponentMask& mask, double rho, int d_star);

// Mask -> g-hat pipeline shared by the sampler, harness and CLI. Numerical
// failures (no root, singular inner matrix, underflow) surface as +inf, not
// exceptions; the all-zero mask is +inf by definition.
class MaskObjectiveEvaluator {
 public:
  MaskObjectiveEvaluator(const SubLikelihoodFamily& family,
                         EstimatorConfig cfg);

  // g-hat at the mask, or +inf.
  double evaluate(const ComponentMask& mask);

  struct MaskFit {
    Eigen::VectorXd theta;
    JackknifeSet jackknife;
    double g = kInf;
  };

  // Full estimate at a mask for reporting: theta-hat, pseudo-values and
  // g-hat. Returns nullopt on numerical failure or a degenerate mask.
  std::optional<MaskFit> fit(const ComponentMask& mask);

  const EstimatorConfig& config() const { return cfg_; }
  const std::vector<std::vector<int>>& groups() const { return groups_; }

 private:
  const SubLikelihoodFamily& family_;
  EstimatorConfig cfg_;
  std::vector<std::vector<int>> groups_;
  Eigen::VectorXd warm_theta_;
  std::optional<Eigen::VectorXd> pilot_theta_;
};

}  // namespace clsel
