#pragma once

#include <cstdint>

#include "clsel/dataset.hpp"
#include "clsel/family.hpp"

namespace clsel {

// Latent-Gaussian ordinal model for three-level categorical variables with a
// binary group covariate: Z^{(i)} ~ N_d(theta * x^{(i)} * 1, R) and
// Y_k = 0/1/2 according to whether Z_k falls below gamma_{k1}, between the
// thresholds, or above gamma_{k2}. Thresholds may be +/- infinity.
struct OrdinalProbitSpec {
  int d = 1;
  double theta = 0.0;
  Eigen::MatrixX2d gamma;      // d x 2, gamma(k,0) < gamma(k,1)
  double case_fraction = 0.5;  // fraction of observations with x = 1

  void validate() const;
};

// The latent correlation matrix R is used only for data generation; pass the
// identity for independent SNPs. Cases come first: x^{(i)} = 1 for
// i < round(case_fraction * n).
Dataset simulate_ordinal(const OrdinalProbitSpec& spec, int n,
                         std::uint64_t seed,
                         const Eigen::MatrixXd& latent_correlation);

// One-wise probit components, one per variable (M = d). In the default
// profile mode the thresholds are fixed nuisance values and p = 1 (theta
// only); controls contribute zero score since their latent mean does not
// depend on theta. With joint_thresholds = true the parameter vector becomes
// (theta, gamma_11, gamma_12, ..., gamma_d1, gamma_d2) with p = 1 + 2d,
// intended for full-mask threshold pre-estimation (masked runs leave the
// inactive components' thresholds unidentified).
class OrdinalProbitFamily : public SubLikelihoodFamily {
 public:
  OrdinalProbitFamily(Dataset data, Eigen::MatrixX2d gamma,
                      bool joint_thresholds = false);

  int component_count() const override { return data_.d(); }
  int param_dim() const override { return joint_ ? 1 + 2 * data_.d() : 1; }
  int observation_count() const override { return data_.n(); }
  std::string component_label(int m) const override;

  Eigen::VectorXd initial_theta() const override;
  void clamp(Eigen::VectorXd& theta) const override;
  void score(const Eigen::VectorXd& theta, int i, int m,
             double* out) const override;
  bool has_sensitivity() const override { return !joint_; }
  void sensitivity(const Eigen::VectorXd& theta, int i, int m,
                   double* out) const override;

  // One-wise log-likelihood contribution of observation i, component m; used
  // by finite-difference checks.
  double log_likelihood_term(const Eigen::VectorXd& theta, int i, int m) const;

  bool joint_thresholds() const { return joint_; }
  const Dataset& data() const { return data_; }

 private:
  struct Interval {
    double lower, upper;  // z-scale bounds before mean shift
  };
  Interval interval(const Eigen::VectorXd& theta, int i, int m) const;
  double threshold(const Eigen::VectorXd& theta, int m, int which) const;

  Dataset data_;
  Eigen::MatrixX2d gamma_;
  bool joint_;
};

}  // namespace clsel
