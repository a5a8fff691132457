#pragma once

#include <cstdint>

#include "clsel/dataset.hpp"
#include "clsel/family.hpp"

namespace clsel {

// N_d(mu*1, Sigma) with unit variances, correlation rho inside the leading
// d_star x d_star block and zero elsewhere. The leading block carries the
// redundant components.
struct CommonLocationSpec {
  int d = 1;
  int d_star = 0;
  double rho = 0.0;
  double mu = 0.0;

  void validate() const;
  Eigen::MatrixXd covariance() const;
};

Dataset simulate_common_location(const CommonLocationSpec& spec, int n,
                                 std::uint64_t seed);

// One-wise components: M = d, p = 1, U_m^{(i)}(mu) = X_m^{(i)} - mu. The
// masked McLE has the closed form sum(w_m * Xbar_m) / sum(w_m).
class CommonLocationFamily : public SubLikelihoodFamily {
 public:
  explicit CommonLocationFamily(Dataset data);

  int component_count() const override { return data_.d(); }
  int param_dim() const override { return 1; }
  int observation_count() const override { return data_.n(); }
  std::string component_label(int m) const override;

  Eigen::VectorXd initial_theta() const override;
  void score(const Eigen::VectorXd& theta, int i, int m,
             double* out) const override;
  bool has_sensitivity() const override { return true; }
  void sensitivity(const Eigen::VectorXd& theta, int i, int m,
                   double* out) const override;
  bool has_closed_form_mcle() const override { return true; }
  Eigen::VectorXd closed_form_mcle(const ComponentMask& mask) const override;

  const Dataset& data() const { return data_; }
  const Eigen::RowVectorXd& column_means() const { return column_means_; }

 private:
  Dataset data_;
  Eigen::RowVectorXd column_means_;
};

}  // namespace clsel
