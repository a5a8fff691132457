#include "clsel/models/common_location.hpp"

#include <sstream>

#include <Eigen/Cholesky>

#include "clsel/errors.hpp"
#include "clsel/random.hpp"

namespace clsel {

void CommonLocationSpec::validate() const {
  if (d < 1) throw ParameterError("common-location: d must be >= 1");
  if (d_star < 0 || d_star > d)
    throw ParameterError("common-location: need 0 <= d_star <= d");
  if (d_star >= 2) {
    const double lower = -1.0 / (d_star - 1);
    if (rho >= 1.0 || rho <= lower) {
      std::ostringstream msg;
      msg << "common-location: rho must lie in (" << lower
          << ", 1) for a positive definite covariance, got " << rho;
      throw ParameterError(msg.str());
    }
  }
}

Eigen::MatrixXd CommonLocationSpec::covariance() const {
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(d, d);
  for (int l = 0; l < d_star; ++l)
    for (int m = 0; m < d_star; ++m)
      if (l != m) sigma(l, m) = rho;
  return sigma;
}

Dataset simulate_common_location(const CommonLocationSpec& spec, int n,
                                 std::uint64_t seed) {
  spec.validate();
  if (n < 2) throw ParameterError("simulate: n must be >= 2");

  Eigen::LLT<Eigen::MatrixXd> llt(spec.covariance());
  if (llt.info() != Eigen::Success)
    throw ParameterError("common-location: covariance is not positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();

  RandomStream rng(seed);
  Dataset data;
  data.observations.resize(n, spec.d);
  Eigen::VectorXd z(spec.d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < spec.d; ++j) z(j) = rng.normal();
    data.observations.row(i) =
        (Eigen::VectorXd::Constant(spec.d, spec.mu) + chol * z).transpose();
  }
  return data;
}

CommonLocationFamily::CommonLocationFamily(Dataset data)
    : data_(std::move(data)) {
  data_.validate(false);
  column_means_ = data_.observations.colwise().mean();
}

std::string CommonLocationFamily::component_label(int m) const {
  if (m < static_cast<int>(data_.column_names.size()))
    return data_.column_names[m];
  return "x" + std::to_string(m + 1);
}

Eigen::VectorXd CommonLocationFamily::initial_theta() const {
  Eigen::VectorXd t(1);
  t(0) = column_means_.mean();
  return t;
}

void CommonLocationFamily::score(const Eigen::VectorXd& theta, int i, int m,
                                 double* out) const {
  out[0] = data_.observations(i, m) - theta(0);
}

void CommonLocationFamily::sensitivity(const Eigen::VectorXd&, int, int,
                                       double* out) const {
  out[0] = 1.0;  // -d/dmu (X - mu)
}

Eigen::VectorXd CommonLocationFamily::closed_form_mcle(
    const ComponentMask& mask) const {
  if (mask.size() != component_count())
    throw ParameterError("mask length does not match component count");
  if (!mask.any())
    throw ParameterError("degenerate mask: no active components");
  double sum = 0.0;
  int active = 0;
  for (int m = 0; m < component_count(); ++m) {
    if (mask.test(m)) {
      sum += column_means_(m);
      ++active;
    }
  }
  Eigen::VectorXd t(1);
  t(0) = sum / active;
  return t;
}

}  // namespace clsel
