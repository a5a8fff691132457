#include "clsel/family.hpp"

#include "clsel/errors.hpp"

namespace clsel {

Eigen::VectorXd ScoreTensor::aggregate(const ComponentMask& mask) const {
  if (mask.size() != components)
    throw ParameterError("mask length does not match component count");
  Eigen::VectorXd total = Eigen::VectorXd::Zero(param_dim);
  for (int m = 0; m < components; ++m) {
    if (!mask.test(m)) continue;
    for (int i = 0; i < n; ++i) total += score(i, m);
  }
  return total;
}

Eigen::MatrixXd ScoreTensor::per_observation_masked(
    const ComponentMask& mask) const {
  if (mask.size() != components)
    throw ParameterError("mask length does not match component count");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, param_dim);
  for (int m = 0; m < components; ++m) {
    if (!mask.test(m)) continue;
    for (int i = 0; i < n; ++i) out.row(i) += score(i, m).transpose();
  }
  return out;
}

void SubLikelihoodFamily::sensitivity(const Eigen::VectorXd&, int, int,
                                      double*) const {
  throw NumericalError("family does not provide analytic sensitivities");
}

Eigen::VectorXd SubLikelihoodFamily::closed_form_mcle(
    const ComponentMask&) const {
  throw NumericalError("family does not provide a closed-form solver");
}

ScoreTensor SubLikelihoodFamily::scores(const Eigen::VectorXd& theta) const {
  ScoreTensor t;
  t.n = observation_count();
  t.components = component_count();
  t.param_dim = param_dim();
  t.theta_at = theta;
  t.values.resize(t.n, static_cast<std::ptrdiff_t>(t.components) * t.param_dim);
  for (int i = 0; i < t.n; ++i) {
    double* row = t.values.row(i).data();
    for (int m = 0; m < t.components; ++m) {
      score(theta, i, m, row + static_cast<std::ptrdiff_t>(m) * t.param_dim);
    }
  }
  return t;
}

}  // namespace clsel
