#include "clsel/models/ordinal_probit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "clsel/errors.hpp"
#include "clsel/math.hpp"
#include "clsel/random.hpp"

namespace clsel {

namespace {

constexpr double kProbFloor = 1e-300;

// Phi(upper - mu) - Phi(lower - mu), evaluated through whichever tail keeps
// the erfc argument well conditioned.
double interval_probability(double lower, double upper, double mu) {
  const double a = lower - mu;
  const double b = upper - mu;
  double d;
  if (a + b > 0.0) {
    d = normal_cdf(-a) - normal_cdf(-b);
  } else {
    d = normal_cdf(b) - normal_cdf(a);
  }
  if (!(d >= kProbFloor))
    throw NumericalError("ordinal model: category probability underflow");
  return d;
}

}  // namespace

void OrdinalProbitSpec::validate() const {
  if (d < 1) throw ParameterError("ordinal: d must be >= 1");
  if (gamma.rows() != d)
    throw ParameterError("ordinal: gamma must have one threshold pair per SNP");
  for (int k = 0; k < d; ++k) {
    if (!(gamma(k, 0) < gamma(k, 1)))
      throw ParameterError("ordinal: need gamma_k1 < gamma_k2 for every SNP");
  }
  if (case_fraction < 0.0 || case_fraction > 1.0)
    throw ParameterError("ordinal: case_fraction must lie in [0, 1]");
  if (!std::isfinite(theta)) throw ParameterError("ordinal: theta must be finite");
}

Dataset simulate_ordinal(const OrdinalProbitSpec& spec, int n,
                         std::uint64_t seed,
                         const Eigen::MatrixXd& latent_correlation) {
  spec.validate();
  if (n < 2) throw ParameterError("simulate: n must be >= 2");
  if (latent_correlation.rows() != spec.d ||
      latent_correlation.cols() != spec.d)
    throw ParameterError("ordinal: latent correlation must be d x d");
  Eigen::LLT<Eigen::MatrixXd> llt(latent_correlation);
  if (llt.info() != Eigen::Success)
    throw ParameterError("ordinal: latent correlation is not positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();

  const int n_cases = static_cast<int>(std::lround(spec.case_fraction * n));
  RandomStream rng(seed);
  Dataset data;
  data.observations.resize(n, spec.d);
  Eigen::VectorXi group(n);
  Eigen::VectorXd z(spec.d);
  for (int i = 0; i < n; ++i) {
    const int x = i < n_cases ? 1 : 0;
    group(i) = x;
    for (int j = 0; j < spec.d; ++j) z(j) = rng.normal();
    Eigen::VectorXd latent =
        Eigen::VectorXd::Constant(spec.d, spec.theta * x) + chol * z;
    for (int j = 0; j < spec.d; ++j) {
      int y = 2;
      if (latent(j) <= spec.gamma(j, 0)) {
        y = 0;
      } else if (latent(j) <= spec.gamma(j, 1)) {
        y = 1;
      }
      data.observations(i, j) = y;
    }
  }
  data.group = group;
  return data;
}

OrdinalProbitFamily::OrdinalProbitFamily(Dataset data, Eigen::MatrixX2d gamma,
                                         bool joint_thresholds)
    : data_(std::move(data)), gamma_(std::move(gamma)), joint_(joint_thresholds) {
  data_.validate(true);
  if (gamma_.rows() != data_.d())
    throw ParameterError("ordinal: gamma must have one threshold pair per SNP");
  for (int k = 0; k < data_.d(); ++k) {
    if (!(gamma_(k, 0) < gamma_(k, 1)))
      throw ParameterError("ordinal: need gamma_k1 < gamma_k2 for every SNP");
  }
}

std::string OrdinalProbitFamily::component_label(int m) const {
  if (m < static_cast<int>(data_.column_names.size()))
    return data_.column_names[m];
  return "x" + std::to_string(m + 1);
}

Eigen::VectorXd OrdinalProbitFamily::initial_theta() const {
  Eigen::VectorXd t = Eigen::VectorXd::Zero(param_dim());
  if (joint_) {
    for (int k = 0; k < data_.d(); ++k) {
      t(1 + 2 * k) = std::isfinite(gamma_(k, 0)) ? gamma_(k, 0) : -8.0;
      t(2 + 2 * k) = std::isfinite(gamma_(k, 1)) ? gamma_(k, 1) : 8.0;
    }
  }
  return t;
}

void OrdinalProbitFamily::clamp(Eigen::VectorXd& theta) const {
  theta(0) = std::clamp(theta(0), -30.0, 30.0);
  if (!joint_) return;
  for (int k = 0; k < data_.d(); ++k) {
    double& g1 = theta(1 + 2 * k);
    double& g2 = theta(2 + 2 * k);
    g1 = std::clamp(g1, -30.0, 30.0);
    g2 = std::clamp(g2, -30.0, 30.0);
    if (g1 > g2 - 1e-4) {
      const double mid = 0.5 * (g1 + g2);
      g1 = mid - 5e-5;
      g2 = mid + 5e-5;
    }
  }
}

double OrdinalProbitFamily::threshold(const Eigen::VectorXd& theta, int m,
                                      int which) const {
  return joint_ ? theta(1 + 2 * m + which) : gamma_(m, which);
}

OrdinalProbitFamily::Interval OrdinalProbitFamily::interval(
    const Eigen::VectorXd& theta, int i, int m) const {
  const int y = static_cast<int>(data_.observations(i, m));
  switch (y) {
    case 0:
      return {-kInf, threshold(theta, m, 0)};
    case 1:
      return {threshold(theta, m, 0), threshold(theta, m, 1)};
    default:
      return {threshold(theta, m, 1), kInf};
  }
}

void OrdinalProbitFamily::score(const Eigen::VectorXd& theta, int i, int m,
                                double* out) const {
  const int p = param_dim();
  std::fill(out, out + p, 0.0);
  const int x = (*data_.group)(i);
  const auto [lower, upper] = interval(theta, i, m);
  const double mu = theta(0) * x;

  if (!joint_) {
    if (x == 0) return;  // latent mean does not depend on theta for controls
    const double d = interval_probability(lower, upper, mu);
    out[0] = (normal_pdf(lower - mu) - normal_pdf(upper - mu)) / d;
    return;
  }

  const double d = interval_probability(lower, upper, mu);
  const int y = static_cast<int>(data_.observations(i, m));
  if (x != 0) out[0] = x * (normal_pdf(lower - mu) - normal_pdf(upper - mu)) / d;
  switch (y) {
    case 0:
      out[1 + 2 * m] = normal_pdf(upper - mu) / d;
      break;
    case 1:
      out[1 + 2 * m] = -normal_pdf(lower - mu) / d;
      out[2 + 2 * m] = normal_pdf(upper - mu) / d;
      break;
    default:
      out[2 + 2 * m] = -normal_pdf(lower - mu) / d;
      break;
  }
}

void OrdinalProbitFamily::sensitivity(const Eigen::VectorXd& theta, int i,
                                      int m, double* out) const {
  if (joint_)
    throw NumericalError("joint ordinal mode has no analytic sensitivity");
  const int x = (*data_.group)(i);
  out[0] = 0.0;
  if (x == 0) return;
  const auto [lower, upper] = interval(theta, i, m);
  const double mu = theta(0) * x;
  const double a = lower - mu;
  const double b = upper - mu;
  const double d = interval_probability(lower, upper, mu);
  const double numer = normal_pdf(a) - normal_pdf(b);
  // -d(score)/dtheta for x in {0,1}.
  out[0] = (numer * numer - (z_times_pdf(a) - z_times_pdf(b)) * d) / (d * d);
}

double OrdinalProbitFamily::log_likelihood_term(const Eigen::VectorXd& theta,
                                                int i, int m) const {
  const int x = (*data_.group)(i);
  const auto [lower, upper] = interval(theta, i, m);
  return std::log(interval_probability(lower, upper, theta(0) * x));
}

}  // namespace clsel
