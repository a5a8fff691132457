#include "clsel/models/exchangeable.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

#include "clsel/errors.hpp"
#include "clsel/random.hpp"

namespace clsel {

void ExchangeableSpec::validate() const {
  if (d < 2) throw ParameterError("exchangeable: d must be >= 2");
  if (rho < 0.0 || rho >= 1.0)
    throw ParameterError("exchangeable: rho must lie in [0, 1)");
}

Dataset simulate_exchangeable(const ExchangeableSpec& spec, int n,
                              std::uint64_t seed) {
  spec.validate();
  if (n < 2) throw ParameterError("simulate: n must be >= 2");

  Eigen::MatrixXd sigma =
      (1.0 - spec.rho) * Eigen::MatrixXd::Identity(spec.d, spec.d) +
      spec.rho * Eigen::MatrixXd::Ones(spec.d, spec.d);
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw ParameterError("exchangeable: covariance is not positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();

  RandomStream rng(seed);
  Dataset data;
  data.observations.resize(n, spec.d);
  Eigen::VectorXd z(spec.d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < spec.d; ++j) z(j) = rng.normal();
    data.observations.row(i) = (chol * z).transpose();
  }
  return data;
}

int pair_count(int d) { return d * (d - 1) / 2; }

std::vector<std::pair<int, int>> enumerate_pairs(int d) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(pair_count(d));
  for (int l = 0; l < d; ++l)
    for (int k = l + 1; k < d; ++k) pairs.emplace_back(l, k);
  return pairs;
}

namespace {
void check_rho(double rho) {
  if (std::abs(rho) >= 1.0)
    throw ParameterError("pairwise score: |rho| must be < 1");
}
}  // namespace

ExchangeablePairFamily::ExchangeablePairFamily(Dataset data)
    : data_(std::move(data)), pairs_(enumerate_pairs(data_.d())) {
  data_.validate(false);
  if (data_.d() < 2) throw ParameterError("pairwise family needs d >= 2");

  // Moment starting point: average off-diagonal sample correlation.
  const int n = data_.n();
  Eigen::RowVectorXd mean = data_.observations.colwise().mean();
  Eigen::MatrixXd centered = data_.observations.rowwise() - mean;
  Eigen::VectorXd sd =
      (centered.array().square().colwise().sum() / (n - 1)).sqrt();
  double acc = 0.0;
  for (const auto& [l, k] : pairs_) {
    const double cov = centered.col(l).dot(centered.col(k)) / (n - 1);
    const double denom = sd(l) * sd(k);
    if (denom > 0) acc += cov / denom;
  }
  initial_rho_ = std::clamp(acc / pairs_.size(), -0.5, 0.95);
}

std::string ExchangeablePairFamily::component_label(int m) const {
  const auto& [l, k] = pairs_.at(m);
  std::ostringstream s;
  s << "(" << (l + 1) << "," << (k + 1) << ")";
  return s.str();
}

Eigen::VectorXd ExchangeablePairFamily::initial_theta() const {
  Eigen::VectorXd t(1);
  t(0) = initial_rho_;
  return t;
}

void ExchangeablePairFamily::clamp(Eigen::VectorXd& theta) const {
  theta(0) = std::clamp(theta(0), -1.0 + 1e-9, 1.0 - 1e-9);
}

void ExchangeablePairFamily::score(const Eigen::VectorXd& theta, int i, int m,
                                   double* out) const {
  const double rho = theta(0);
  check_rho(rho);
  const auto& [l, k] = pairs_[m];
  const double xl = data_.observations(i, l);
  const double xk = data_.observations(i, k);
  out[0] = (1.0 + rho * rho) * xl * xk - rho * (xl * xl + xk * xk) +
           rho * (1.0 - rho * rho);
}

void ExchangeablePairFamily::sensitivity(const Eigen::VectorXd& theta, int i,
                                         int m, double* out) const {
  const double rho = theta(0);
  check_rho(rho);
  const auto& [l, k] = pairs_[m];
  const double xl = data_.observations(i, l);
  const double xk = data_.observations(i, k);
  // -d/drho of the per-observation score.
  out[0] = xl * xl + xk * xk - 2.0 * rho * xl * xk - 1.0 + 3.0 * rho * rho;
}

double exchangeable_pair_score(double rho, const Dataset& data, int l, int k) {
  check_rho(rho);
  const int n = data.n();
  double ss_ll = 0.0, ss_kk = 0.0, ss_lk = 0.0;
  for (int i = 0; i < n; ++i) {
    const double xl = data.observations(i, l);
    const double xk = data.observations(i, k);
    ss_ll += xl * xl;
    ss_kk += xk * xk;
    ss_lk += xl * xk;
  }
  return (1.0 + rho * rho) * ss_lk - rho * (ss_ll + ss_kk) +
         n * rho * (1.0 - rho * rho);
}

}  // namespace clsel
