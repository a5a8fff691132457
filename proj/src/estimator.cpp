#include "clsel/estimator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "clsel/errors.hpp"
#include "clsel/random.hpp"

namespace clsel {

void EstimatorConfig::validate(int n) const {
  if (root_tol <= 0.0) throw ParameterError("root_tol must be positive");
  if (max_iter < 1) throw ParameterError("max_iter must be >= 1");
  if (jackknife_group_size < 1 || jackknife_group_size >= n)
    throw ParameterError("jackknife group size k must satisfy 1 <= k < n");
  if (penalty_lambda < 0.0) throw ParameterError("lambda must be >= 0");
  if (ridge < 0.0) throw ParameterError("ridge must be >= 0");
}

Eigen::VectorXd JackknifeSet::standard_errors() const {
  const int groups = static_cast<int>(pseudo_values.rows());
  const double k_eff = static_cast<double>(n_observations) / groups;
  const double factor = (n_observations - k_eff) / (k_eff * groups);
  return (factor * scatter.diagonal().array()).sqrt();
}

JackknifeInnerMatrix resolve_inner_matrix(const EstimatorConfig& cfg,
                                          const SubLikelihoodFamily& family) {
  switch (cfg.inner_matrix) {
    case JackknifeInnerMatrix::kSensitivity:
      if (!family.has_sensitivity())
        throw ParameterError(
            "family provides no analytic sensitivities; use score-outer");
      return JackknifeInnerMatrix::kSensitivity;
    case JackknifeInnerMatrix::kScoreOuterProduct:
      return JackknifeInnerMatrix::kScoreOuterProduct;
    default:
      return family.has_sensitivity() && !family.prefers_score_outer_product()
                 ? JackknifeInnerMatrix::kSensitivity
                 : JackknifeInnerMatrix::kScoreOuterProduct;
  }
}

std::vector<std::vector<int>> jackknife_groups(int n, int k,
                                               std::uint64_t shuffle_seed) {
  if (k < 1 || k >= n)
    throw ParameterError("jackknife group size k must satisfy 1 <= k < n");
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  if (k > 1) {
    RandomStream rng(shuffle_seed);
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.bounded(i + 1));
      std::swap(order[i], order[j]);
    }
  }
  const int n_groups = n / k;
  const int remainder = n % k;
  std::vector<std::vector<int>> groups(n_groups);
  int pos = 0;
  for (int g = 0; g < n_groups; ++g) {
    const int size = k + (g < remainder ? 1 : 0);
    groups[g].assign(order.begin() + pos, order.begin() + pos + size);
    pos += size;
  }
  return groups;
}

namespace {

// Masked aggregate score and its magnitude (sum of |entries| over all terms),
// used for the relative convergence test.
void aggregate_score(const SubLikelihoodFamily& family,
                     const ComponentMask& mask, const Eigen::VectorXd& theta,
                     Eigen::VectorXd& score_out, double& scale_out) {
  const int p = family.param_dim();
  const int n = family.observation_count();
  score_out.setZero(p);
  scale_out = 0.0;
  Eigen::VectorXd u(p);
  for (int m = 0; m < family.component_count(); ++m) {
    if (!mask.test(m)) continue;
    for (int i = 0; i < n; ++i) {
      family.score(theta, i, m, u.data());
      score_out += u;
      scale_out += u.cwiseAbs().sum();
    }
  }
}

void aggregate_inner(const SubLikelihoodFamily& family,
                     const ComponentMask& mask, const Eigen::VectorXd& theta,
                     bool use_sensitivity, Eigen::MatrixXd& inner_out) {
  const int p = family.param_dim();
  const int n = family.observation_count();
  inner_out.setZero(p, p);
  Eigen::VectorXd u(p);
  RowMajorMatrixXd s(p, p);
  for (int m = 0; m < family.component_count(); ++m) {
    if (!mask.test(m)) continue;
    for (int i = 0; i < n; ++i) {
      if (use_sensitivity) {
        family.sensitivity(theta, i, m, s.data());
        inner_out += s;
      } else {
        family.score(theta, i, m, u.data());
        inner_out += u * u.transpose();
      }
    }
  }
}

Eigen::VectorXd solve_linear(const Eigen::MatrixXd& a,
                             const Eigen::VectorXd& b) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible())
    throw SingularMatrixError("singular Jacobian surrogate in Newton step");
  return lu.solve(b);
}

}  // namespace

Eigen::VectorXd solve_mcle(const SubLikelihoodFamily& family,
                           const ComponentMask& mask,
                           const Eigen::VectorXd& theta_init,
                           const EstimatorConfig& cfg) {
  if (mask.size() != family.component_count())
    throw ParameterError("mask length does not match component count");
  if (!mask.any())
    throw ParameterError("degenerate mask: no active components");
  if (family.has_closed_form_mcle()) return family.closed_form_mcle(mask);

  const bool use_sens = family.has_sensitivity();
  Eigen::VectorXd theta = theta_init;
  family.clamp(theta);

  Eigen::VectorXd score;
  double scale = 0.0;
  aggregate_score(family, mask, theta, score, scale);
  double norm = score.norm();
  Eigen::MatrixXd inner;

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    if (norm <= cfg.root_tol * (1.0 + scale)) return theta;
    aggregate_inner(family, mask, theta, use_sens, inner);
    const Eigen::VectorXd step = solve_linear(inner, score);

    // Backtrack until the score norm no longer increases.
    double alpha = 1.0;
    Eigen::VectorXd candidate;
    Eigen::VectorXd cand_score;
    double cand_scale = 0.0;
    double cand_norm = kInf;
    for (int halvings = 0; halvings < 30; ++halvings) {
      candidate = theta + alpha * step;
      family.clamp(candidate);
      aggregate_score(family, mask, candidate, cand_score, cand_scale);
      cand_norm = cand_score.norm();
      if (cand_norm < norm || alpha < 1.0 / (1 << 20)) break;
      alpha *= 0.5;
    }
    theta = candidate;
    score = cand_score;
    scale = cand_scale;
    norm = cand_norm;
  }
  if (norm <= cfg.root_tol * (1.0 + scale)) return theta;
  throw NonConvergenceError("Newton did not converge within max_iter", theta,
                            norm);
}

JackknifeSet one_step_pseudo_values(
    const SubLikelihoodFamily& family, const ComponentMask& mask,
    const Eigen::VectorXd& theta_tilde, const EstimatorConfig& cfg,
    const std::vector<std::vector<int>>& groups) {
  if (mask.size() != family.component_count())
    throw ParameterError("mask length does not match component count");
  if (!mask.any())
    throw ParameterError("degenerate mask: no active components");
  const int p = family.param_dim();
  const int n = family.observation_count();
  const auto active = mask.active();

  const bool use_sens =
      resolve_inner_matrix(cfg, family) == JackknifeInnerMatrix::kSensitivity;

  // Per-observation masked score rows and inner-matrix contributions; group
  // quantities are then totals minus the deleted rows, so the cost is linear
  // in the number of active components.
  RowMajorMatrixXd obs_score = RowMajorMatrixXd::Zero(n, p);
  RowMajorMatrixXd obs_inner = RowMajorMatrixXd::Zero(n, p * p);
  Eigen::VectorXd u(p);
  RowMajorMatrixXd s(p, p);
  for (int m : active) {
    for (int i = 0; i < n; ++i) {
      family.score(theta_tilde, i, m, u.data());
      obs_score.row(i) += u.transpose();
      if (use_sens) {
        family.sensitivity(theta_tilde, i, m, s.data());
        obs_inner.row(i) += Eigen::Map<const Eigen::RowVectorXd>(s.data(), p * p);
      } else {
        s = u * u.transpose();
        obs_inner.row(i) += Eigen::Map<const Eigen::RowVectorXd>(s.data(), p * p);
      }
    }
  }
  const Eigen::RowVectorXd total_score = obs_score.colwise().sum();
  const Eigen::RowVectorXd total_inner = obs_inner.colwise().sum();

  const int n_groups = static_cast<int>(groups.size());
  JackknifeSet jk;
  jk.pseudo_values.resize(n_groups, p);
  jk.group_size = cfg.jackknife_group_size;
  jk.n_observations = n;

  Eigen::VectorXd group_score(p);
  Eigen::MatrixXd group_inner(p, p);
  for (int g = 0; g < n_groups; ++g) {
    if (n - static_cast<int>(groups[g].size()) < p)
      throw ParameterError("each delete group must leave at least p observations");
    Eigen::RowVectorXd sc = total_score;
    Eigen::RowVectorXd in = total_inner;
    for (int i : groups[g]) {
      sc -= obs_score.row(i);
      in -= obs_inner.row(i);
    }
    group_score = sc.transpose();
    group_inner =
        Eigen::Map<const RowMajorMatrixXd>(in.data(), p, p);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(group_inner);
    if (!lu.isInvertible())
      throw SingularMatrixError("singular inner matrix in one-step jackknife");
    jk.pseudo_values.row(g) =
        (theta_tilde + lu.solve(group_score)).transpose();
  }

  jk.mean = jk.pseudo_values.colwise().mean().transpose();
  Eigen::MatrixXd centered =
      jk.pseudo_values.rowwise() - jk.mean.transpose();
  jk.scatter = centered.transpose() * centered;
  return jk;
}

ObjectiveValue g_hat(const JackknifeSet& jk, double ridge) {
  const int p = static_cast<int>(jk.scatter.rows());
  if (jk.pseudo_values.rows() < p + 1)
    throw ParameterError("g_hat needs at least p + 1 pseudo-values");
  Eigen::MatrixXd a = jk.scatter;
  if (ridge > 0.0) a += ridge * Eigen::MatrixXd::Identity(p, p);

  ObjectiveValue out;
  out.penalty = 0.0;
  if (p == 1) {
    out.g = a(0, 0) > 0.0 ? std::log(a(0, 0)) : kInf;
    return out;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    out.g = kInf;
    return out;
  }
  double logdet = 0.0;
  const auto& l = llt.matrixLLT();
  for (int j = 0; j < p; ++j) {
    if (l(j, j) <= 0.0) {
      out.g = kInf;
      return out;
    }
    logdet += 2.0 * std::log(l(j, j));
  }
  out.g = logdet;
  return out;
}

ObjectiveValue g_hat_penalized(const ObjectiveValue& g,
                               const ComponentMask& mask, double lambda) {
  ObjectiveValue out = g;
  out.penalty = lambda * mask.count();
  return out;
}

SandwichEstimate sandwich_variance(const SubLikelihoodFamily& family,
                                   const ComponentMask& mask,
                                   const Eigen::VectorXd& theta_hat) {
  if (!mask.any())
    throw ParameterError("degenerate mask: no active components");
  const int p = family.param_dim();
  const int n = family.observation_count();
  const ScoreTensor tensor = family.scores(theta_hat);

  SandwichEstimate est;
  est.h_hat = Eigen::MatrixXd::Zero(p, p);
  for (int m = 0; m < family.component_count(); ++m) {
    if (!mask.test(m)) continue;
    for (int i = 0; i < n; ++i) {
      const auto u = tensor.score(i, m);
      est.h_hat += u * u.transpose();
    }
  }
  est.h_hat /= (n - 1);

  const Eigen::MatrixXd per_obs = tensor.per_observation_masked(mask);
  est.k_hat = per_obs.transpose() * per_obs / n;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(est.h_hat);
  if (!lu.isInvertible())
    throw SingularMatrixError("singular H-hat in sandwich variance");
  const Eigen::MatrixXd h_inv_k = lu.solve(est.k_hat);
  est.v_hat = lu.solve(h_inv_k.transpose()).transpose();
  return est;
}

double g0_common_location(const ComponentMask& mask, double rho, int d_star) {
  const int total = mask.count();
  if (total == 0)
    throw ParameterError("g0 is undefined for the all-zero mask");
  if (d_star < 0 || d_star > mask.size())
    throw ParameterError("need 0 <= d_star <= mask length");
  int correlated = 0;
  for (int m = 0; m < d_star; ++m)
    if (mask.test(m)) ++correlated;
  const double pairs = 0.5 * correlated * (correlated - 1);
  return std::log(total + 2.0 * rho * pairs) - 2.0 * std::log(total);
}

MaskObjectiveEvaluator::MaskObjectiveEvaluator(
    const SubLikelihoodFamily& family, EstimatorConfig cfg)
    : family_(family), cfg_(cfg) {
  cfg_.validate(family.observation_count());
  groups_ = jackknife_groups(family.observation_count(),
                             cfg_.jackknife_group_size, cfg_.group_shuffle_seed);
  warm_theta_ = family.initial_theta();
  if (cfg_.theta_policy == ThetaTildePolicy::kFixedPilot) {
    const int pilot = std::min(cfg_.pilot_components, family.component_count());
    ComponentMask pilot_mask(family.component_count());
    for (int m = 0; m < pilot; ++m) pilot_mask.set(m, true);
    pilot_theta_ = solve_mcle(family_, pilot_mask, warm_theta_, cfg_);
  }
}

double MaskObjectiveEvaluator::evaluate(const ComponentMask& mask) {
  if (!mask.any()) return kInf;
  try {
    Eigen::VectorXd theta_tilde;
    if (cfg_.theta_policy == ThetaTildePolicy::kFixedPilot) {
      theta_tilde = *pilot_theta_;
    } else {
      theta_tilde = solve_mcle(family_, mask, warm_theta_, cfg_);
      warm_theta_ = theta_tilde;
    }
    const JackknifeSet jk =
        one_step_pseudo_values(family_, mask, theta_tilde, cfg_, groups_);
    return g_hat(jk, cfg_.ridge).g;
  } catch (const NumericalError&) {
    return kInf;
  }
}

std::optional<MaskObjectiveEvaluator::MaskFit> MaskObjectiveEvaluator::fit(
    const ComponentMask& mask) {
  if (!mask.any()) return std::nullopt;
  try {
    MaskFit out;
    out.theta = solve_mcle(family_, mask, warm_theta_, cfg_);
    out.jackknife =
        one_step_pseudo_values(family_, mask, out.theta, cfg_, groups_);
    out.g = g_hat(out.jackknife, cfg_.ridge).g;
    return out;
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

}  // namespace clsel
