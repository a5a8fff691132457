#pragma once

#include <string>

#include <Eigen/Core>

#include "clsel/mask.hpp"

namespace clsel {

using RowMajorMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Per-observation, per-component score vectors U_m^{(i)}(theta), laid out as
// an n x (M*p) row-major matrix with the p entries of component m in the
// column block [m*p, (m+1)*p).
struct ScoreTensor {
  RowMajorMatrixXd values;
  int n = 0;
  int components = 0;  // M
  int param_dim = 0;   // p
  Eigen::VectorXd theta_at;

  Eigen::Map<const Eigen::VectorXd> score(int i, int m) const {
    return Eigen::Map<const Eigen::VectorXd>(
        values.row(i).data() + static_cast<std::ptrdiff_t>(m) * param_dim,
        param_dim);
  }

  // Sum over observations and active components of the masked score.
  Eigen::VectorXd aggregate(const ComponentMask& mask) const;

  // Row i = sum over active components of U_m^{(i)}; n x p.
  Eigen::MatrixXd per_observation_masked(const ComponentMask& mask) const;
};

// A set of M sub-likelihood components over a fixed dataset, each exposing an
// unbiased per-observation score. Implementations own a copy of the data they
// need and are immutable after construction, so score evaluation is a pure
// function and safe to call concurrently.
class SubLikelihoodFamily {
 public:
  virtual ~SubLikelihoodFamily() = default;

  virtual int component_count() const = 0;     // M
  virtual int param_dim() const = 0;           // p
  virtual int observation_count() const = 0;   // n
  virtual std::string component_label(int m) const = 0;

  // Default Newton starting point; callers may override.
  virtual Eigen::VectorXd initial_theta() const = 0;

  // Projects theta back into the admissible parameter domain (no-op when the
  // domain is all of R^p).
  virtual void clamp(Eigen::VectorXd& /*theta*/) const {}

  // U_m^{(i)}(theta) into out[0..p).
  virtual void score(const Eigen::VectorXd& theta, int i, int m,
                     double* out) const = 0;

  // Sensitivity contribution -d U_m^{(i)} / d theta' (p x p, row-major) when
  // available in closed form; drives exact Newton steps for the solver and
  // the one-step jackknife.
  virtual bool has_sensitivity() const { return false; }
  virtual void sensitivity(const Eigen::VectorXd& theta, int i, int m,
                           double* out) const;

  // Which one-step inner matrix this family's jackknife objective should use
  // by default; families whose reference treatment is the plain outer-product
  // update override this.
  virtual bool prefers_score_outer_product() const { return false; }

  virtual bool has_closed_form_mcle() const { return false; }
  virtual Eigen::VectorXd closed_form_mcle(const ComponentMask& mask) const;

  // Bulk evaluation of all scores at theta.
  ScoreTensor scores(const Eigen::VectorXd& theta) const;
};

}  // namespace clsel
