#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "clsel/dataset.hpp"
#include "clsel/family.hpp"

namespace clsel {

// N_d(0, (1-rho) I + rho 11') with exchangeable correlation rho in [0, 1).
struct ExchangeableSpec {
  int d = 2;
  double rho = 0.0;

  void validate() const;
};

Dataset simulate_exchangeable(const ExchangeableSpec& spec, int n,
                              std::uint64_t seed);

// Pair enumeration in lexicographic order (0,1), (0,2), ..., (d-2,d-1).
int pair_count(int d);
std::vector<std::pair<int, int>> enumerate_pairs(int d);

// Pairwise components for the exchangeable model: M = d(d-1)/2, p = 1. The
// per-observation score for pair (l,k) is
//   u = (1 + rho^2) x_l x_k - rho (x_l^2 + x_k^2) + rho (1 - rho^2),
// which sums over observations to the cubic aggregate score
//   U_lk = (1 + rho^2) SS_lk - rho (SS_ll + SS_kk) + n rho (1 - rho^2).
class ExchangeablePairFamily : public SubLikelihoodFamily {
 public:
  explicit ExchangeablePairFamily(Dataset data);

  int component_count() const override {
    return static_cast<int>(pairs_.size());
  }
  int param_dim() const override { return 1; }
  int observation_count() const override { return data_.n(); }
  std::string component_label(int m) const override;

  Eigen::VectorXd initial_theta() const override;
  void clamp(Eigen::VectorXd& theta) const override;
  void score(const Eigen::VectorXd& theta, int i, int m,
             double* out) const override;
  bool has_sensitivity() const override { return true; }
  void sensitivity(const Eigen::VectorXd& theta, int i, int m,
                   double* out) const override;
  // The one-step pseudo-values for this model are defined through the plain
  // outer-product inner matrix.
  bool prefers_score_outer_product() const override { return true; }

  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  const Dataset& data() const { return data_; }

 private:
  Dataset data_;
  std::vector<std::pair<int, int>> pairs_;
  double initial_rho_ = 0.0;
};

// Aggregate pairwise score U_lk(rho) over the whole sample; the [l] and [k]
// indices are zero-based column indices with l < k.
double exchangeable_pair_score(double rho, const Dataset& data, int l, int k);

}  // namespace clsel
