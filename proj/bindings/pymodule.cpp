#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "clsel/dataset.hpp"
#include "clsel/errors.hpp"
#include "clsel/harness.hpp"
#include "clsel/models/common_location.hpp"
#include "clsel/models/exchangeable.hpp"
#include "clsel/models/ordinal_probit.hpp"
#include "clsel/selection.hpp"
#include "clsel/version.hpp"

namespace py = pybind11;

namespace {

using clsel::ComponentMask;

Eigen::MatrixX2d gamma_matrix(const Eigen::MatrixXd& gamma, int d) {
  if (gamma.cols() != 2 || gamma.rows() != d)
    throw clsel::ParameterError("gamma must be a (d, 2) array");
  return gamma;
}

py::object json_to_py(const nlohmann::json& j) {
  const py::module_ json_mod = py::module_::import("json");
  return json_mod.attr("loads")(j.dump());
}

clsel::Dataset dataset_from_arrays(const Eigen::MatrixXd& observations,
                                   const std::optional<Eigen::VectorXi>& group) {
  clsel::Dataset data;
  data.observations = observations;
  if (group.has_value()) data.group = *group;
  return data;
}

py::dict select_impl(const Eigen::MatrixXd& observations,
                     const std::optional<Eigen::VectorXi>& group,
                     const std::string& model, const std::string& algorithm,
                     const std::optional<Eigen::MatrixXd>& gamma, double tau,
                     int sweeps, double xi, double alpha, double lambda,
                     int jackknife_k, std::uint64_t seed) {
  const clsel::Dataset data = dataset_from_arrays(observations, group);
  std::unique_ptr<clsel::SubLikelihoodFamily> family;
  if (model == "common-location") {
    family = std::make_unique<clsel::CommonLocationFamily>(data);
  } else if (model == "exchangeable") {
    family = std::make_unique<clsel::ExchangeablePairFamily>(data);
  } else if (model == "ordinal") {
    if (!gamma.has_value())
      throw clsel::ParameterError("gamma is required for the ordinal model");
    family = std::make_unique<clsel::OrdinalProbitFamily>(
        data, gamma_matrix(*gamma, data.d()));
  } else {
    throw clsel::ParameterError(
        "model must be common-location, exchangeable or ordinal");
  }

  clsel::SamplerConfig sampler;
  sampler.tau = tau > 0 ? tau : data.d();
  sampler.sweeps = sweeps > 0 ? sweeps : 10 * data.d();
  sampler.xi = xi;
  sampler.seed = seed;

  clsel::EstimatorConfig est;
  est.jackknife_group_size = jackknife_k;
  est.group_shuffle_seed = clsel::RandomStream::derive_seed(seed, 0xD1CE);

  clsel::StabilityConfig stability;
  stability.alpha = alpha;
  stability.lambda = lambda;

  const clsel::SelectionOutcome outcome = clsel::run_selection(
      *family, clsel::algorithm_from_string(algorithm), sampler, est,
      stability);
  const nlohmann::json report = clsel::selection_report_json(
      outcome, *family, sampler, est, stability);
  return json_to_py(report);
}

}  // namespace

PYBIND11_MODULE(_clsel, m) {
  m.doc() = "Composite likelihood selection by Gibbs sampling (C++ core)";
  m.attr("__version__") = clsel::kVersion;

  py::register_exception<clsel::ParameterError>(m, "ParameterError",
                                                PyExc_ValueError);
  py::register_exception<clsel::NumericalError>(m, "NumericalError",
                                                PyExc_RuntimeError);

  m.def(
      "simulate_common_location",
      [](int d, int d_star, double rho, double mu, int n, std::uint64_t seed) {
        clsel::CommonLocationSpec spec{d, d_star, rho, mu};
        return clsel::simulate_common_location(spec, n, seed).observations;
      },
      py::arg("d"), py::arg("d_star"), py::arg("rho"), py::arg("mu"),
      py::arg("n"), py::arg("seed"),
      "Draws n observations from the block-correlated common-location model.");

  m.def(
      "simulate_exchangeable",
      [](int d, double rho, int n, std::uint64_t seed) {
        clsel::ExchangeableSpec spec{d, rho};
        return clsel::simulate_exchangeable(spec, n, seed).observations;
      },
      py::arg("d"), py::arg("rho"), py::arg("n"), py::arg("seed"),
      "Draws n observations from the exchangeable-correlation model.");

  m.def(
      "simulate_ordinal",
      [](int d, double theta, const Eigen::MatrixXd& gamma,
         double case_fraction, double latent_rho, int n, std::uint64_t seed) {
        clsel::OrdinalProbitSpec spec;
        spec.d = d;
        spec.theta = theta;
        spec.gamma = gamma_matrix(gamma, d);
        spec.case_fraction = case_fraction;
        const Eigen::MatrixXd r =
            (1.0 - latent_rho) * Eigen::MatrixXd::Identity(d, d) +
            latent_rho * Eigen::MatrixXd::Ones(d, d);
        const clsel::Dataset data = clsel::simulate_ordinal(spec, n, seed, r);
        return py::make_tuple(data.observations, *data.group);
      },
      py::arg("d"), py::arg("theta"), py::arg("gamma"),
      py::arg("case_fraction"), py::arg("latent_rho"), py::arg("n"),
      py::arg("seed"),
      "Simulates ordinal SNP-style data; returns (observations, group).");

  m.def("select", &select_impl, py::arg("observations"),
        py::arg("group") = std::nullopt, py::arg("model") = "common-location",
        py::arg("algorithm") = "cls1", py::arg("gamma") = std::nullopt,
        py::arg("tau") = -1.0, py::arg("sweeps") = -1, py::arg("xi") = 0.7,
        py::arg("alpha") = 0.1, py::arg("lambda_") = 1.0, py::arg("k") = 1,
        py::arg("seed") = 0,
        "Runs cls1/cls2 selection and returns the report as a dict.");

  m.def(
      "g0_common_location",
      [](const std::string& mask, double rho, int d_star) {
        return clsel::g0_common_location(ComponentMask::from_string(mask), rho,
                                         d_star);
      },
      py::arg("mask"), py::arg("rho"), py::arg("d_star"),
      "Analytic location-model objective for a mask bitstring.");

  m.def(
      "g0_optimal_structure",
      [](int d, int d_star, double rho) {
        const auto s = clsel::optimal_g0_structure(d, d_star, rho);
        return py::make_tuple(s.uncorrelated, s.correlated);
      },
      py::arg("d"), py::arg("d_star"), py::arg("rho"),
      "Optimal (uncorrelated, correlated) active counts for the analytic "
      "objective.");

  m.def(
      "pcer_threshold",
      [](double eta_hat, int m, double alpha) {
        return clsel::pcer_threshold(eta_hat, m, alpha);
      },
      py::arg("eta_hat"), py::arg("m"), py::arg("alpha"),
      "Stability cutoff (eta / (alpha M^2) + 1) / 2.");

  m.def(
      "conditional_probability",
      [](double g0, double g1, double tau) {
        return clsel::conditional_probability(g0, g1, tau);
      },
      py::arg("g_bit0"), py::arg("g_bit1"), py::arg("tau"),
      "Gibbs Bernoulli conditional P(w_m = 1).");

  m.def(
      "hamming_distance",
      [](const std::string& a, const std::string& b) {
        return clsel::hamming_distance(ComponentMask::from_string(a),
                                       ComponentMask::from_string(b));
      },
      py::arg("a"), py::arg("b"));
}
