#pragma once

// Density power divergence between observed and model cell proportions, the
// minimum-divergence estimator (maximum likelihood at beta = 0) and its
// sandwich covariance.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "robalt/ce_model.hpp"

namespace robalt {

/// The data cannot support an estimate (e.g. every device in one cell).
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FitConfig {
    double beta = 0.0;
    int max_iters = 500;
    double grad_tol = 1e-8;
    double param_tol = 1e-10;
    int multistart = 5;
    std::optional<ModelParams> initial;
};

struct FitResult {
    ModelParams params;
    double beta = 0.0;
    /// Per-observation covariance J^-1 K J^-1; Var(theta_hat) is this over N.
    Mat3 covariance;
    Mat3 j_matrix;
    Mat3 k_matrix;
    double objective = 0.0;
    bool converged = false;
    /// Euclidean norm of the loss gradient in (a0, a1, eta).
    double grad_norm = 0.0;
    int iterations = 0;
    std::int64_t n_devices = 0;
    double j_condition = 1.0;
    /// J was inverted through its pseudo-inverse.
    bool singular = false;
    std::vector<std::string> warnings;
};

struct SandwichMatrices {
    Mat3 j;
    Mat3 k;
};

/// Divergence of model proportions `pi` from observed `p_hat`. beta = 0 gives
/// the Kullback-Leibler divergence. pi is clamped below at 1e-12.
double dpd_loss(const std::vector<double>& p_hat, const std::vector<double>& pi, double beta);

/// W^T D_pi^(beta-1) (p_hat - pi). The loss gradient is -(beta + 1) times this.
Vec3 estimating_residual(const ModelParams& params, const StressPlan& plan, const IntervalData& data, double beta);

/// Loss value and gradient with respect to (a0, a1, eta).
double dpd_objective(const ModelParams& params, const StressPlan& plan, const std::vector<double>& p_hat,
                     double beta, Vec3* grad);

/// Starting value from the shape-one (piecewise exponential) submodel.
ModelParams initial_estimate(const StressPlan& plan, const IntervalData& data);

FitResult fit(const StressPlan& plan, const IntervalData& data, const FitConfig& config);
/// Same as fit but on a proportion vector directly (used for perturbation
/// oracles and noise-free data); `n_devices` only labels the result.
FitResult fit_proportions(const StressPlan& plan, const std::vector<double>& p_hat, std::int64_t n_devices,
                          const FitConfig& config);

SandwichMatrices sandwich_matrices(const ModelParams& params, const StressPlan& plan, double beta);

struct CovarianceResult {
    Mat3 covariance;
    double j_condition = 1.0;
    bool singular = false;
};
CovarianceResult sandwich_covariance(const ModelParams& params, const StressPlan& plan, double beta);

}  // namespace robalt
