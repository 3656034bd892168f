#pragma once

// Data-driven choice of beta: minimize squared bias against a pilot estimate
// plus the trace of the estimated variance, then move the pilot to the winner
// and repeat until it settles.

#include <optional>
#include <string>
#include <vector>

#include "robalt/dpd_estimation.hpp"

namespace robalt {

std::vector<double> default_beta_grid();

struct TuningConfig {
    std::vector<double> beta_grid = default_beta_grid();
    /// Stop once the pilot moves less than this in (a0, a1, log eta).
    double epsilon = 1e-4;
    int max_rounds = 20;
    /// Defaults to the componentwise mean of the grid estimates.
    std::optional<ModelParams> pilot;
    /// beta is overwritten per grid point.
    FitConfig fit;
    unsigned threads = 1;
};

struct MsePoint {
    double beta = 0.0;
    double mse = 0.0;
    double variance = 0.0;  ///< trace term alone
    bool used = true;       ///< false when the fit failed and was excluded
};

struct TuningResult {
    double beta_opt = 0.0;
    ModelParams theta_opt;
    FitResult fit_opt;
    int rounds = 0;
    bool pilot_converged = false;
    ModelParams initial_pilot;
    std::vector<MsePoint> mse_curve;  ///< against the pilot of the final round
    std::vector<std::string> warnings;
};

/// |theta_hat - pilot|^2 + trace(Sigma) / n.
double estimated_mse(const FitResult& fit, const ModelParams& pilot, double n);

TuningResult select_beta(const StressPlan& plan, const IntervalData& data, const TuningConfig& config);

/// The iteration on precomputed grid fits (fits[i] belongs to beta_grid[i];
/// nullopt marks a failed fit). The fits do not depend on the pilot, so only
/// the pilot update is iterated.
TuningResult select_beta_from_fits(const std::vector<std::optional<FitResult>>& fits, const TuningConfig& config,
                                   double n);

}  // namespace robalt
