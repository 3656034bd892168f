#pragma once

// Simulation engine: multinomial data generation, one-cell contamination and
// per-beta metric tables (RMSE, MSE of lifetime characteristics, interval
// coverage, empirical level and power of the slope test).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "robalt/ce_model.hpp"

namespace robalt {

/// xoshiro256** seeded through splitmix64. A (seed, stream) pair fully
/// determines the sequence, so replication r always sees the same draws.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);
    std::uint64_t next();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

private:
    std::uint64_t s_[4];
};

/// Replace pi_cell (1-based) by G_tilde(t_cell) - G_tilde(t_cell-1) and
/// renormalize. Cells outside 2..L are allowed; `warning` (if given) is set.
std::vector<double> contaminate(const std::vector<double>& pi, const ModelParams& params_tilde,
                                const StressPlan& plan, std::size_t cell, std::string* warning = nullptr);

/// One multinomial draw of n devices, each placed by inverse cdf.
IntervalData simulate_counts(const std::vector<double>& pi, std::int64_t n, Rng& rng);

enum class ContaminatedParam { none, a0, a1, eta };
std::string to_string(ContaminatedParam p);
ContaminatedParam parse_contaminated_param(const std::string& s);

struct ScenarioSpec {
    std::string name = "scenario";
    StressPlan plan{{30.0, 40.0}, {18.0, 52.0}, {6, 10, 14, 18, 20, 24, 28, 32, 36, 40, 44, 48, 52}};
    ModelParams theta_true{5.3, -0.05, 1.5};
    /// Data for the power column come from this model (contaminated the same way).
    std::optional<ModelParams> theta_alternative;
    ContaminatedParam contaminated_param = ContaminatedParam::none;
    /// Values of the contaminated parameter; one block of rows per value.
    std::vector<double> contamination_values;
    std::size_t contaminated_cell = 3;
    int replications = 500;
    std::uint64_t seed = 20240601;
    std::int64_t n_devices = 200;
    std::vector<double> beta_grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    /// Append a row using the data-driven beta of each replication.
    bool include_optimal = false;
    double eval_x0 = 20.0;
    double eval_t = 40.0;
    double conf = 0.95;
    /// Slope value under the null of the Wald test (level and power columns).
    double test_a1 = -0.05;
    double test_alpha = 0.05;
    int fit_multistart = 5;
    unsigned threads = 1;
};

struct MetricRow {
    std::string scenario;
    std::string contaminated_param;
    double contamination_value = 0.0;
    std::string beta_label;
    double beta = 0.0;  ///< NaN for the data-driven row
    int replications = 0;
    int failures = 0;
    double failure_rate = 0.0;
    bool unreliable = false;
    double rmse_theta = 0.0, rmse_theta_se = 0.0;
    double rmse_a0 = 0.0, rmse_a1 = 0.0, rmse_eta = 0.0;
    double mse_reliability = 0.0, mse_reliability_se = 0.0;
    double mse_mean = 0.0, mse_mean_se = 0.0;
    double cov_direct_rel = 0.0, cov_direct_rel_se = 0.0;
    double cov_transformed_rel = 0.0, cov_transformed_rel_se = 0.0;
    double cov_direct_mean = 0.0, cov_direct_mean_se = 0.0;
    double cov_transformed_mean = 0.0, cov_transformed_mean_se = 0.0;
    double level = 0.0, level_se = 0.0;
    double power = 0.0, power_se = 0.0;  ///< NaN without an alternative
    double mean_selected_beta = 0.0;     ///< NaN except on the data-driven row
};

struct MetricsTable {
    std::vector<MetricRow> rows;

    static const std::vector<std::string>& columns();
    /// Fixed column order, full precision, no metadata.
    std::string to_csv() const;
    const MetricRow* find(double contamination_value, const std::string& beta_label) const;
};

std::string beta_label(double beta);

MetricsTable run_scenario(const ScenarioSpec& spec);

}  // namespace robalt
