#pragma once

// Influence of one-cell contamination on the estimator and on Wald
// statistics, and leverage probes that push the last inspection time or the
// last stress level outward.

#include <vector>

#include "robalt/wald_tests.hpp"

namespace robalt {

struct IFReport {
    std::size_t cell = 1;  ///< 1-based; num_cells() is the survivor cell
    Vec3 if_vector{};
    double if_wald_second_order = 0.0;
    bool pseudo_inverse = false;
};

/// J^-1 W^T D_pi^(beta-1) (Delta_cell - pi) at theta0, for a point mass at `cell` (1-based).
Vec3 if_mdpde(const ModelParams& params, const StressPlan& plan, double beta, std::size_t cell);

/// 2 n IF^T M (M^T Sigma M)^-1 M^T IF at a null point; quadratic in `if_vector`.
double if_wald_from(const Vec3& if_vector, const ModelParams& params_null, const StressPlan& plan, double beta,
                    const Constraint& constraint, double n);
double if_wald(const ModelParams& params_null, const StressPlan& plan, double beta, const Constraint& constraint,
               std::size_t cell, double n);
/// 2 n m^T (M^T Sigma M)^-1 M^T IF; zero whenever m(params) = 0.
double if_wald_first_order(const ModelParams& params, const StressPlan& plan, double beta,
                           const Constraint& constraint, std::size_t cell, double n);

IFReport influence_report(const ModelParams& params_null, const StressPlan& plan, double beta,
                          const Constraint& constraint, std::size_t cell, double n);

enum class ProbeMode { inspection_time, stress_level };

struct ProbePoint {
    double value = 0.0;
    double norm = 0.0;
};

/// For each grid value, rebuild the plan with the last inspection (and
/// termination) time, or the last stress level, set to that value, and return
/// the largest |(z_j - z_{j-1}) pi_j^(beta-1)| over the cells that value moves.
/// Computed in the log domain so far-out grid points do not underflow.
std::vector<ProbePoint> leverage_probe(const ModelParams& params, const StressPlan& plan, double beta, ProbeMode mode,
                                       const std::vector<double>& grid);

}  // namespace robalt
