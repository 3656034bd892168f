#pragma once

// Wald-type tests of m(theta) = 0 built on a minimum-divergence fit, plus
// asymptotic power approximations.

#include <functional>
#include <string>
#include <vector>

#include "robalt/dpd_estimation.hpp"

namespace robalt {

/// m: theta -> R^r and its Jacobian, given as r gradient vectors (the columns of
/// the 3 x r matrix M).
struct Constraint {
    int r = 1;
    std::function<std::vector<double>(const ModelParams&)> m;
    std::function<std::vector<Vec3>(const ModelParams&)> jacobian;
    std::string label;
};

/// c . theta - d = 0
Constraint linear_constraint(const Vec3& c, double d);
/// Several linear rows at once; rows.size() must equal d.size() and be 1..3.
Constraint linear_constraints(std::vector<Vec3> rows, std::vector<double> d);

struct LevelDecision {
    double alpha = 0.05;
    bool reject = false;
};

struct TestResult {
    double statistic = 0.0;
    int df = 1;
    double p_value = 1.0;
    std::vector<LevelDecision> reject_at;
    /// The middle matrix M^T Sigma M needed a pseudo-inverse.
    bool pseudo_inverse = false;
};

/// N m^T (M^T Sigma M)^-1 m at the fitted parameters, referred to chi-square with r df.
TestResult wald_statistic(const FitResult& fit, const Constraint& constraint,
                          const std::vector<double>& levels = {0.01, 0.05, 0.10});

/// m(theta1)^T (M(theta2)^T Sigma(theta2) M(theta2))^-1 m(theta1), the
/// statistic's limit per device; Sigma is the per-device sandwich covariance.
double wald_limit(const ModelParams& theta1, const ModelParams& theta2, const StressPlan& plan,
                  const Constraint& constraint, double beta);

/// Normal approximation to the power at a fixed alternative theta_star (with
/// m(theta_star) != 0): 1 - Phi(sqrt(N) / sigma * (chi2_{r,alpha} / N - l)).
double asymptotic_power(const ModelParams& theta_star, const StressPlan& plan, const Constraint& constraint,
                        double beta, double n, double alpha);

/// Power against theta0 + d / sqrt(N): non-central chi-square with
/// ncp = d^T M (M^T Sigma M)^-1 M^T d.
double contiguous_power_d(const ModelParams& theta0, const Vec3& d, const StressPlan& plan,
                          const Constraint& constraint, double beta, double alpha);
/// Power against m(theta_N) = delta / sqrt(N): ncp = delta^T (M^T Sigma M)^-1 delta.
double contiguous_power_delta(const ModelParams& theta0, const std::vector<double>& delta, const StressPlan& plan,
                              const Constraint& constraint, double beta, double alpha);

}  // namespace robalt
