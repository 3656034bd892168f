#pragma once

// Lifetime characteristics at a constant operating stress x0: reliability at a
// mission time, the time at which reliability drops to a level q, and the mean
// lifetime. Each comes with delta-method standard errors and two interval
// families (direct, and logit/log transformed).

#include <array>
#include <string>

#include "robalt/dpd_estimation.hpp"

namespace robalt {

enum class Characteristic { reliability, quantile, mean };

std::string to_string(Characteristic kind);

struct CharacteristicSpec {
    Characteristic kind = Characteristic::reliability;
    double x0 = 0.0;
    /// Mission time for reliability, reliability level q for quantile, unused for mean.
    double extra = 0.0;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct CharacteristicEstimate {
    CharacteristicSpec spec;
    double value = 0.0;
    double std_error = 0.0;
    Interval ci_direct;
    Interval ci_transformed;
    /// x0 lies outside the tested stress range.
    bool extrapolated = false;
};

/// exp(-(t / alpha0)^eta) with alpha0 = exp(a0 + a1 x0).
double reliability(const ModelParams& params, double x0, double t);
/// Time at which reliability equals q: alpha0 (-log q)^(1/eta). Requires 0 < q < 1.
double quantile(const ModelParams& params, double x0, double q);
/// alpha0 Gamma(1 + 1/eta).
double mean_lifetime(const ModelParams& params, double x0);

double characteristic_value(const ModelParams& params, const CharacteristicSpec& spec);
/// Gradient with respect to (a0, a1, eta).
Vec3 characteristic_gradient(const ModelParams& params, const CharacteristicSpec& spec);

/// Two-sided intervals at confidence `conf` using Var = grad^T Sigma grad / N.
CharacteristicEstimate characteristic_ci(const FitResult& fit, const StressPlan& plan, const CharacteristicSpec& spec,
                                         double conf = 0.95);

/// Direct intervals theta_i +- z sqrt(Sigma_ii / N) for a0, a1, eta.
std::array<Interval, 3> param_ci(const FitResult& fit, double conf = 0.95);

/// Diagnostic: some direct parameter interval has a half-width larger than the
/// magnitude of its estimate (the information matrix is nearly flat).
bool wide_intervals(const FitResult& fit, double conf = 0.95);

}  // namespace robalt
