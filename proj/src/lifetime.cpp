#include "robalt/lifetime.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace robalt {

std::string to_string(Characteristic kind) {
    switch (kind) {
        case Characteristic::reliability: return "reliability";
        case Characteristic::quantile: return "quantile";
        case Characteristic::mean: return "mean";
    }
    return "unknown";
}

double reliability(const ModelParams& params, double x0, double t) {
    if (t <= 0.0) return 1.0;
    const double u = t / scale_at_level(params, x0);
    return std::exp(-std::pow(u, params.eta));
}

double quantile(const ModelParams& params, double x0, double q) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile: reliability level must lie in (0, 1)");
    return scale_at_level(params, x0) * std::pow(-std::log(q), 1.0 / params.eta);
}

double mean_lifetime(const ModelParams& params, double x0) {
    return scale_at_level(params, x0) * gamma_fn(1.0 + 1.0 / params.eta);
}

double characteristic_value(const ModelParams& params, const CharacteristicSpec& spec) {
    switch (spec.kind) {
        case Characteristic::reliability: return reliability(params, spec.x0, spec.extra);
        case Characteristic::quantile: return quantile(params, spec.x0, spec.extra);
        case Characteristic::mean: return mean_lifetime(params, spec.x0);
    }
    throw std::invalid_argument("unknown characteristic");
}

Vec3 characteristic_gradient(const ModelParams& params, const CharacteristicSpec& spec) {
    const double eta = params.eta;
    const double x0 = spec.x0;
    switch (spec.kind) {
        case Characteristic::reliability: {
            if (spec.extra <= 0.0) return {0.0, 0.0, 0.0};
            const double u = spec.extra / scale_at_level(params, x0);
            const double ue = std::pow(u, eta);
            const double c = eta * ue * std::exp(-ue);
            return {c, c * x0, -c * std::log(u) / eta};
        }
        case Characteristic::quantile: {
            const double q = quantile(params, x0, spec.extra);
            return {q, q * x0, -q * std::log(-std::log(spec.extra)) / (eta * eta)};
        }
        case Characteristic::mean: {
            const double e = mean_lifetime(params, x0);
            return {e, e * x0, -e * digamma_fn(1.0 + 1.0 / eta) / (eta * eta)};
        }
    }
    throw std::invalid_argument("unknown characteristic");
}

namespace {

double z_for(double conf) {
    if (!(conf > 0.0 && conf < 1.0)) throw std::invalid_argument("confidence level must lie in (0, 1)");
    return std_normal_quantile(0.5 + 0.5 * conf);
}

double variance_of(const Vec3& grad, const Mat3& cov, double n) {
    const double v = quad_form(grad, cov, grad);
    const double scale = 1e-10 * (1.0 + dot(grad, grad) * (std::abs(cov.trace()) + 1.0));
    if (v < -scale) throw DomainError("covariance is not positive semi-definite along the requested direction");
    return std::max(v, 0.0) / n;
}

}  // namespace

CharacteristicEstimate characteristic_ci(const FitResult& fit, const StressPlan& plan, const CharacteristicSpec& spec,
                                         double conf) {
    if (fit.n_devices <= 0) throw std::invalid_argument("characteristic_ci: fit carries no sample size");
    const double z = z_for(conf);
    CharacteristicEstimate est;
    est.spec = spec;
    est.value = characteristic_value(fit.params, spec);
    const Vec3 grad = characteristic_gradient(fit.params, spec);
    est.std_error = std::sqrt(variance_of(grad, fit.covariance, static_cast<double>(fit.n_devices)));
    const auto& levels = plan.stress_levels();
    est.extrapolated = spec.x0 < levels.front() || spec.x0 > levels.back();

    const double v = est.value;
    const double se = est.std_error;
    est.ci_direct = {v - z * se, v + z * se};
    if (spec.kind == Characteristic::reliability) {
        if (se == 0.0 || v <= 0.0 || v >= 1.0) {
            est.ci_transformed = {v, v};
        } else {
            const double s = std::exp(z * se / (v * (1.0 - v)));
            est.ci_transformed = {v / (v + (1.0 - v) * s), v / (v + (1.0 - v) / s)};
        }
    } else {
        const double f = std::exp(z * se / v);
        est.ci_transformed = {v / f, v * f};
    }
    return est;
}

std::array<Interval, 3> param_ci(const FitResult& fit, double conf) {
    if (fit.n_devices <= 0) throw std::invalid_argument("param_ci: fit carries no sample size");
    const double z = z_for(conf);
    const Vec3 theta = fit.params.as_vector();
    std::array<Interval, 3> out{};
    for (int i = 0; i < 3; ++i) {
        const double se = std::sqrt(std::max(fit.covariance(i, i), 0.0) / static_cast<double>(fit.n_devices));
        out[static_cast<std::size_t>(i)] = {theta[i] - z * se, theta[i] + z * se};
    }
    return out;
}

bool wide_intervals(const FitResult& fit, double conf) {
    const auto ci = param_ci(fit, conf);
    const Vec3 theta = fit.params.as_vector();
    for (std::size_t i = 0; i < 3; ++i)
        if (0.5 * (ci[i].hi - ci[i].lo) > std::abs(theta[i])) return true;
    return false;
}

}  // namespace robalt
