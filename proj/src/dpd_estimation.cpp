#include "robalt/dpd_estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "robalt/optimizer.hpp"

namespace robalt {

namespace {

constexpr double kProbFloor = 1e-12;

void check_beta(double beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be a finite value >= 0");
}

}  // namespace

double dpd_loss(const std::vector<double>& p_hat, const std::vector<double>& pi, double beta) {
    check_beta(beta);
    if (p_hat.size() != pi.size()) throw std::invalid_argument("dpd_loss: vectors differ in length");
    double total = 0.0;
    if (beta == 0.0) {
        for (std::size_t j = 0; j < pi.size(); ++j)
            if (p_hat[j] > 0.0) total += p_hat[j] * std::log(p_hat[j] / std::max(pi[j], kProbFloor));
        return total;
    }
    for (std::size_t j = 0; j < pi.size(); ++j) {
        const double pj = std::max(pi[j], kProbFloor);
        const double pb = std::pow(pj, beta);
        total += pb * pj - (1.0 + 1.0 / beta) * p_hat[j] * pb + std::pow(p_hat[j], 1.0 + beta) / beta;
    }
    return total;
}

namespace {

Vec3 residual_from(const CellModel& cm, const std::vector<double>& p_hat, double beta) {
    Vec3 r{0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < cm.probs.size(); ++j) {
        const double weight = std::pow(std::max(cm.probs[j], kProbFloor), beta - 1.0) * (p_hat[j] - cm.probs[j]);
        r = r + weight * cm.rows[j];
    }
    return r;
}

}  // namespace

Vec3 estimating_residual(const ModelParams& params, const StressPlan& plan, const IntervalData& data, double beta) {
    check_beta(beta);
    data.check_against(plan);
    return residual_from(evaluate(params, plan), data.proportions(), beta);
}

double dpd_objective(const ModelParams& params, const StressPlan& plan, const std::vector<double>& p_hat,
                     double beta, Vec3* grad) {
    const CellModel cm = evaluate(params, plan);
    if (grad) *grad = -(beta + 1.0) * residual_from(cm, p_hat, beta);
    return dpd_loss(p_hat, cm.probs, beta);
}

ModelParams initial_estimate(const StressPlan& plan, const IntervalData& data) {
    data.check_against(plan);
    const auto& times = plan.inspection_times();
    const auto& taus = plan.change_times();
    const auto& x = plan.stress_levels();
    const std::size_t k = x.size();
    const double n_total = static_cast<double>(data.total);

    std::vector<double> failures(k, 0.0);
    for (std::size_t j = 0; j < times.size(); ++j)
        failures[plan.segment_of(times[j])] += static_cast<double>(data.counts[j]);

    // With unit shape the model is piecewise exponential with rate 1/alpha_s on
    // segment s, so each segment gives its own scale estimate.
    std::vector<double> xs;
    std::vector<double> log_alpha;
    double at_risk = n_total;
    double start = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
        if (at_risk >= 1.0) {
            const double frac = std::clamp(failures[s] / at_risk, 0.5 / n_total, 1.0 - 0.5 / n_total);
            const double rate = -std::log1p(-frac) / (taus[s] - start);
            xs.push_back(x[s]);
            log_alpha.push_back(-std::log(rate));
        }
        at_risk -= failures[s];
        start = taus[s];
    }
    if (xs.empty()) throw EstimationError("initial_estimate: no segment has devices at risk");

    double a1 = 0.0;
    const double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double ybar = std::accumulate(log_alpha.begin(), log_alpha.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double sxy = 0.0;
        double sxx = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - xbar) * (log_alpha[i] - ybar);
            sxx += (xs[i] - xbar) * (xs[i] - xbar);
        }
        a1 = sxy / sxx;
    }
    return {ybar - a1 * xbar, a1, 1.0};
}

SandwichMatrices sandwich_matrices(const ModelParams& params, const StressPlan& plan, double beta) {
    check_beta(beta);
    const CellModel cm = evaluate(params, plan);
    SandwichMatrices out;
    Vec3 xi{0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < cm.probs.size(); ++j) {
        const double p = std::max(cm.probs[j], kProbFloor);
        const Mat3 ww = Mat3::outer(cm.rows[j], cm.rows[j]);
        out.j = out.j + std::pow(p, beta - 1.0) * ww;
        out.k = out.k + std::pow(p, 2.0 * beta - 1.0) * ww;
        xi = xi + std::pow(p, beta) * cm.rows[j];
    }
    out.k = out.k - Mat3::outer(xi, xi);
    out.j = 0.5 * (out.j + out.j.transposed());
    out.k = 0.5 * (out.k + out.k.transposed());
    return out;
}

CovarianceResult sandwich_covariance(const ModelParams& params, const StressPlan& plan, double beta) {
    const SandwichMatrices jk = sandwich_matrices(params, plan, beta);
    const InverseResult jinv = symmetric_inverse3(jk.j);
    CovarianceResult out;
    out.covariance = jinv.inverse * jk.k * jinv.inverse;
    out.covariance = 0.5 * (out.covariance + out.covariance.transposed());
    out.j_condition = jinv.condition;
    out.singular = jinv.pseudo;
    return out;
}

namespace {

Vec3 to_search(const ModelParams& p) { return {p.a0, p.a1, std::log(p.eta)}; }
ModelParams from_search(const Vec3& y) { return {y[0], y[1], std::exp(y[2])}; }

std::vector<Vec3> starting_points(const ModelParams& base, int count) {
    const Vec3 y = to_search(base);
    const double da1 = 0.25 * std::max(std::abs(base.a1), 0.1);
    const std::array<Vec3, 6> offsets = {Vec3{0.0, 0.0, 0.0},  Vec3{0.5, 0.0, 0.4},  Vec3{-0.5, 0.0, -0.4},
                                         Vec3{0.0, da1, 0.4},  Vec3{0.0, -da1, -0.4}, Vec3{1.0, -da1, 0.0}};
    std::vector<Vec3> out;
    for (int i = 0; i < std::max(count, 1); ++i) out.push_back(y + offsets[static_cast<std::size_t>(i) % offsets.size()]);
    return out;
}

}  // namespace

FitResult fit_proportions(const StressPlan& plan, const std::vector<double>& p_hat, std::int64_t n_devices,
                          const FitConfig& config) {
    check_beta(config.beta);
    if (p_hat.size() != plan.num_cells()) throw std::invalid_argument("fit: proportion vector does not match plan");
    const auto nonempty = std::count_if(p_hat.begin(), p_hat.end(), [](double p) { return p > 0.0; });
    if (nonempty < 2) throw EstimationError("fit: need at least two non-empty cells");

    ModelParams base;
    if (config.initial) {
        base = *config.initial;
    } else {
        // Reconstruct pseudo-counts for the pilot; only the ratios matter.
        IntervalData pseudo;
        const double n = n_devices > 0 ? static_cast<double>(n_devices) : 1000.0;
        for (double p : p_hat) pseudo.counts.push_back(static_cast<std::int64_t>(std::llround(p * n)));
        pseudo.total = std::accumulate(pseudo.counts.begin(), pseudo.counts.end(), std::int64_t{0});
        base = pseudo.total > 0 ? initial_estimate(plan, pseudo) : ModelParams{0.0, 0.0, 1.0};
    }

    const double beta = config.beta;
    ObjectiveFn objective = [&](const Vec3& y, Vec3& gy) {
        const ModelParams p = from_search(y);
        Vec3 g;
        const double v = dpd_objective(p, plan, p_hat, beta, &g);
        gy = {g[0], g[1], g[2] * p.eta};
        return v;
    };
    // The tolerance is stated in (a0, a1, eta); the search coordinates differ by
    // a factor eta on the last component, so aim a little lower.
    OptimizeOptions opts{config.max_iters, 0.1 * config.grad_tol, config.param_tol};

    OptimizeResult best;
    best.value = std::numeric_limits<double>::infinity();
    bool have = false;
    for (const Vec3& y0 : starting_points(base, config.multistart)) {
        OptimizeResult r = minimize(objective, y0, opts);
        if (!std::isfinite(r.value)) continue;
        const bool better = !have || (r.converged && !best.converged) ||
                            (r.converged == best.converged && r.value < best.value);
        if (better) {
            best = r;
            have = true;
        }
    }
    if (!have) throw EstimationError("fit: no starting point gave a finite objective");

    FitResult out;
    out.params = from_search(best.y);
    out.beta = beta;
    out.objective = best.value;
    out.iterations = best.iterations;
    out.n_devices = n_devices;
    Vec3 g;
    dpd_objective(out.params, plan, p_hat, beta, &g);
    out.grad_norm = norm(g);
    out.converged = out.grad_norm <= config.grad_tol;
    if (!out.converged) out.warnings.push_back("optimizer did not reach the gradient tolerance");

    const SandwichMatrices jk = sandwich_matrices(out.params, plan, beta);
    out.j_matrix = jk.j;
    out.k_matrix = jk.k;
    const CovarianceResult cov = sandwich_covariance(out.params, plan, beta);
    out.covariance = cov.covariance;
    out.j_condition = cov.j_condition;
    out.singular = cov.singular;
    if (cov.singular) out.warnings.push_back("information matrix is near-singular; pseudo-inverse used");
    if (out.params.a1 >= 0.0) out.warnings.push_back("fitted slope a1 is non-negative (outside the usual parameter space)");
    return out;
}

FitResult fit(const StressPlan& plan, const IntervalData& data, const FitConfig& config) {
    data.check_against(plan);
    FitConfig cfg = config;
    if (!cfg.initial) cfg.initial = initial_estimate(plan, data);
    return fit_proportions(plan, data.proportions(), data.total, cfg);
}

}  // namespace robalt
