#include "robalt/influence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace robalt {

namespace {

constexpr double kProbFloor = 1e-12;

void check_cell(const StressPlan& plan, std::size_t cell) {
    if (cell < 1 || cell > plan.num_cells())
        throw std::invalid_argument("cell index must lie in 1.." + std::to_string(plan.num_cells()));
}

}  // namespace

Vec3 if_mdpde(const ModelParams& params, const StressPlan& plan, double beta, std::size_t cell) {
    check_cell(plan, cell);
    const CellModel cm = evaluate(params, plan);
    Vec3 score{0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < cm.probs.size(); ++j) {
        const double p = std::max(cm.probs[j], kProbFloor);
        const double delta = (j + 1 == cell) ? 1.0 : 0.0;
        score = score + std::pow(p, beta - 1.0) * (delta - cm.probs[j]) * cm.rows[j];
    }
    const SandwichMatrices jk = sandwich_matrices(params, plan, beta);
    return symmetric_inverse3(jk.j).inverse * score;
}

namespace {

struct WaldPieces {
    std::vector<Vec3> cols;
    std::vector<double> inv;  // r x r
    bool pseudo = false;
};

WaldPieces wald_pieces(const ModelParams& params, const StressPlan& plan, double beta, const Constraint& c) {
    WaldPieces w;
    w.cols = c.jacobian(params);
    const std::size_t r = w.cols.size();
    const Mat3 sigma = sandwich_covariance(params, plan, beta).covariance;
    std::vector<double> a(r * r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) a[i * r + j] = quad_form(w.cols[i], sigma, w.cols[j]);
    const SmallInverse inv = symmetric_inverse_small(a, static_cast<int>(r));
    w.inv = inv.inverse;
    w.pseudo = inv.pseudo;
    return w;
}

double bilinear(const std::vector<double>& u, const std::vector<double>& inv, const std::vector<double>& v) {
    const std::size_t r = u.size();
    double s = 0.0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) s += u[i] * inv[i * r + j] * v[j];
    return s;
}

std::vector<double> project(const std::vector<Vec3>& cols, const Vec3& v) {
    std::vector<double> out(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) out[i] = dot(cols[i], v);
    return out;
}

}  // namespace

double if_wald_from(const Vec3& if_vector, const ModelParams& params_null, const StressPlan& plan, double beta,
                    const Constraint& constraint, double n) {
    const WaldPieces w = wald_pieces(params_null, plan, beta, constraint);
    const std::vector<double> mt_if = project(w.cols, if_vector);
    return 2.0 * n * bilinear(mt_if, w.inv, mt_if);
}

double if_wald(const ModelParams& params_null, const StressPlan& plan, double beta, const Constraint& constraint,
               std::size_t cell, double n) {
    return if_wald_from(if_mdpde(params_null, plan, beta, cell), params_null, plan, beta, constraint, n);
}

double if_wald_first_order(const ModelParams& params, const StressPlan& plan, double beta,
                           const Constraint& constraint, std::size_t cell, double n) {
    const WaldPieces w = wald_pieces(params, plan, beta, constraint);
    const std::vector<double> mt_if = project(w.cols, if_mdpde(params, plan, beta, cell));
    return 2.0 * n * bilinear(constraint.m(params), w.inv, mt_if);
}

IFReport influence_report(const ModelParams& params_null, const StressPlan& plan, double beta,
                          const Constraint& constraint, std::size_t cell, double n) {
    IFReport rep;
    rep.cell = cell;
    rep.if_vector = if_mdpde(params_null, plan, beta, cell);
    rep.if_wald_second_order = if_wald_from(rep.if_vector, params_null, plan, beta, constraint, n);
    rep.pseudo_inverse = symmetric_inverse3(sandwich_matrices(params_null, plan, beta).j).pseudo;
    return rep;
}

namespace {

// Largest |(z_j - z_{j-1}) pi_j^(beta-1)| over 0-based cells [first, L].
double probe_norm(const ModelParams& params, const StressPlan& plan, double beta, std::size_t first) {
    const ShiftTerms st = shift_terms(params, plan);
    const auto& times = plan.inspection_times();
    const auto& x = plan.stress_levels();
    const std::size_t L = times.size();
    const double eta = params.eta;

    std::vector<double> log_s(L);
    std::vector<double> log_g(L);
    std::vector<Vec3> dir(L);
    for (std::size_t j = 0; j < L; ++j) {
        const std::size_t s = plan.segment_of(times[j]);
        const double u = times[j] + st.h[s];
        if (!(u > 0.0)) throw DomainError("leverage_probe: shifted time is not positive");
        const double lr = std::log(u / st.alphas[s]);
        const double power = std::exp(eta * lr);
        log_s[j] = -power;
        log_g[j] = std::log(eta / u) + eta * lr - power;
        dir[j] = {-u, -u * x[s] + st.h_star[s], lr * u / eta};
    }

    double best = 0.0;
    for (std::size_t j = first; j <= L; ++j) {
        const double prev_log_s = j == 0 ? 0.0 : log_s[j - 1];
        double log_pi;
        if (j == L) {
            log_pi = prev_log_s;
        } else {
            const double gap = -std::expm1(log_s[j] - prev_log_s);
            log_pi = gap > 0.0 ? prev_log_s + std::log(gap) : -std::numeric_limits<double>::infinity();
        }
        Vec3 term{0.0, 0.0, 0.0};
        if (j < L) term = term + std::exp(log_g[j] + (beta - 1.0) * log_pi) * dir[j];
        if (j > 0) term = term - std::exp(log_g[j - 1] + (beta - 1.0) * log_pi) * dir[j - 1];
        const double n = norm(term);
        best = std::isnan(n) ? std::numeric_limits<double>::infinity() : std::max(best, n);
    }
    return best;
}

}  // namespace

std::vector<ProbePoint> leverage_probe(const ModelParams& params, const StressPlan& plan, double beta, ProbeMode mode,
                                       const std::vector<double>& grid) {
    if (!(beta >= 0.0)) throw std::invalid_argument("leverage_probe: beta must be >= 0");
    if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("leverage_probe: grid must be increasing");
    std::vector<ProbePoint> out;
    for (double v : grid) {
        std::vector<double> levels = plan.stress_levels();
        std::vector<double> taus = plan.change_times();
        std::vector<double> times = plan.inspection_times();
        std::size_t first = 0;
        if (mode == ProbeMode::inspection_time) {
            times.back() = v;
            taus.back() = v;
            first = times.size() - 1;
        } else {
            levels.back() = v;
        }
        const StressPlan moved(levels, taus, times);  // validates ordering
        if (mode == ProbeMode::stress_level) {
            const std::size_t last = moved.num_levels() - 1;
            first = times.size();
            for (std::size_t j = 0; j < times.size(); ++j)
                if (moved.segment_of(times[j]) == last) {
                    first = j;
                    break;
                }
        }
        out.push_back({v, probe_norm(params, moved, beta, first)});
    }
    return out;
}

}  // namespace robalt
