#include "robalt/ce_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace robalt {

namespace {

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) return false;
    return true;
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

StressPlan::StressPlan(std::vector<double> stress_levels, std::vector<double> change_times,
                       std::vector<double> inspection_times)
    : levels_(std::move(stress_levels)), taus_(std::move(change_times)), times_(std::move(inspection_times)) {
    if (levels_.empty()) throw std::invalid_argument("stress plan: need at least one stress level");
    if (taus_.size() != levels_.size())
        throw std::invalid_argument("stress plan: expected one change time per stress level (" +
                                    std::to_string(levels_.size()) + "), got " + std::to_string(taus_.size()));
    if (times_.empty()) throw std::invalid_argument("stress plan: need at least one inspection time");
    if (!all_finite(levels_) || !all_finite(taus_) || !all_finite(times_))
        throw std::invalid_argument("stress plan: non-finite value");
    if (!strictly_increasing(levels_)) throw std::invalid_argument("stress plan: stress levels must be strictly increasing");
    if (!strictly_increasing(taus_) || taus_.front() <= 0.0)
        throw std::invalid_argument("stress plan: change times must be positive and strictly increasing");
    if (!strictly_increasing(times_) || times_.front() <= 0.0)
        throw std::invalid_argument("stress plan: inspection times must be positive and strictly increasing");
    if (times_.back() != taus_.back())
        throw std::invalid_argument("stress plan: last inspection time must equal the termination time");
    for (double tau : taus_)
        if (!std::binary_search(times_.begin(), times_.end(), tau))
            throw std::invalid_argument("stress plan: change time " + std::to_string(tau) + " is not an inspection time");
}

std::size_t StressPlan::segment_of(double t) const {
    auto it = std::lower_bound(taus_.begin(), taus_.end(), t);
    if (it == taus_.end()) return taus_.size() - 1;
    return static_cast<std::size_t>(it - taus_.begin());
}

StressPlan StressPlan::scaled_times(double c) const {
    if (!(c > 0.0)) throw std::invalid_argument("scaled_times: factor must be positive");
    auto scale = [c](std::vector<double> v) {
        for (double& x : v) x *= c;
        return v;
    };
    return StressPlan(levels_, scale(taus_), scale(times_));
}

IntervalData IntervalData::from_counts(std::vector<std::int64_t> counts) {
    IntervalData d;
    d.total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    d.counts = std::move(counts);
    return d;
}

std::vector<double> IntervalData::proportions() const {
    std::vector<double> p(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j) p[j] = static_cast<double>(counts[j]) / static_cast<double>(total);
    return p;
}

void IntervalData::check_against(const StressPlan& plan) const {
    if (counts.size() != plan.num_cells())
        throw std::invalid_argument("interval data: expected " + std::to_string(plan.num_cells()) +
                                    " counts (inspections + survivors), got " + std::to_string(counts.size()));
    if (total <= 0) throw std::invalid_argument("interval data: total must be positive");
    std::int64_t sum = 0;
    for (auto c : counts) {
        if (c < 0) throw std::invalid_argument("interval data: negative count");
        sum += c;
    }
    if (sum != total)
        throw std::invalid_argument("interval data: counts sum to " + std::to_string(sum) + " but total is " +
                                    std::to_string(total));
}

double scale_at_level(const ModelParams& params, double x) {
    const double alpha = std::exp(params.a0 + params.a1 * x);
    if (!std::isfinite(alpha) || alpha <= 0.0) throw DomainError("scale_at_level: non-finite scale");
    return alpha;
}

ShiftTerms shift_terms(const ModelParams& params, const StressPlan& plan) {
    const auto& x = plan.stress_levels();
    const auto& tau = plan.change_times();
    const std::size_t k = x.size();
    ShiftTerms st;
    st.alphas.resize(k);
    for (std::size_t s = 0; s < k; ++s) st.alphas[s] = scale_at_level(params, x[s]);
    st.h.assign(k, 0.0);
    st.h_star.assign(k, 0.0);
    for (std::size_t s = 1; s < k; ++s) {
        double sum_h = 0.0;
        double sum_star = 0.0;
        for (std::size_t m = 0; m < s; ++m) {
            sum_h += (1.0 / st.alphas[m] - 1.0 / st.alphas[m + 1]) * tau[m];
            sum_star += (x[m + 1] / st.alphas[m + 1] - x[m] / st.alphas[m]) * tau[m];
        }
        st.h[s] = st.alphas[s] * sum_h;
        st.h_star[s] = st.h[s] * x[s] + st.alphas[s] * sum_star;
    }
    return st;
}

namespace {

// Pieces of the Weibull branch active at time t.
struct Branch {
    double u;      // shifted time t + h
    double alpha;  // scale on the segment
    double power;  // (u / alpha)^eta
    std::size_t segment;
};

Branch branch_at(const ModelParams& params, const StressPlan& plan, const ShiftTerms& st, double t) {
    if (!(params.eta > 0.0) || !std::isfinite(params.eta)) throw DomainError("shape parameter must be positive");
    const std::size_t s = plan.segment_of(t);
    Branch b{t + st.h[s], st.alphas[s], 0.0, s};
    if (!(b.u > 0.0)) throw DomainError("shifted time is not positive; parameters outside the model's domain");
    b.power = std::exp(params.eta * std::log(b.u / b.alpha));
    return b;
}

double branch_density(const ModelParams& params, const Branch& b) {
    return params.eta / b.u * b.power * std::exp(-b.power);
}

}  // namespace

double cdf(const ModelParams& params, const StressPlan& plan, double t) {
    if (t <= 0.0) return 0.0;
    const ShiftTerms st = shift_terms(params, plan);
    const Branch b = branch_at(params, plan, st, t);
    return std::clamp(-std::expm1(-b.power), 0.0, 1.0);
}

double pdf(const ModelParams& params, const StressPlan& plan, double t) {
    if (t <= 0.0) return 0.0;
    const ShiftTerms st = shift_terms(params, plan);
    // Right limit at a change time: step just past it into the next segment.
    const auto& tau = plan.change_times();
    Branch b{};
    auto it = std::find(tau.begin(), tau.end(), t);
    if (it != tau.end() && it + 1 != tau.end()) {
        const std::size_t s = static_cast<std::size_t>(it - tau.begin()) + 1;
        b = {t + st.h[s], st.alphas[s], 0.0, s};
        if (!(b.u > 0.0)) throw DomainError("shifted time is not positive; parameters outside the model's domain");
        b.power = std::exp(params.eta * std::log(b.u / b.alpha));
    } else {
        b = branch_at(params, plan, st, t);
    }
    return branch_density(params, b);
}

CellModel evaluate(const ModelParams& params, const StressPlan& plan) {
    const ShiftTerms st = shift_terms(params, plan);
    const auto& times = plan.inspection_times();
    const auto& x = plan.stress_levels();
    const std::size_t L = times.size();

    // Survival and z-vectors at each inspection time; z is the gradient of the cdf.
    std::vector<double> surv(L);
    std::vector<Vec3> z(L);
    for (std::size_t j = 0; j < L; ++j) {
        const Branch b = branch_at(params, plan, st, times[j]);
        surv[j] = std::exp(-b.power);
        const double g = branch_density(params, b);
        const std::size_t s = b.segment;
        z[j] = {g * -b.u, g * (-b.u * x[s] + st.h_star[s]), g * std::log(b.u / b.alpha) * b.u / params.eta};
    }

    CellModel out;
    out.probs.resize(L + 1);
    out.rows.resize(L + 1);
    double prev_surv = 1.0;
    Vec3 prev_z{0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < L; ++j) {
        out.probs[j] = std::clamp(prev_surv - surv[j], 0.0, 1.0);
        out.rows[j] = z[j] - prev_z;
        prev_surv = surv[j];
        prev_z = z[j];
    }
    out.probs[L] = std::clamp(prev_surv, 0.0, 1.0);
    out.rows[L] = Vec3{0.0, 0.0, 0.0} - prev_z;
    return out;
}

std::vector<double> cell_probabilities(const ModelParams& params, const StressPlan& plan) {
    return evaluate(params, plan).probs;
}

std::vector<Vec3> gradient_matrix(const ModelParams& params, const StressPlan& plan) {
    return evaluate(params, plan).rows;
}

}  // namespace robalt
