#include "robalt/montecarlo.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "robalt/dpd_estimation.hpp"
#include "robalt/lifetime.hpp"
#include "robalt/parallel.hpp"
#include "robalt/tuning.hpp"
#include "robalt/wald_tests.hpp"

namespace robalt {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t mix = stream;
    std::uint64_t x = seed ^ splitmix64(mix);
    for (auto& s : s_) s = splitmix64(x);
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::vector<double> contaminate(const std::vector<double>& pi, const ModelParams& params_tilde,
                                const StressPlan& plan, std::size_t cell, std::string* warning) {
    const std::size_t L = plan.num_inspections();
    if (pi.size() != L + 1) throw std::invalid_argument("contaminate: probability vector does not match plan");
    if (cell < 1 || cell > L + 1) throw std::invalid_argument("contaminate: cell index out of range");
    if (warning) warning->clear();
    if ((cell < 2 || cell > L) && warning) *warning = "contaminating a boundary cell (outside 2..L)";

    // Same evaluation path as the model itself, so an unchanged parameter
    // reproduces pi bit for bit and the input comes back untouched.
    const double replaced = cell_probabilities(params_tilde, plan)[cell - 1];
    if (replaced == pi[cell - 1]) return pi;
    std::vector<double> out = pi;
    out[cell - 1] = std::max(replaced, 0.0);
    const double total = std::accumulate(out.begin(), out.end(), 0.0);
    if (!(total > 0.0)) throw DomainError("contaminate: all probability mass vanished");
    for (double& p : out) p /= total;
    return out;
}

IntervalData simulate_counts(const std::vector<double>& pi, std::int64_t n, Rng& rng) {
    if (n <= 0) throw std::invalid_argument("simulate_counts: n must be positive");
    std::vector<double> cum(pi.size());
    std::partial_sum(pi.begin(), pi.end(), cum.begin());
    IntervalData d;
    d.counts.assign(pi.size(), 0);
    d.total = n;
    for (std::int64_t i = 0; i < n; ++i) {
        const double u = rng.uniform() * cum.back();
        std::size_t j = 0;
        while (u >= cum[j]) ++j;
        ++d.counts[j];
    }
    return d;
}

std::string to_string(ContaminatedParam p) {
    switch (p) {
        case ContaminatedParam::none: return "none";
        case ContaminatedParam::a0: return "a0";
        case ContaminatedParam::a1: return "a1";
        case ContaminatedParam::eta: return "eta";
    }
    return "none";
}

ContaminatedParam parse_contaminated_param(const std::string& s) {
    if (s == "none" || s.empty()) return ContaminatedParam::none;
    if (s == "a0") return ContaminatedParam::a0;
    if (s == "a1") return ContaminatedParam::a1;
    if (s == "eta") return ContaminatedParam::eta;
    throw std::invalid_argument("unknown contaminated parameter '" + s + "' (expected none, a0, a1 or eta)");
}

std::string beta_label(double beta) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", beta);
    return buf;
}

const std::vector<std::string>& MetricsTable::columns() {
    static const std::vector<std::string> cols = {
        "scenario", "contaminated_param", "contamination_value", "beta_label", "beta", "replications",
        "failures", "failure_rate", "unreliable", "rmse_theta", "rmse_theta_se", "rmse_a0", "rmse_a1",
        "rmse_eta", "mse_reliability", "mse_reliability_se", "mse_mean", "mse_mean_se", "cov_direct_rel",
        "cov_direct_rel_se", "cov_transformed_rel", "cov_transformed_rel_se", "cov_direct_mean",
        "cov_direct_mean_se", "cov_transformed_mean", "cov_transformed_mean_se", "level", "level_se", "power",
        "power_se", "mean_selected_beta"};
    return cols;
}

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string MetricsTable::to_csv() const {
    std::ostringstream out;
    const auto& cols = columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const MetricRow& r : rows) {
        out << r.scenario << ',' << r.contaminated_param << ',' << num(r.contamination_value) << ',' << r.beta_label
            << ',' << num(r.beta) << ',' << r.replications << ',' << r.failures << ',' << num(r.failure_rate) << ','
            << (r.unreliable ? 1 : 0) << ',' << num(r.rmse_theta) << ',' << num(r.rmse_theta_se) << ','
            << num(r.rmse_a0) << ',' << num(r.rmse_a1) << ',' << num(r.rmse_eta) << ',' << num(r.mse_reliability)
            << ',' << num(r.mse_reliability_se) << ',' << num(r.mse_mean) << ',' << num(r.mse_mean_se) << ','
            << num(r.cov_direct_rel) << ',' << num(r.cov_direct_rel_se) << ',' << num(r.cov_transformed_rel) << ','
            << num(r.cov_transformed_rel_se) << ',' << num(r.cov_direct_mean) << ',' << num(r.cov_direct_mean_se)
            << ',' << num(r.cov_transformed_mean) << ',' << num(r.cov_transformed_mean_se) << ',' << num(r.level)
            << ',' << num(r.level_se) << ',' << num(r.power) << ',' << num(r.power_se) << ','
            << num(r.mean_selected_beta) << '\n';
    }
    return out.str();
}

const MetricRow* MetricsTable::find(double contamination_value, const std::string& label) const {
    for (const MetricRow& r : rows) {
        const bool same_value = (std::isnan(contamination_value) && std::isnan(r.contamination_value)) ||
                                std::abs(r.contamination_value - contamination_value) < 1e-12;
        if (same_value && r.beta_label == label) return &r;
    }
    return nullptr;
}

namespace {

// Everything recorded for one estimator on one replication.
struct SlotOutcome {
    bool ok = false;
    Vec3 theta{};
    double rel = 0.0;
    double mean = 0.0;
    bool cov_dr = false, cov_tr = false, cov_dm = false, cov_tm = false;
    bool reject = false;
    bool power_ok = false;
    bool power_reject = false;
    double chosen_beta = std::numeric_limits<double>::quiet_NaN();
};

bool covers(const Interval& ci, double v) { return ci.lo <= v && v <= ci.hi; }

std::optional<FitResult> try_fit(const StressPlan& plan, const IntervalData& data, double beta, int multistart) {
    FitConfig fc;
    fc.beta = beta;
    fc.multistart = multistart;
    try {
        FitResult f = fit(plan, data, fc);
        if (f.converged) return f;
    } catch (const EstimationError&) {
    } catch (const DomainError&) {
    }
    return std::nullopt;
}

bool rejects(const FitResult& f, const Constraint& c, double alpha) {
    return wald_statistic(f, c, {alpha}).reject_at.front().reject;
}

// Fits every grid beta (plus the data-driven choice) on one data set.
std::vector<std::optional<FitResult>> fit_slots(const ScenarioSpec& spec, const IntervalData& data,
                                                std::vector<double>& chosen_beta) {
    const std::size_t g = spec.beta_grid.size();
    std::vector<std::optional<FitResult>> fits(g + (spec.include_optimal ? 1 : 0));
    for (std::size_t b = 0; b < g; ++b) fits[b] = try_fit(spec.plan, data, spec.beta_grid[b], spec.fit_multistart);
    if (spec.include_optimal) {
        TuningConfig tc;
        tc.beta_grid = spec.beta_grid;
        try {
            const TuningResult tr = select_beta_from_fits(
                std::vector<std::optional<FitResult>>(fits.begin(), fits.begin() + static_cast<long>(g)), tc,
                static_cast<double>(data.total));
            fits[g] = tr.fit_opt;
            chosen_beta.push_back(tr.beta_opt);
        } catch (const EstimationError&) {
            chosen_beta.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return fits;
}

struct Accumulator {
    std::vector<double> values;
    void add(double v) { values.push_back(v); }
    double mean() const {
        if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
        double s = 0.0;
        for (double v : values) s += v;
        return s / static_cast<double>(values.size());
    }
    double se() const {
        const std::size_t n = values.size();
        if (n < 2) return std::numeric_limits<double>::quiet_NaN();
        const double m = mean();
        double ss = 0.0;
        for (double v : values) ss += (v - m) * (v - m);
        return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    }
};

}  // namespace

MetricsTable run_scenario(const ScenarioSpec& spec) {
    if (spec.replications < 1) throw std::invalid_argument("scenario: replications must be at least 1");
    if (spec.beta_grid.empty()) throw std::invalid_argument("scenario: empty beta grid");
    if (spec.n_devices <= 0) throw std::invalid_argument("scenario: n_devices must be positive");

    std::vector<double> values = spec.contamination_values;
    const bool clean = spec.contaminated_param == ContaminatedParam::none || values.empty();
    if (clean) values = {std::numeric_limits<double>::quiet_NaN()};

    const Constraint slope_test = linear_constraint({0.0, 1.0, 0.0}, spec.test_a1);
    const double true_rel = reliability(spec.theta_true, spec.eval_x0, spec.eval_t);
    const double true_mean = mean_lifetime(spec.theta_true, spec.eval_x0);
    const CharacteristicSpec rel_spec{Characteristic::reliability, spec.eval_x0, spec.eval_t};
    const CharacteristicSpec mean_spec{Characteristic::mean, spec.eval_x0, 0.0};
    const std::size_t slots = spec.beta_grid.size() + (spec.include_optimal ? 1 : 0);

    MetricsTable table;
    for (double value : values) {
        auto perturbed = [&](ModelParams base) {
            switch (spec.contaminated_param) {
                case ContaminatedParam::a0: base.a0 = value; break;
                case ContaminatedParam::a1: base.a1 = value; break;
                case ContaminatedParam::eta: base.eta = value; break;
                case ContaminatedParam::none: break;
            }
            return base;
        };
        auto data_probs = [&](const ModelParams& truth) {
            std::vector<double> pi = cell_probabilities(truth, spec.plan);
            if (!clean) pi = contaminate(pi, perturbed(truth), spec.plan, spec.contaminated_cell);
            return pi;
        };
        const std::vector<double> pi = data_probs(spec.theta_true);
        std::optional<std::vector<double>> pi_alt;
        if (spec.theta_alternative) pi_alt = data_probs(*spec.theta_alternative);

        std::vector<std::vector<SlotOutcome>> outcomes(static_cast<std::size_t>(spec.replications));
        parallel_for(outcomes.size(), spec.threads, [&](std::size_t rep) {
            Rng rng(spec.seed, rep);
            const IntervalData data = simulate_counts(pi, spec.n_devices, rng);
            std::vector<double> chosen;
            const auto fits = fit_slots(spec, data, chosen);
            std::vector<SlotOutcome> out(slots);
            for (std::size_t s = 0; s < slots; ++s) {
                if (!fits[s]) continue;
                SlotOutcome& o = out[s];
                try {
                    const FitResult& f = *fits[s];
                    const CharacteristicEstimate rel = characteristic_ci(f, spec.plan, rel_spec, spec.conf);
                    const CharacteristicEstimate mean = characteristic_ci(f, spec.plan, mean_spec, spec.conf);
                    o.theta = f.params.as_vector();
                    o.rel = rel.value;
                    o.mean = mean.value;
                    o.cov_dr = covers(rel.ci_direct, true_rel);
                    o.cov_tr = covers(rel.ci_transformed, true_rel);
                    o.cov_dm = covers(mean.ci_direct, true_mean);
                    o.cov_tm = covers(mean.ci_transformed, true_mean);
                    o.reject = rejects(f, slope_test, spec.test_alpha);
                    o.ok = true;
                } catch (const std::exception&) {
                    o.ok = false;
                }
            }
            if (spec.include_optimal && !chosen.empty()) out[slots - 1].chosen_beta = chosen.front();
            if (pi_alt) {
                const IntervalData alt = simulate_counts(*pi_alt, spec.n_devices, rng);
                std::vector<double> chosen_alt;
                const auto alt_fits = fit_slots(spec, alt, chosen_alt);
                for (std::size_t s = 0; s < slots; ++s) {
                    if (!alt_fits[s]) continue;
                    try {
                        out[s].power_reject = rejects(*alt_fits[s], slope_test, spec.test_alpha);
                        out[s].power_ok = true;
                    } catch (const std::exception&) {
                    }
                }
            }
            outcomes[rep] = std::move(out);
        });

        const Vec3 truth = spec.theta_true.as_vector();
        for (std::size_t s = 0; s < slots; ++s) {
            MetricRow row;
            row.scenario = spec.name;
            row.contaminated_param = clean ? "none" : to_string(spec.contaminated_param);
            row.contamination_value = value;
            const bool optimal = s == spec.beta_grid.size();
            row.beta = optimal ? std::numeric_limits<double>::quiet_NaN() : spec.beta_grid[s];
            row.beta_label = optimal ? "Optimal" : beta_label(spec.beta_grid[s]);
            row.replications = spec.replications;

            Accumulator sq, sq0, sq1, sq2, mse_r, mse_m, cdr, ctr, cdm, ctm, lev, pow, sel;
            for (const auto& rep : outcomes) {
                const SlotOutcome& o = rep[s];
                if (!o.ok) {
                    ++row.failures;
                    continue;
                }
                const Vec3 e = o.theta - truth;
                sq.add(dot(e, e));
                sq0.add(e[0] * e[0]);
                sq1.add(e[1] * e[1]);
                sq2.add(e[2] * e[2]);
                mse_r.add((o.rel - true_rel) * (o.rel - true_rel));
                mse_m.add((o.mean - true_mean) * (o.mean - true_mean));
                cdr.add(o.cov_dr);
                ctr.add(o.cov_tr);
                cdm.add(o.cov_dm);
                ctm.add(o.cov_tm);
                lev.add(o.reject);
                if (o.power_ok) pow.add(o.power_reject);
                if (optimal) sel.add(o.chosen_beta);
            }
            row.failure_rate = static_cast<double>(row.failures) / spec.replications;
            row.unreliable = row.failure_rate > 0.05;
            row.rmse_theta = std::sqrt(sq.mean());
            row.rmse_theta_se = sq.se() / (2.0 * row.rmse_theta);
            row.rmse_a0 = std::sqrt(sq0.mean());
            row.rmse_a1 = std::sqrt(sq1.mean());
            row.rmse_eta = std::sqrt(sq2.mean());
            row.mse_reliability = mse_r.mean();
            row.mse_reliability_se = mse_r.se();
            row.mse_mean = mse_m.mean();
            row.mse_mean_se = mse_m.se();
            row.cov_direct_rel = cdr.mean();
            row.cov_direct_rel_se = cdr.se();
            row.cov_transformed_rel = ctr.mean();
            row.cov_transformed_rel_se = ctr.se();
            row.cov_direct_mean = cdm.mean();
            row.cov_direct_mean_se = cdm.se();
            row.cov_transformed_mean = ctm.mean();
            row.cov_transformed_mean_se = ctm.se();
            row.level = lev.mean();
            row.level_se = lev.se();
            row.power = pi_alt ? pow.mean() : std::numeric_limits<double>::quiet_NaN();
            row.power_se = pi_alt ? pow.se() : std::numeric_limits<double>::quiet_NaN();
            row.mean_selected_beta = optimal ? sel.mean() : std::numeric_limits<double>::quiet_NaN();
            table.rows.push_back(row);
        }
    }
    return table;
}

}  // namespace robalt
