#include "robalt/tuning.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "robalt/parallel.hpp"

namespace robalt {

std::vector<double> default_beta_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 10; ++i) g.push_back(i / 10.0);
    return g;
}

double estimated_mse(const FitResult& fit, const ModelParams& pilot, double n) {
    const Vec3 diff = fit.params.as_vector() - pilot.as_vector();
    return dot(diff, diff) + fit.covariance.trace() / n;
}

namespace {

double pilot_distance(const ModelParams& a, const ModelParams& b) {
    const Vec3 d{a.a0 - b.a0, a.a1 - b.a1, std::log(a.eta) - std::log(b.eta)};
    return norm(d);
}

void check_config(const TuningConfig& config) {
    if (config.beta_grid.empty()) throw std::invalid_argument("tuning: empty beta grid");
    for (std::size_t i = 0; i < config.beta_grid.size(); ++i) {
        const double b = config.beta_grid[i];
        if (!(b >= 0.0 && b <= 1.0)) throw std::invalid_argument("tuning: grid values must lie in [0, 1]");
        if (i && !(b > config.beta_grid[i - 1])) throw std::invalid_argument("tuning: grid must be increasing");
    }
    if (!(config.epsilon > 0.0)) throw std::invalid_argument("tuning: epsilon must be positive");
    if (config.max_rounds < 1) throw std::invalid_argument("tuning: max_rounds must be at least 1");
}

}  // namespace

TuningResult select_beta_from_fits(const std::vector<std::optional<FitResult>>& fits, const TuningConfig& config,
                                   double n) {
    check_config(config);
    if (fits.size() != config.beta_grid.size()) throw std::invalid_argument("tuning: one fit per grid point expected");

    TuningResult res;
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < fits.size(); ++i) {
        if (fits[i] && fits[i]->converged) {
            usable.push_back(i);
        } else {
            std::ostringstream msg;
            msg << "beta = " << config.beta_grid[i] << " excluded: fit failed or did not converge";
            res.warnings.push_back(msg.str());
        }
    }
    if (usable.empty()) throw EstimationError("tuning: no grid fit converged");

    ModelParams pilot;
    if (config.pilot) {
        pilot = *config.pilot;
    } else {
        Vec3 sum{0.0, 0.0, 0.0};
        for (std::size_t i : usable) sum = sum + fits[i]->params.as_vector();
        pilot = ModelParams::from_vector((1.0 / static_cast<double>(usable.size())) * sum);
    }
    res.initial_pilot = pilot;

    std::size_t winner = usable.front();
    for (int round = 1; round <= config.max_rounds; ++round) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i : usable) {
            const double mse = estimated_mse(*fits[i], pilot, n);
            if (mse < best) {  // strict: ties go to the smaller beta
                best = mse;
                winner = i;
            }
        }
        res.rounds = round;
        const ModelParams next = fits[winner]->params;
        const double moved = pilot_distance(next, pilot);
        pilot = next;
        if (moved < config.epsilon) {
            res.pilot_converged = true;
            break;
        }
    }
    if (!res.pilot_converged) res.warnings.push_back("pilot did not settle within max_rounds");

    for (std::size_t i = 0; i < fits.size(); ++i) {
        MsePoint pt;
        pt.beta = config.beta_grid[i];
        pt.used = fits[i] && fits[i]->converged;
        if (fits[i]) {
            pt.variance = fits[i]->covariance.trace() / n;
            pt.mse = estimated_mse(*fits[i], pilot, n);
        } else {
            pt.mse = pt.variance = std::numeric_limits<double>::quiet_NaN();
        }
        res.mse_curve.push_back(pt);
    }
    res.beta_opt = config.beta_grid[winner];
    res.theta_opt = fits[winner]->params;
    res.fit_opt = *fits[winner];
    return res;
}

TuningResult select_beta(const StressPlan& plan, const IntervalData& data, const TuningConfig& config) {
    check_config(config);
    data.check_against(plan);
    std::vector<std::optional<FitResult>> fits(config.beta_grid.size());
    parallel_for(fits.size(), config.threads, [&](std::size_t i) {
        FitConfig fc = config.fit;
        fc.beta = config.beta_grid[i];
        try {
            fits[i] = fit(plan, data, fc);
        } catch (const EstimationError&) {
        } catch (const DomainError&) {
        }
    });
    return select_beta_from_fits(fits, config, static_cast<double>(data.total));
}

}  // namespace robalt
