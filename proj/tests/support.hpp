#pragma once

// Helpers shared by the unit and acceptance tests.

#include <cmath>
#include <random>
#include <vector>

#include "robalt/ce_model.hpp"

namespace testsupport {

// Two-level plan used by the simulation study.
inline robalt::StressPlan sim_plan() {
    return {{30.0, 40.0}, {18.0, 52.0}, {6, 10, 14, 18, 20, 24, 28, 32, 36, 40, 44, 48, 52}};
}
inline robalt::ModelParams sim_theta() { return {5.3, -0.05, 1.5}; }

// Solar lighting plan on the normalized scale, with the binned counts (survivors removed).
inline robalt::StressPlan solar_plan() { return {{0.0, 1.0}, {5.0, 6.0}, {1.5, 3.0, 5.0, 5.2, 5.4, 6.0}}; }
inline robalt::IntervalData solar_data() { return robalt::IntervalData::from_counts({3, 8, 5, 5, 5, 5, 0}); }

// Random plan with 2..4 levels in [0, 1], and parameters giving moderate cell
// probabilities on it.
struct RandomCase {
    robalt::StressPlan plan;
    robalt::ModelParams params;
};

inline RandomCase random_case(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int k = 2 + static_cast<int>(gen() % 3);
    std::vector<double> levels, taus, times;
    double x = 0.0, t = 0.0;
    for (int s = 0; s < k; ++s) {
        x += 0.1 + 0.4 * u(gen);
        levels.push_back(x);
        t += 0.5 + 2.0 * u(gen);
        taus.push_back(t);
    }
    const int per = 1 + static_cast<int>(gen() % 3);
    double prev = 0.0;
    for (int s = 0; s < k; ++s) {
        for (int j = 1; j <= per; ++j) {
            const double tau = taus[static_cast<std::size_t>(s)];
            times.push_back(j == per ? tau : prev + (tau - prev) * j / per);
        }
        prev = taus[static_cast<std::size_t>(s)];
    }
    // Scale near the middle of the test so that every cell has some mass.
    const double a1 = -0.5 - 2.0 * u(gen);
    const double a0 = std::log(taus.back()) - a1 * levels[static_cast<std::size_t>(k / 2)] + (u(gen) - 0.5);
    const double eta = 0.6 + 1.8 * u(gen);
    return {robalt::StressPlan(levels, taus, times), {a0, a1, eta}};
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testsupport
