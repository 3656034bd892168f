#pragma once

// Cumulative-exposure Weibull step-stress model: scales, time shifts, the
// piecewise cdf/pdf, interval (cell) probabilities and their gradient W.

#include <cstdint>
#include <vector>

#include "robalt/special_math.hpp"

namespace robalt {

struct ModelParams {
    double a0 = 0.0;
    double a1 = 0.0;
    double eta = 1.0;

    Vec3 as_vector() const { return {a0, a1, eta}; }
    static ModelParams from_vector(const Vec3& v) { return {v[0], v[1], v[2]}; }
};

/// Stress levels x_1..x_k, change times tau_1..tau_k (tau_k ends the test) and
/// inspection times t_1..t_L. The constructor validates everything and throws
/// std::invalid_argument on a malformed plan.
class StressPlan {
public:
    StressPlan(std::vector<double> stress_levels, std::vector<double> change_times,
               std::vector<double> inspection_times);

    const std::vector<double>& stress_levels() const { return levels_; }
    const std::vector<double>& change_times() const { return taus_; }
    const std::vector<double>& inspection_times() const { return times_; }

    std::size_t num_levels() const { return levels_.size(); }
    std::size_t num_inspections() const { return times_.size(); }
    /// L + 1: one cell per inspection interval plus the survivor cell.
    std::size_t num_cells() const { return times_.size() + 1; }
    double termination() const { return taus_.back(); }

    /// 0-based segment s with tau_{s-1} < t <= tau_s (tau_{-1} = 0). Times past
    /// the end of the test stay in the last segment.
    std::size_t segment_of(double t) const;

    /// Same plan with every time multiplied by c > 0.
    StressPlan scaled_times(double c) const;

private:
    std::vector<double> levels_;
    std::vector<double> taus_;
    std::vector<double> times_;
};

/// Failure counts per inspection interval; the final entry holds survivors.
struct IntervalData {
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;

    static IntervalData from_counts(std::vector<std::int64_t> counts);
    std::vector<double> proportions() const;
    /// Throws std::invalid_argument unless counts fit the plan and sum to total.
    void check_against(const StressPlan& plan) const;
};

/// alphas[s] is the scale at level s; h[s] and h_star[s] are the shift and its
/// a1-derivative helper applied on segment s (both zero on the first segment).
struct ShiftTerms {
    std::vector<double> alphas;
    std::vector<double> h;
    std::vector<double> h_star;
};

/// Cell probabilities together with the rows of the gradient matrix W, where
/// rows[j] = d pi_j / d(a0, a1, eta).
struct CellModel {
    std::vector<double> probs;
    std::vector<Vec3> rows;
};

/// exp(a0 + a1 x). Throws DomainError if the result is not finite.
double scale_at_level(const ModelParams& params, double x);

ShiftTerms shift_terms(const ModelParams& params, const StressPlan& plan);

/// Throws DomainError when eta <= 0 or a shifted time t + h turns
/// non-positive, which only happens for parameter values far from any fit.
double cdf(const ModelParams& params, const StressPlan& plan, double t);
/// Density; at a change time this is the right limit.
double pdf(const ModelParams& params, const StressPlan& plan, double t);

std::vector<double> cell_probabilities(const ModelParams& params, const StressPlan& plan);
std::vector<Vec3> gradient_matrix(const ModelParams& params, const StressPlan& plan);
CellModel evaluate(const ModelParams& params, const StressPlan& plan);

}  // namespace robalt
