#include "robalt/wald_tests.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace robalt {

Constraint linear_constraints(std::vector<Vec3> rows, std::vector<double> d) {
    if (rows.empty() || rows.size() > 3 || rows.size() != d.size())
        throw std::invalid_argument("linear_constraints: need 1 to 3 rows with one right-hand side each");
    Constraint c;
    c.r = static_cast<int>(rows.size());
    std::ostringstream label;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i) label << "; ";
        label << rows[i][0] << "*a0 + " << rows[i][1] << "*a1 + " << rows[i][2] << "*eta = " << d[i];
    }
    c.label = label.str();
    c.m = [rows, d](const ModelParams& p) {
        std::vector<double> out(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) out[i] = dot(rows[i], p.as_vector()) - d[i];
        return out;
    };
    c.jacobian = [rows](const ModelParams&) { return rows; };
    return c;
}

Constraint linear_constraint(const Vec3& c, double d) { return linear_constraints({c}, {d}); }

namespace {

struct Middle {
    std::vector<double> inverse;  // r x r
    bool pseudo = false;
};

void check_rank(const std::vector<Vec3>& cols) {
    const std::size_t r = cols.size();
    std::vector<double> gram(r * r);
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b) gram[a * r + b] = dot(cols[a], cols[b]);
    const SmallInverse g = symmetric_inverse_small(gram, static_cast<int>(r));
    if (g.pseudo) throw std::invalid_argument("constraint Jacobian is rank-deficient");
}

Middle middle_inverse(const std::vector<Vec3>& cols, const Mat3& sigma) {
    const std::size_t r = cols.size();
    std::vector<double> a(r * r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) a[i * r + j] = quad_form(cols[i], sigma, cols[j]);
    const SmallInverse inv = symmetric_inverse_small(a, static_cast<int>(r));
    return {inv.inverse, inv.pseudo};
}

double quad_small(const std::vector<double>& u, const std::vector<double>& inv) {
    const std::size_t r = u.size();
    double s = 0.0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) s += u[i] * inv[i * r + j] * u[j];
    return s;
}

std::vector<Vec3> checked_jacobian(const Constraint& c, const ModelParams& p) {
    std::vector<Vec3> cols = c.jacobian(p);
    if (static_cast<int>(cols.size()) != c.r) throw std::invalid_argument("constraint Jacobian has wrong size");
    check_rank(cols);
    return cols;
}

}  // namespace

TestResult wald_statistic(const FitResult& fit, const Constraint& constraint, const std::vector<double>& levels) {
    if (fit.n_devices <= 0) throw std::invalid_argument("wald_statistic: fit carries no sample size");
    const std::vector<Vec3> cols = checked_jacobian(constraint, fit.params);
    const std::vector<double> m = constraint.m(fit.params);
    const Middle mid = middle_inverse(cols, fit.covariance);
    TestResult out;
    out.df = constraint.r;
    out.statistic = std::max(0.0, static_cast<double>(fit.n_devices) * quad_small(m, mid.inverse));
    out.p_value = std::clamp(chi2_sf(out.statistic, out.df), 0.0, 1.0);
    out.pseudo_inverse = mid.pseudo;
    for (double a : levels) out.reject_at.push_back({a, out.statistic > chi2_critical(a, out.df)});
    return out;
}

double wald_limit(const ModelParams& theta1, const ModelParams& theta2, const StressPlan& plan,
                  const Constraint& constraint, double beta) {
    const std::vector<Vec3> cols = checked_jacobian(constraint, theta2);
    const Mat3 sigma = sandwich_covariance(theta2, plan, beta).covariance;
    return quad_small(constraint.m(theta1), middle_inverse(cols, sigma).inverse);
}

double asymptotic_power(const ModelParams& theta_star, const StressPlan& plan, const Constraint& constraint,
                        double beta, double n, double alpha) {
    if (!(n > 0.0)) throw std::invalid_argument("asymptotic_power: sample size must be positive");
    const std::vector<double> m = constraint.m(theta_star);
    bool all_zero = true;
    for (double v : m) all_zero = all_zero && v == 0.0;
    if (all_zero) throw std::invalid_argument("asymptotic_power: theta_star satisfies the null hypothesis");

    const std::vector<Vec3> cols = checked_jacobian(constraint, theta_star);
    const Mat3 sigma = sandwich_covariance(theta_star, plan, beta).covariance;
    const Middle mid = middle_inverse(cols, sigma);
    const double ell = quad_small(m, mid.inverse);

    // Gradient of l(theta, theta_star) in its first slot: 2 M(theta) A^-1 m(theta).
    const std::size_t r = m.size();
    Vec3 grad{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < r; ++i) {
        double w = 0.0;
        for (std::size_t j = 0; j < r; ++j) w += mid.inverse[i * r + j] * m[j];
        grad = grad + 2.0 * w * cols[i];
    }
    const double sd = std::sqrt(std::max(quad_form(grad, sigma, grad), 0.0));
    const double crit = chi2_critical(alpha, constraint.r);
    if (sd == 0.0) return crit / n < ell ? 1.0 : 0.0;
    return 1.0 - std_normal_cdf(std::sqrt(n) / sd * (crit / n - ell));
}

double contiguous_power_delta(const ModelParams& theta0, const std::vector<double>& delta, const StressPlan& plan,
                              const Constraint& constraint, double beta, double alpha) {
    if (static_cast<int>(delta.size()) != constraint.r) throw std::invalid_argument("delta has wrong length");
    const std::vector<Vec3> cols = checked_jacobian(constraint, theta0);
    const Mat3 sigma = sandwich_covariance(theta0, plan, beta).covariance;
    const double ncp = std::max(0.0, quad_small(delta, middle_inverse(cols, sigma).inverse));
    const double crit = chi2_critical(alpha, constraint.r);
    return std::clamp(1.0 - noncentral_chi2_cdf(crit, constraint.r, ncp), 0.0, 1.0);
}

double contiguous_power_d(const ModelParams& theta0, const Vec3& d, const StressPlan& plan,
                          const Constraint& constraint, double beta, double alpha) {
    const std::vector<Vec3> cols = checked_jacobian(constraint, theta0);
    std::vector<double> delta(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) delta[i] = dot(cols[i], d);
    return contiguous_power_delta(theta0, delta, plan, constraint, beta, alpha);
}

}  // namespace robalt
