#include "robalt/special_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace robalt {

// ---------------------------------------------------------------------------
// Mat3 / Vec3

Mat3 Mat3::identity() { return diag(1.0, 1.0, 1.0); }

Mat3 Mat3::diag(double d0, double d1, double d2) {
    Mat3 m;
    m(0, 0) = d0;
    m(1, 1) = d1;
    m(2, 2) = d2;
    return m;
}

Mat3 Mat3::outer(const Vec3& u, const Vec3& v) {
    Mat3 m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = u[r] * v[c];
    return m;
}

Mat3 Mat3::transposed() const {
    Mat3 t;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) t(c, r) = (*this)(r, c);
    return t;
}

bool Mat3::is_finite() const {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

Mat3 operator+(const Mat3& x, const Mat3& y) {
    Mat3 m;
    for (std::size_t i = 0; i < 9; ++i) m.a[i] = x.a[i] + y.a[i];
    return m;
}

Mat3 operator-(const Mat3& x, const Mat3& y) {
    Mat3 m;
    for (std::size_t i = 0; i < 9; ++i) m.a[i] = x.a[i] - y.a[i];
    return m;
}

Mat3 operator*(const Mat3& x, const Mat3& y) {
    Mat3 m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += x(r, k) * y(k, c);
            m(r, c) = s;
        }
    return m;
}

Mat3 operator*(double s, const Mat3& x) {
    Mat3 m;
    for (std::size_t i = 0; i < 9; ++i) m.a[i] = s * x.a[i];
    return m;
}

Vec3 operator*(const Mat3& m, const Vec3& v) {
    Vec3 out{};
    for (int r = 0; r < 3; ++r) out[r] = m(r, 0) * v[0] + m(r, 1) * v[1] + m(r, 2) * v[2];
    return out;
}

Vec3 operator+(const Vec3& u, const Vec3& v) { return {u[0] + v[0], u[1] + v[1], u[2] + v[2]}; }
Vec3 operator-(const Vec3& u, const Vec3& v) { return {u[0] - v[0], u[1] - v[1], u[2] - v[2]}; }
Vec3 operator*(double s, const Vec3& v) { return {s * v[0], s * v[1], s * v[2]}; }
double dot(const Vec3& u, const Vec3& v) { return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]; }
double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
double quad_form(const Vec3& u, const Mat3& m, const Vec3& v) { return dot(u, m * v); }

// ---------------------------------------------------------------------------
// Symmetric eigen-decomposition (cyclic Jacobi on an n x n row-major block)

namespace {

void jacobi_eigen(std::vector<double>& a, int n, std::vector<double>& values, std::vector<double>& vectors) {
    vectors.assign(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i) vectors[static_cast<std::size_t>(i * n + i)] = 1.0;
    auto at = [n](std::vector<double>& m, int r, int c) -> double& { return m[static_cast<std::size_t>(r * n + c)]; };

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        double diag = 0.0;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) (r == c ? diag : off) += at(a, r, c) * at(a, r, c);
        if (off <= 1e-32 * diag || off == 0.0) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(a, p, q);
                if (apq == 0.0) continue;
                const double app = at(a, p, p);
                const double aqq = at(a, q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(a, k, p);
                    const double akq = at(a, k, q);
                    at(a, k, p) = c * akp - s * akq;
                    at(a, k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(a, p, k);
                    const double aqk = at(a, q, k);
                    at(a, p, k) = c * apk - s * aqk;
                    at(a, q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = at(vectors, k, p);
                    const double vkq = at(vectors, k, q);
                    at(vectors, k, p) = c * vkp - s * vkq;
                    at(vectors, k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = at(a, i, i);

    // Sort ascending, permuting eigenvector columns alongside.
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int x, int y) { return values[static_cast<std::size_t>(x)] < values[static_cast<std::size_t>(y)]; });
    std::vector<double> sv(values.size());
    std::vector<double> svec(vectors.size());
    for (int k = 0; k < n; ++k) {
        const int src = order[static_cast<std::size_t>(k)];
        sv[static_cast<std::size_t>(k)] = values[static_cast<std::size_t>(src)];
        for (int r = 0; r < n; ++r) svec[static_cast<std::size_t>(r * n + k)] = vectors[static_cast<std::size_t>(r * n + src)];
    }
    values = std::move(sv);
    vectors = std::move(svec);
}

SmallInverse spectral_inverse(std::vector<double> a, int n, double max_condition) {
    // Symmetrize first; callers pass matrices that are symmetric up to roundoff.
    for (int r = 0; r < n; ++r)
        for (int c = r + 1; c < n; ++c) {
            const double avg = 0.5 * (a[static_cast<std::size_t>(r * n + c)] + a[static_cast<std::size_t>(c * n + r)]);
            a[static_cast<std::size_t>(r * n + c)] = avg;
            a[static_cast<std::size_t>(c * n + r)] = avg;
        }
    if (!std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); }))
        throw DomainError("symmetric_inverse: non-finite matrix entry");

    std::vector<double> values;
    std::vector<double> vectors;
    jacobi_eigen(a, n, values, vectors);

    double max_abs = 0.0;
    double min_abs = std::numeric_limits<double>::infinity();
    for (double v : values) {
        max_abs = std::max(max_abs, std::abs(v));
        min_abs = std::min(min_abs, std::abs(v));
    }
    SmallInverse out;
    out.condition = (min_abs > 0.0) ? max_abs / min_abs : std::numeric_limits<double>::infinity();
    out.pseudo = !(out.condition <= max_condition);
    const double cutoff = out.pseudo ? max_abs * 1e-12 : 0.0;

    out.inverse.assign(static_cast<std::size_t>(n * n), 0.0);
    for (int k = 0; k < n; ++k) {
        const double lam = values[static_cast<std::size_t>(k)];
        if (max_abs == 0.0 || std::abs(lam) <= cutoff) continue;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                out.inverse[static_cast<std::size_t>(r * n + c)] +=
                    vectors[static_cast<std::size_t>(r * n + k)] * vectors[static_cast<std::size_t>(c * n + k)] / lam;
    }
    return out;
}

Mat3 from_flat(const std::vector<double>& v) {
    Mat3 m;
    std::copy(v.begin(), v.end(), m.a.begin());
    return m;
}

}  // namespace

SymEigen sym_eigen(const Mat3& m) {
    std::vector<double> a(m.a.begin(), m.a.end());
    std::vector<double> values;
    std::vector<double> vectors;
    jacobi_eigen(a, 3, values, vectors);
    SymEigen out;
    std::copy(values.begin(), values.end(), out.values.begin());
    out.vectors = from_flat(vectors);
    return out;
}

Vec3 solve3(const Mat3& m, const Vec3& b) {
    std::array<std::array<double, 4>, 3> aug{};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) aug[r][c] = m(r, c);
        aug[r][3] = b[r];
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(aug[r][col]) > std::abs(aug[piv][col])) piv = r;
        if (aug[piv][col] == 0.0) throw DomainError("solve3: singular matrix");
        std::swap(aug[col], aug[piv]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = aug[r][col] / aug[col][col];
            for (int c = col; c < 4; ++c) aug[r][c] -= f * aug[col][c];
        }
    }
    Vec3 x{};
    for (int r = 2; r >= 0; --r) {
        double s = aug[r][3];
        for (int c = r + 1; c < 3; ++c) s -= aug[r][c] * x[c];
        x[r] = s / aug[r][r];
    }
    return x;
}

InverseResult inverse3(const Mat3& m) {
    InverseResult out;
    for (int c = 0; c < 3; ++c) {
        Vec3 e{};
        e[c] = 1.0;
        const Vec3 col = solve3(m, e);
        for (int r = 0; r < 3; ++r) out.inverse(r, c) = col[r];
    }
    auto norm1 = [](const Mat3& x) {
        double best = 0.0;
        for (int c = 0; c < 3; ++c) best = std::max(best, std::abs(x(0, c)) + std::abs(x(1, c)) + std::abs(x(2, c)));
        return best;
    };
    out.condition = norm1(m) * norm1(out.inverse);
    return out;
}

Mat3 pseudo_inverse3(const Mat3& m, double rel_tol) {
    const SymEigen eig = sym_eigen(m);
    double max_abs = 0.0;
    for (double v : eig.values) max_abs = std::max(max_abs, std::abs(v));
    Mat3 out;
    if (max_abs == 0.0) return out;
    for (int k = 0; k < 3; ++k) {
        const double lam = eig.values[k];
        if (std::abs(lam) <= rel_tol * max_abs) continue;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) out(r, c) += eig.vectors(r, k) * eig.vectors(c, k) / lam;
    }
    return out;
}

InverseResult symmetric_inverse3(const Mat3& m, double max_condition) {
    const SmallInverse s = spectral_inverse(std::vector<double>(m.a.begin(), m.a.end()), 3, max_condition);
    return {from_flat(s.inverse), s.condition, s.pseudo};
}

SmallInverse symmetric_inverse_small(std::span<const double> m, int n, double max_condition) {
    if (n < 1 || n > 3 || m.size() != static_cast<std::size_t>(n * n))
        throw std::invalid_argument("symmetric_inverse_small: expected an n x n matrix with 1 <= n <= 3");
    return spectral_inverse(std::vector<double>(m.begin(), m.end()), n, max_condition);
}

// ---------------------------------------------------------------------------
// Gamma family

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_sum(double z) {
    double s = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) s += kLanczos[i] / (z + static_cast<double>(i));
    return s;
}

}  // namespace

double gamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("gamma_fn: argument must be positive, got " + std::to_string(x));
    if (x < 0.5) {
        // Reflection keeps the Lanczos series in its accurate range.
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
    }
    const double z = x - 1.0;
    const double t = z + kLanczosG + 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * lanczos_sum(z);
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
    if (x < 0.5) return std::log(std::numbers::pi / std::abs(std::sin(std::numbers::pi * x))) - log_gamma(1.0 - x);
    const double z = x - 1.0;
    const double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(lanczos_sum(z));
}

double digamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("digamma_fn: argument must be positive");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    // Asymptotic expansion with Bernoulli coefficients.
    const double series =
        inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12.0))))));
    return acc + std::log(x) - 0.5 * inv - series;
}

namespace {

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 100000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-17) break;
    }
    return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || std::isnan(x)) throw DomainError("regularized_gamma_p: need a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0 || std::isnan(x)) throw DomainError("regularized_gamma_q: need a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

double chi2_cdf(double x, double df) {
    if (!(df > 0.0)) throw DomainError("chi2_cdf: degrees of freedom must be positive");
    if (x <= 0.0) return 0.0;
    return regularized_gamma_p(0.5 * df, 0.5 * x);
}

double chi2_sf(double x, double df) {
    if (!(df > 0.0)) throw DomainError("chi2_sf: degrees of freedom must be positive");
    if (x <= 0.0) return 1.0;
    return regularized_gamma_q(0.5 * df, 0.5 * x);
}

double chi2_quantile(double p, double df) {
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("chi2_quantile: p must lie in [0, 1)");
    if (!(df > 0.0)) throw DomainError("chi2_quantile: degrees of freedom must be positive");
    if (p == 0.0) return 0.0;
    double lo = 0.0;
    double hi = std::max(1.0, df);
    while (chi2_cdf(hi, df) < p) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (chi2_cdf(mid, df) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double chi2_critical(double alpha, double df) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("chi2_critical: alpha must lie in (0, 1)");
    return chi2_quantile(1.0 - alpha, df);
}

double noncentral_chi2_cdf(double x, double df, double ncp) {
    if (ncp < 0.0) throw DomainError("noncentral_chi2_cdf: non-centrality must be non-negative");
    if (ncp == 0.0) return chi2_cdf(x, df);
    if (x <= 0.0) return 0.0;
    const double half = 0.5 * ncp;
    double total = 0.0;
    double weight_sum = 0.0;
    const int j_max = static_cast<int>(half + 60.0 * std::sqrt(half) + 200.0);
    for (int j = 0; j <= j_max; ++j) {
        const double w = std::exp(-half + j * std::log(half) - log_gamma(j + 1.0));
        total += w * chi2_cdf(x, df + 2.0 * j);
        weight_sum += w;
        if (j > half && 1.0 - weight_sum < 1e-12) break;
    }
    return std::clamp(total, 0.0, 1.0);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("std_normal_quantile: p must lie in (0, 1)");
    // Acklam's rational approximation followed by one Halley step.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double e = std_normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace robalt
