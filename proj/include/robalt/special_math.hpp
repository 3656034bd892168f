#pragma once

// Special functions and fixed-size linear algebra for the three-parameter
// model. Everything here is pure and thread-safe.

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace robalt {

/// Raised for arguments outside a function's mathematical domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

using Vec3 = std::array<double, 3>;

/// 3x3 matrix, row-major.
struct Mat3 {
    std::array<double, 9> a{};

    double& operator()(int r, int c) { return a[static_cast<std::size_t>(3 * r + c)]; }
    double operator()(int r, int c) const { return a[static_cast<std::size_t>(3 * r + c)]; }

    static Mat3 zero() { return {}; }
    static Mat3 identity();
    static Mat3 diag(double d0, double d1, double d2);
    static Mat3 outer(const Vec3& u, const Vec3& v);

    Mat3 transposed() const;
    double trace() const { return a[0] + a[4] + a[8]; }
    bool is_finite() const;
};

Mat3 operator+(const Mat3& x, const Mat3& y);
Mat3 operator-(const Mat3& x, const Mat3& y);
Mat3 operator*(const Mat3& x, const Mat3& y);
Mat3 operator*(double s, const Mat3& x);
Vec3 operator*(const Mat3& m, const Vec3& v);

Vec3 operator+(const Vec3& u, const Vec3& v);
Vec3 operator-(const Vec3& u, const Vec3& v);
Vec3 operator*(double s, const Vec3& v);
double dot(const Vec3& u, const Vec3& v);
double norm(const Vec3& v);
/// u^T A v
double quad_form(const Vec3& u, const Mat3& m, const Vec3& v);

/// Eigen-decomposition of a symmetric matrix (cyclic Jacobi). Eigenvalues are
/// sorted ascending; column k of `vectors` belongs to `values[k]`.
struct SymEigen {
    Vec3 values;
    Mat3 vectors;
};
SymEigen sym_eigen(const Mat3& m);

struct InverseResult {
    Mat3 inverse;
    double condition = 1.0;
    bool pseudo = false;  ///< true when the condition threshold forced a pseudo-inverse
};

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Throws DomainError when A is exactly singular.
Vec3 solve3(const Mat3& m, const Vec3& b);

/// General inverse with a 1-norm condition estimate. Throws DomainError when A
/// is exactly singular.
InverseResult inverse3(const Mat3& m);

/// Moore-Penrose inverse of a symmetric matrix; eigenvalues with
/// |lambda| <= rel_tol * max|lambda| are dropped.
Mat3 pseudo_inverse3(const Mat3& m, double rel_tol = 1e-12);

/// Symmetric inverse via eigen-decomposition. When the condition number exceeds
/// `max_condition` the pseudo-inverse is returned and flagged.
InverseResult symmetric_inverse3(const Mat3& m, double max_condition = 1e12);

/// Inverse of a small (n <= 3) symmetric matrix stored row-major, with the same
/// pseudo-inverse fallback as symmetric_inverse3.
struct SmallInverse {
    std::vector<double> inverse;
    double condition = 1.0;
    bool pseudo = false;
};
SmallInverse symmetric_inverse_small(std::span<const double> m, int n, double max_condition = 1e12);

// ---------------------------------------------------------------------------
// Special functions

double gamma_fn(double x);
double log_gamma(double x);
double digamma_fn(double x);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

double chi2_cdf(double x, double df);
double chi2_sf(double x, double df);
/// Inverse of chi2_cdf by bisection; the bracket is shrunk below 1e-12 * max(1, x).
double chi2_quantile(double p, double df);
/// Upper-tail critical value: chi2_quantile(1 - alpha, df).
double chi2_critical(double alpha, double df);
/// Poisson mixture of central chi-square cdfs; tail weight truncated at 1e-12.
double noncentral_chi2_cdf(double x, double df, double ncp);

double std_normal_cdf(double x);
double std_normal_quantile(double p);

}  // namespace robalt
