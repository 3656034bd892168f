#pragma once

// Unconstrained minimization in three variables: BFGS with backtracking line
// search, then a few Newton steps on a finite-difference Hessian of the
// analytic gradient to polish the gradient norm down to roundoff.

#include <functional>

#include "robalt/special_math.hpp"

namespace robalt {

/// Returns f(y) and writes the gradient into `grad`. May throw DomainError for
/// points outside the objective's domain; the line search backs off from them.
using ObjectiveFn = std::function<double(const Vec3& y, Vec3& grad)>;

struct OptimizeOptions {
    int max_iters = 500;
    double grad_tol = 1e-8;
    double param_tol = 1e-10;
};

struct OptimizeResult {
    Vec3 y{};
    double value = 0.0;
    Vec3 grad{};
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

OptimizeResult minimize(const ObjectiveFn& f, const Vec3& y0, const OptimizeOptions& opts);

}  // namespace robalt
