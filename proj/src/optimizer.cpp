#include "robalt/optimizer.hpp"

#include <cmath>
#include <limits>

namespace robalt {

namespace {

struct Point {
    Vec3 y{};
    double value = std::numeric_limits<double>::infinity();
    Vec3 grad{};
    bool ok = false;
};

Point probe(const ObjectiveFn& f, const Vec3& y) {
    Point p;
    p.y = y;
    try {
        p.value = f(y, p.grad);
        p.ok = std::isfinite(p.value) && std::isfinite(p.grad[0]) && std::isfinite(p.grad[1]) &&
               std::isfinite(p.grad[2]);
    } catch (const DomainError&) {
        p.ok = false;
    }
    return p;
}

// Armijo backtracking along `dir`; returns the accepted point or a not-ok point.
Point line_search(const ObjectiveFn& f, const Point& cur, const Vec3& dir) {
    const double slope = dot(cur.grad, dir);
    double step = 1.0;
    for (int i = 0; i < 60; ++i) {
        Point next = probe(f, cur.y + step * dir);
        if (next.ok && next.value <= cur.value + 1e-4 * step * slope) return next;
        step *= 0.5;
    }
    return {};
}

// Central differences of the analytic gradient, symmetrized.
bool fd_hessian(const ObjectiveFn& f, const Vec3& y, Mat3& h) {
    for (int c = 0; c < 3; ++c) {
        const double step = 1e-5 * (1.0 + std::abs(y[c]));
        Vec3 up = y;
        Vec3 dn = y;
        up[c] += step;
        dn[c] -= step;
        const Point pu = probe(f, up);
        const Point pd = probe(f, dn);
        if (!pu.ok || !pd.ok) return false;
        for (int r = 0; r < 3; ++r) h(r, c) = (pu.grad[r] - pd.grad[r]) / (2.0 * step);
    }
    h = 0.5 * (h + h.transposed());
    return h.is_finite();
}

}  // namespace

OptimizeResult minimize(const ObjectiveFn& f, const Vec3& y0, const OptimizeOptions& opts) {
    OptimizeResult res;
    Point cur = probe(f, y0);
    if (!cur.ok) {
        res.y = y0;
        res.value = std::numeric_limits<double>::infinity();
        res.grad_norm = std::numeric_limits<double>::infinity();
        return res;
    }

    Mat3 hinv = Mat3::identity();
    int it = 0;
    bool stalled = false;
    for (; it < opts.max_iters && norm(cur.grad) > opts.grad_tol; ++it) {
        Vec3 dir = -1.0 * (hinv * cur.grad);
        if (dot(dir, cur.grad) >= 0.0) {
            hinv = Mat3::identity();
            dir = -1.0 * cur.grad;
        }
        Point next = line_search(f, cur, dir);
        if (!next.ok) {
            if (hinv.a == Mat3::identity().a) {
                stalled = true;
                break;
            }
            hinv = Mat3::identity();
            continue;
        }
        const Vec3 s = next.y - cur.y;
        const Vec3 yk = next.grad - cur.grad;
        const double sy = dot(s, yk);
        if (sy > 1e-300) {
            const double rho = 1.0 / sy;
            const Mat3 left = Mat3::identity() - rho * Mat3::outer(s, yk);
            hinv = left * hinv * left.transposed() + rho * Mat3::outer(s, s);
        }
        const double dvalue = cur.value - next.value;
        cur = next;
        if (norm(s) <= opts.param_tol * (1.0 + norm(cur.y)) && dvalue <= 1e-300) break;
    }

    // Newton polish: cheap at three dimensions and gets the gradient to roundoff.
    if (!stalled) {
        for (int k = 0; k < 20 && norm(cur.grad) > opts.grad_tol; ++k, ++it) {
            Mat3 h;
            if (!fd_hessian(f, cur.y, h)) break;
            Vec3 dir;
            try {
                dir = -1.0 * solve3(h, cur.grad);
            } catch (const DomainError&) {
                break;
            }
            if (dot(dir, cur.grad) >= 0.0) break;
            Point next = probe(f, cur.y + dir);
            // Near the optimum the value barely moves; accept on gradient decrease.
            if (!next.ok || (next.value > cur.value + 1e-12 * (1.0 + std::abs(cur.value)) &&
                             norm(next.grad) >= norm(cur.grad))) {
                next = line_search(f, cur, dir);
                if (!next.ok) break;
            }
            if (norm(next.grad) >= norm(cur.grad) && next.value >= cur.value) break;
            cur = next;
        }
    }

    res.y = cur.y;
    res.value = cur.value;
    res.grad = cur.grad;
    res.grad_norm = norm(cur.grad);
    res.iterations = it;
    res.converged = res.grad_norm <= opts.grad_tol;
    return res;
}

}  // namespace robalt
