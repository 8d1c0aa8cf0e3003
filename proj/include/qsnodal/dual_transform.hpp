#pragma once

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace qsnodal {

// Odd change of variables f with f(0) = 0 and f'(t) = (1 + 2 f(t)^2)^(-1/2).
// Its inverse has the closed form
//
//     F(y) = y * sqrt(1 + 2 y^2) / 2 + asinh(sqrt(2) y) / (2 sqrt(2)),
//
// (F' = sqrt(1 + 2 y^2), checked against quadrature in the test suite), so the
// forward map is evaluated by inverting F with a bracketed Newton iteration.
// F is convex and increasing on y >= 0 and f(t) <= min(t, 2^(1/4) sqrt(t)),
// which gives a rigorous initial bracket [0, min(t, 2^(1/4) sqrt(t))].
//
// Key facts used throughout the library (all property-tested):
//   |f'(t)| <= 1, |f(t)| <= |t|, |f(t)| <= 2^(1/4) |t|^(1/2),
//   f(t)/t -> 1 as t -> 0, f(t)/sqrt(t) -> 2^(1/4) as t -> +inf,
//   f''(t) = -2 f(t) f'(t)^4.
struct DualTransform {
    double newton_tol = 1e-13; // residual tolerance |F(y) - t| <= tol * max(1, |t|)
    int max_newton_iters = 100;

    // Closed-form inverse F(y); odd in y.
    static double inverse(double y) {
        const double a = std::fabs(y);
        const double s = std::sqrt(1.0 + 2.0 * a * a);
        const double v = 0.5 * a * s + std::asinh(M_SQRT2 * a) / (2.0 * M_SQRT2);
        return std::copysign(v, y);
    }

    // f(t) by safeguarded Newton on F(y) = t.  Throws NonConvergence if the
    // iteration budget is exhausted (does not happen with the default budget).
    double forward(double t) const {
        if (t == 0.0) return 0.0;
        const double a = std::fabs(t);
        // Past ~1e300 the closed-form asymptote is exact to double precision
        // and keeps intermediates clear of overflow.
        if (a >= 1e300) return std::copysign(std::pow(2.0, 0.25) * std::sqrt(a), t);

        double lo = 0.0;
        double hi = std::min(a, std::pow(2.0, 0.25) * std::sqrt(a));
        double y = hi;
        const double tol = newton_tol * std::max(1.0, a);
        for (int it = 0; it < max_newton_iters; ++it) {
            const double err = inverse(y) - a;
            if (std::fabs(err) <= tol) return std::copysign(y, t);
            if (err > 0.0) hi = y; else lo = y;
            const double step = err / std::sqrt(1.0 + 2.0 * y * y);
            double yn = y - step;
            if (!(yn > lo && yn < hi)) yn = 0.5 * (lo + hi); // bisection fallback
            y = yn;
        }
        throw NonConvergence("dual transform inversion exceeded max_newton_iters");
    }

    // f'(t) and f''(t); overloads taking a precomputed y = f(t) avoid
    // re-inverting in quadrature loops.
    static double prime_from_f(double y) { return 1.0 / std::sqrt(1.0 + 2.0 * y * y); }
    static double second_from_f(double y) {
        const double fp = prime_from_f(y);
        const double fp2 = fp * fp;
        return -2.0 * y * fp2 * fp2;
    }
    double prime(double t) const { return prime_from_f(forward(t)); }
    double second(double t) const { return second_from_f(forward(t)); }
};

} // namespace qsnodal
