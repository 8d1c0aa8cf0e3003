#pragma once

#include <cmath>
#include <functional>

namespace qsnodal {

// Adaptive Simpson integration with Richardson acceptance.  Used as an
// independent oracle against closed-form antiderivatives; not performance
// critical.
namespace detail {
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
} // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-13, int max_depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

} // namespace qsnodal
