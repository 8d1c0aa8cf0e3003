#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dual_transform.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "radial_mesh.hpp"

namespace qsnodal {

// Discretization of the dual energy functional
//
//   I(v) = 1/2 integral |grad v|^2 + 1/2 integral V f(v)^2 - integral G(f(v))
//
// on a radial grid, where f is the dual change of variables.  In the
// semilinear diagnostic mode (Nonlinearity::Kind::semilinear_diagnostic) f is
// replaced by the identity, which exposes closed-form oracles for the
// constraint projection.  Critical points satisfy the transformed equation
//   -Laplace v + V f(v) f'(v) = g(f(v)) f'(v).
struct EnergyModel {
    GridPtr grid;
    DualTransform transform;
    Nonlinearity nl;
    Potential pot;
    bool identity_transform = false;
    std::vector<double> V; // potential evaluated at the nodes

    // Nehari projection controls
    double nehari_tol_factor = 1e-10; // |psi(t_u)| <= factor * max(1, grad_sq(u))
    double s_max = 1e8;               // bracket-doubling cap; exceeding it is NotProjectable

    double f_of(double t) const { return identity_transform ? t : transform.forward(t); }
    double fp_from_f(double y) const {
        return identity_transform ? 1.0 : DualTransform::prime_from_f(y);
    }
    double fpp_from_f(double y) const {
        return identity_transform ? 0.0 : DualTransform::second_from_f(y);
    }
};

inline EnergyModel make_energy_model(GridPtr grid, Nonlinearity nl, Potential pot,
                                     DualTransform transform = {}) {
    EnergyModel em;
    em.grid = std::move(grid);
    em.transform = transform;
    em.identity_transform = (nl.kind == Nonlinearity::Kind::semilinear_diagnostic);
    em.nl = std::move(nl);
    em.pot = std::move(pot);
    em.V.resize(em.grid->n);
    for (int i = 0; i < em.grid->n; ++i) em.V[i] = em.pot.eval(em.grid->nodes[i]);
    return em;
}

inline double functional_I(const EnergyModel& em, const RadialField& v) {
    require_on(v, *em.grid);
    double pot = 0.0;
    for (int i = 0; i < em.grid->n; ++i) {
        const double y = em.f_of(v.values[i]);
        pot += em.grid->quad_weights[i] * (0.5 * em.V[i] * y * y - em.nl.G(y));
    }
    return 0.5 * grad_sq(v) + pot;
}

// Euler-Lagrange residual field r with components
//   r_i = (-Laplace_h v)_i + V_i f(v_i) f'(v_i) - g(f(v_i)) f'(v_i),
// where -Laplace_h is defined through the quadrature weights so that r is the
// exact Riesz representative of dI(v) in the weighted-l2 inner product:
//   <r, h>_w = d/de I(v + e h) at e = 0   for every direction h.
// Its weighted l2 norm is the convergence measure used by the solvers.
inline RadialField euler_lagrange_residual(const EnergyModel& em, const RadialField& v) {
    require_on(v, *em.grid);
    const RadialGrid& g = *em.grid;
    RadialField res(em.grid);
    const double c = g.sphere_area / g.h;
    auto wmid = [&](int cell) { return c * powi(g.inner + (cell + 0.5) * g.h, g.dim - 1); };
    for (int i = 0; i < g.n; ++i) {
        const double vl = (i > 0) ? v.values[i - 1] : 0.0;
        const double vr = (i + 1 < g.n) ? v.values[i + 1] : 0.0;
        double a = wmid(i + 1) * (v.values[i] - vr);
        if (!(i == 0 && g.inner == 0.0)) a += wmid(i) * (v.values[i] - vl);
        const double y = em.f_of(v.values[i]);
        const double fp = em.fp_from_f(y);
        res.values[i] = a / g.quad_weights[i] + (em.V[i] * y - em.nl.g(y)) * fp;
    }
    return res;
}

// Constraint scalar psi(s) = <I'(s u), s u> along the ray through u:
//   psi(s) = s^2 grad_sq(u) + integral V f(su) f'(su) su - integral g(f(su)) f'(su) su.
// u is a constrained critical scaling iff psi(s) = 0; psi(s)/s^2 is strictly
// decreasing, so psi has at most one positive root.
//
// When mag_out is non-null it receives the cancellation magnitude
//   s^2 grad_sq(u) + integral |V f f' su| + integral |g(f) f' su|;
// psi is the difference of quantities of this size, so a small multiple of
// machine epsilon times it bounds the evaluation roundoff of psi — no root
// polish can certify |psi| below that floor.
inline double nehari_psi(const EnergyModel& em, const RadialField& u, double s,
                         double* mag_out = nullptr) {
    require_on(u, *em.grid);
    double mx = 0.0;
    for (double v : u.values) mx = std::max(mx, std::fabs(v));
    if (mx == 0.0) throw ZeroField("nehari_psi of the zero field");
    double acc = 0.0, mag = 0.0;
    for (int i = 0; i < em.grid->n; ++i) {
        const double tau = s * u.values[i];
        const double y = em.f_of(tau);
        const double fp = em.fp_from_f(y);
        const double w = em.grid->quad_weights[i];
        const double pot = w * em.V[i] * y * fp * tau;
        const double src = w * em.nl.g(y) * fp * tau;
        acc += pot - src;
        mag += std::fabs(pot) + std::fabs(src);
    }
    const double quad = s * s * grad_sq(u);
    if (mag_out) *mag_out = quad + mag;
    return quad + acc;
}

// roundoff floor of a psi evaluation with cancellation magnitude mag
inline double psi_noise_floor(double mag) {
    return 4.0 * std::numeric_limits<double>::epsilon() * mag;
}

// d psi / d s, used by the Newton polish of the projection.
inline double nehari_psi_prime(const EnergyModel& em, const RadialField& u, double s) {
    require_on(u, *em.grid);
    double acc = 0.0;
    for (int i = 0; i < em.grid->n; ++i) {
        const double ui = u.values[i];
        const double tau = s * ui;
        const double y = em.f_of(tau);
        const double fp = em.fp_from_f(y);
        const double fpp = em.fpp_from_f(y);
        const double dpot = em.V[i] * (fp * fp * tau + y * fpp * tau + y * fp);
        const double dsrc = em.nl.gp(y) * fp * fp * tau + em.nl.g(y) * (fpp * tau + fp);
        acc += em.grid->quad_weights[i] * (dpot - dsrc) * ui;
    }
    return 2.0 * s * grad_sq(u) + acc;
}

struct ThetaResult {
    double grad = 0.0, l2sq = 0.0, l = 0.0;
    bool ok = false;
    bool generalized = false; // asymptote coefficient l != 1
};

// Membership test for the projectable cone: grad_sq(u) < l |u|_2^2, the
// discrete form of the asymptote criterion governing whether the ray through
// u crosses the constraint manifold.  Callers split sign-changing fields and
// test each one-signed part.
inline ThetaResult theta_test(const EnergyModel& em, const RadialField& u) {
    require_on(u, *em.grid);
    const double l2 = l2_norm(u);
    if (l2 == 0.0) throw ZeroField("theta_test of the zero field");
    ThetaResult r;
    r.grad = grad_sq(u);
    r.l2sq = l2 * l2;
    r.l = em.nl.l;
    r.generalized = (em.nl.l != 1.0);
    r.ok = r.grad < r.l * r.l2sq;
    return r;
}

inline RadialField scaled(const RadialField& u, double s) {
    RadialField out(u.grid);
    for (size_t i = 0; i < u.values.size(); ++i) out.values[i] = s * u.values[i];
    return out;
}

inline std::pair<RadialField, RadialField> split_signs(const RadialField& u) {
    RadialField plus(u.grid), minus(u.grid);
    for (size_t i = 0; i < u.values.size(); ++i) {
        plus.values[i] = std::max(u.values[i], 0.0);
        minus.values[i] = std::min(u.values[i], 0.0);
    }
    return {plus, minus};
}

struct ProjectResult {
    RadialField field; // t_u * u
    double t_u = kNaN;
    double psi_residual = kNaN;
    int psi_evals = 0;
    // sign-bracket certificate for the root: psi(bracket_lo) > 0 > psi(bracket_hi)
    double bracket_lo = kNaN, psi_at_lo = kNaN;
    double bracket_hi = kNaN, psi_at_hi = kNaN;
};

// Scales u onto the constraint manifold: finds the positive root t_u of
//   psi(s) + couple * s = 0
// and returns t_u * u.  The optional linear term carries the discrete
// gradient coupling between adjacent-support sign components (couple >= 0
// keeps the single-crossing structure: both psi(s)/s^2 and couple/s are
// strictly decreasing).  Bracket by doubling/halving (cap s_max, giving a
// decidable NotProjectable), then safeguarded Newton down to
// |psi(t_u) + couple t_u| <= nehari_tol_factor * max(1, grad_sq(u)),
// with the target floored at the roundoff of evaluating psi itself (the
// cancelling terms scale like t_u^2, so for large roots the floor — not the
// requested factor — is the achievable accuracy).
inline ProjectResult project_nehari(const EnergyModel& em, const RadialField& u,
                                    double couple = 0.0) {
    require_on(u, *em.grid);
    double mx = 0.0;
    for (double v : u.values) mx = std::max(mx, std::fabs(v));
    if (mx == 0.0) throw ZeroField("cannot project the zero field");

    const double tol = em.nehari_tol_factor * std::max(1.0, grad_sq(u));
    ProjectResult pr;
    double noise = 0.0; // roundoff floor at the most recent evaluation point
    auto psi = [&](double s) {
        ++pr.psi_evals;
        double mag = 0.0;
        const double val = nehari_psi(em, u, s, &mag) + couple * s;
        noise = psi_noise_floor(mag + std::fabs(couple) * s);
        return val;
    };

    double lo = 1.0, hi = 1.0;
    double p1 = psi(1.0);
    if (p1 < 0.0) {
        hi = 1.0;
        pr.bracket_hi = 1.0;
        pr.psi_at_hi = p1;
        lo = 0.5;
        double pl = psi(lo);
        while (pl <= 0.0) {
            hi = lo;
            pr.bracket_hi = lo;
            pr.psi_at_hi = pl;
            lo *= 0.5;
            if (lo < 1e-12)
                throw NotProjectable("psi has no positive part near s = 0");
            pl = psi(lo);
        }
        pr.bracket_lo = lo;
        pr.psi_at_lo = pl;
    } else if (p1 > 0.0) {
        lo = 1.0;
        pr.bracket_lo = 1.0;
        pr.psi_at_lo = p1;
        hi = 2.0;
        double ph = psi(hi);
        while (ph >= 0.0) {
            lo = hi;
            pr.bracket_lo = hi;
            pr.psi_at_lo = ph;
            hi *= 2.0;
            if (hi > em.s_max)
                throw NotProjectable("psi stays positive up to the bracketing cap s_max");
            ph = psi(hi);
        }
        pr.bracket_hi = hi;
        pr.psi_at_hi = ph;
    } else {
        pr.t_u = 1.0;
        pr.psi_residual = 0.0;
        pr.bracket_lo = pr.bracket_hi = 1.0;
        pr.psi_at_lo = pr.psi_at_hi = 0.0;
        pr.field = scaled(u, 1.0);
        return pr;
    }

    // safeguarded Newton inside the sign bracket
    double s = 0.5 * (lo + hi);
    double ps = psi(s);
    for (int it = 0; it < 200 && std::fabs(ps) > std::max(0.25 * tol, noise); ++it) {
        if (ps > 0.0) lo = s; else hi = s;
        const double dps = nehari_psi_prime(em, u, s) + couple;
        double sn = (dps != 0.0) ? s - ps / dps : 0.5 * (lo + hi);
        if (!(sn > lo && sn < hi)) sn = 0.5 * (lo + hi);
        s = sn;
        ps = psi(s);
    }
    if (std::fabs(ps) > std::max(tol, noise))
        throw NonConvergence("constraint projection polish stalled");
    pr.t_u = s;
    pr.psi_residual = ps;
    pr.field = scaled(u, s);
    return pr;
}

struct SignProjectResult {
    RadialField field; // s_u * u_plus + t_u * u_minus
    double s_u = kNaN, t_u = kNaN;
    double psi_plus = kNaN, psi_minus = kNaN; // residuals of the coupled system
    double coupling = kNaN;                   // grad_dot(u_plus, u_minus) >= 0
    int psi_evals = 0;
};

// Projection onto the sign-changing constraint manifold: find (s_u, t_u) with
//   <I'(s u+ + t u-), s u+> = 0   and   <I'(s u+ + t u-), t u-> = 0.
// The pointwise parts share only the interface cells of the discrete gradient,
// so the system is the isolated single-part constraints plus one exact
// bilinear coupling term s t C with C = grad_dot(u+, u-) >= 0:
//   psi_plus(s) + s (t C) = 0,   psi_minus(t) + t (s C) = 0.
// Each equation keeps the single-root structure for any fixed other factor,
// and C is O(h)-small relative to psi', so alternating the two scalar solves
// contracts rapidly.  A discrete critical point is a fixed point (1, 1).
inline SignProjectResult project_sign_changing(const EnergyModel& em, const RadialField& u) {
    require_on(u, *em.grid);
    auto [plus, minus] = split_signs(u);
    if (l2_norm(plus) == 0.0) throw MissingSign("field has no positive part");
    if (l2_norm(minus) == 0.0) throw MissingSign("field has no negative part");

    SignProjectResult out;
    out.coupling = grad_dot(plus, minus);
    const double tol_p = em.nehari_tol_factor * std::max(1.0, grad_sq(plus));
    const double tol_m = em.nehari_tol_factor * std::max(1.0, grad_sq(minus));

    double s = 1.0, t = 1.0;
    for (int sweep = 0; sweep < 60; ++sweep) {
        double s_new = kNaN, t_new = kNaN;
        try {
            ProjectResult pp = project_nehari(em, plus, t * out.coupling);
            s_new = pp.t_u;
            out.psi_evals += pp.psi_evals;
        } catch (const NotProjectable& e) {
            throw NotProjectable(std::string("positive part: ") + e.what());
        }
        try {
            ProjectResult pm = project_nehari(em, minus, s_new * out.coupling);
            t_new = pm.t_u;
            out.psi_evals += pm.psi_evals;
        } catch (const NotProjectable& e) {
            throw NotProjectable(std::string("negative part: ") + e.what());
        }
        const bool settled = std::fabs(s_new - s) <= 1e-14 * s_new &&
                             std::fabs(t_new - t) <= 1e-14 * t_new && sweep > 0;
        s = s_new;
        t = t_new;
        if (settled) break;
    }
    out.s_u = s;
    out.t_u = t;
    double mag_p = 0.0, mag_m = 0.0;
    const double cross = s * t * out.coupling;
    out.psi_plus = nehari_psi(em, plus, s, &mag_p) + cross;
    out.psi_minus = nehari_psi(em, minus, t, &mag_m) + cross;
    out.psi_evals += 2;
    if (std::fabs(out.psi_plus) > std::max(tol_p, psi_noise_floor(mag_p + cross)) ||
        std::fabs(out.psi_minus) > std::max(tol_m, psi_noise_floor(mag_m + cross)))
        throw NonConvergence("coupled sign-changing projection did not settle");

    out.field = RadialField(u.grid);
    for (int i = 0; i < u.grid->n; ++i)
        out.field.values[i] = s * plus.values[i] + t * minus.values[i];
    return out;
}

} // namespace qsnodal
