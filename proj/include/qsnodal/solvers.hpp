#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "energy.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "radial_mesh.hpp"

namespace qsnodal {

struct SolverOptions {
    double el_tol = 1e-6;       // weighted-l2 Euler-Lagrange residual target
    int max_iters = 5000;       // descent iteration cap
    double armijo_c = 1e-4;     // sufficient-decrease constant
    double step_init = 1.0;     // initial backtracking step
    double step_shrink = 0.5;   // backtracking factor
    int max_backtracks = 40;
    std::string seed = "eigen"; // "eigen" | "gaussian" (ground solves)

    // outer nodal-radius optimization
    double radius_tol_factor = 1e-3; // * R: outer stop when radii move less
    double min_sep_factor = 0.05;    // * R/(k+1): minimal annulus width
    int outer_max_sweeps = 30;
    double inner_el_tol = 1e-4; // relaxed tolerance while radii still move
    int inner_max_iters = 1500;
    int n_local_min = 48; // minimum nodes for the per-annulus grids
};

struct SolveReport {
    std::string task;
    std::string mode = "nonvanishing";
    std::string sign = "plus";
    int k = 0;
    bool converged = false;
    std::string failure_reason;
    double energy = kNaN;
    // weighted-L2 norm of the Euler-Lagrange residual; for the glued k-node
    // construction this is the worst per-annulus value (see interface_mismatch
    // for the defect of the glued global field)
    double el_residual = kNaN;
    std::vector<double> nehari_residuals;
    int node_count = -1;
    std::vector<double> partition;
    long iterations = 0;
    int grid_dim = 3;
    double grid_inner = 0.0, grid_outer = 0.0;
    int grid_n = 0;
    double l = kNaN;
    bool theta_generalized = false;
    double max_energy_increase = 0.0; // worst accepted uphill step (monotonicity audit)

    // optional diagnostics; NaN marks "not applicable"
    double nodal_energy = kNaN, direct_energy = kNaN, path_gap = kNaN;
    double mu = kNaN, mu1 = kNaN, mu2 = kNaN;
    double seed_s0 = kNaN, seed_t0 = kNaN;
    // bracket certificates for the vanishing-mode seed scalars: psi > 0 at the
    // low end and psi < 0 at the high end pin the root's existence
    double cert1_s_pos = kNaN, cert1_psi_pos = kNaN, cert1_s_neg = kNaN, cert1_psi_neg = kNaN;
    double cert2_s_pos = kNaN, cert2_psi_pos = kNaN, cert2_s_neg = kNaN, cert2_psi_neg = kNaN;
    double interface_mismatch = kNaN; // glued-field residual at the node interfaces
    std::vector<double> piece_energies;
};

// Interior node radii 0 < rho_1 < ... < rho_k < R with minimal separation.
struct NodalPartition {
    double R = 0.0;
    double min_sep = 0.0;
    std::vector<double> radii;

    NodalPartition(double R_, std::vector<double> radii_, double min_sep_)
        : R(R_), min_sep(min_sep_), radii(std::move(radii_)) {
        double prev = 0.0;
        for (double r : radii) {
            if (!(r >= prev + min_sep))
                throw InfeasiblePartition("node radii violate the minimal separation");
            prev = r;
        }
        if (!radii.empty() && !(radii.back() <= R - min_sep))
            throw InfeasiblePartition("last node radius too close to the outer boundary");
    }
};

namespace detail {

inline double max_abs(const RadialField& u) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, std::fabs(v));
    return m;
}

// Count strict sign alternations, ignoring entries below 1e-8 * max|u|.
inline int count_sign_changes(const RadialField& u) {
    const double thresh = 1e-8 * max_abs(u);
    if (thresh == 0.0) return 0;
    int changes = 0, prev = 0;
    for (double v : u.values) {
        if (std::fabs(v) <= thresh) continue;
        const int s = v > 0.0 ? 1 : -1;
        if (prev != 0 && s != prev) ++changes;
        prev = s;
    }
    return changes;
}

struct DescentOutcome {
    RadialField v;
    double energy = kNaN;
    double el_residual = kNaN;
    long iterations = 0;
    bool converged = false;
    std::string reason;
    double max_energy_increase = 0.0;
};

// Projected descent on a constraint manifold.  The step direction is the
// H^1 Riesz representative of dI (one tridiagonal solve with the stiffness
// plus mass preconditioner); candidates are mapped back onto the manifold by
// `project` before the Armijo test, and convergence is measured by the
// weighted-l2 norm of the Euler-Lagrange residual field.
inline DescentOutcome descend(const EnergyModel& em, RadialField v,
                              const std::function<std::optional<RadialField>(const RadialField&)>& project,
                              double el_tol, int max_iters, const SolverOptions& opts) {
    const RadialGrid& g = *em.grid;
    TridiagMatrix P = stiffness_matrix(g);
    for (int i = 0; i < g.n; ++i) P.d[i] += g.quad_weights[i];
    const TridiagFactor PF(P);

    DescentOutcome out;
    double I0 = functional_I(em, v);
    for (long it = 0; it < max_iters; ++it) {
        const RadialField res = euler_lagrange_residual(em, v);
        const double rn = l2_norm(res);
        if (rn <= el_tol) {
            out.v = v;
            out.energy = I0;
            out.el_residual = rn;
            out.iterations = it;
            out.converged = true;
            return out;
        }
        std::vector<double> d(g.n);
        for (int i = 0; i < g.n; ++i) d[i] = g.quad_weights[i] * res.values[i];
        PF.solve_inplace(d);
        double m = 0.0; // directional derivative along the step
        for (int i = 0; i < g.n; ++i) m += g.quad_weights[i] * res.values[i] * d[i];

        const double slack = 1e-12 * std::max(1.0, std::fabs(I0));
        double alpha = opts.step_init;
        bool accepted = false;
        for (int bt = 0; bt <= opts.max_backtracks; ++bt, alpha *= opts.step_shrink) {
            RadialField cand(em.grid);
            for (int i = 0; i < g.n; ++i) cand.values[i] = v.values[i] - alpha * d[i];
            std::optional<RadialField> proj = project(cand);
            if (!proj) continue;
            const double Ic = functional_I(em, *proj);
            if (Ic <= I0 - opts.armijo_c * alpha * m + slack) {
                out.max_energy_increase = std::max(out.max_energy_increase, Ic - I0);
                v = std::move(*proj);
                I0 = Ic;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            out.v = v;
            out.energy = I0;
            out.el_residual = rn;
            out.iterations = it;
            out.converged = false;
            out.reason = "LineSearchStalled";
            return out;
        }
    }
    const RadialField res = euler_lagrange_residual(em, v);
    out.v = v;
    out.energy = I0;
    out.el_residual = l2_norm(res);
    out.iterations = max_iters;
    out.converged = out.el_residual <= el_tol;
    if (!out.converged) out.reason = "MaxItersExceeded";
    return out;
}

inline RadialField gaussian_bump(const GridPtr& grid) {
    RadialField u(grid);
    const double mid = 0.5 * (grid->inner + grid->outer);
    const double width = (grid->outer - grid->inner) / 6.0;
    for (int i = 0; i < grid->n; ++i) {
        const double z = (grid->nodes[i] - mid) / width;
        u.values[i] = std::exp(-0.5 * z * z);
    }
    // respect the boundary conditions: taper hard near the edges
    for (int i = 0; i < grid->n; ++i) {
        const double r = grid->nodes[i];
        const double dband = 0.05 * (grid->outer - grid->inner);
        if (grid->inner > 0.0 && r - grid->inner < dband)
            u.values[i] *= (r - grid->inner) / dband;
        if (grid->outer - r < dband) u.values[i] *= (grid->outer - r) / dband;
    }
    return u;
}

} // namespace detail

// Positive (or negative) least-energy solution of the subdomain problem on
// the annulus {rho < |x| < sigma} (ball when rho = 0), discretized on its own
// local grid at the resolution of em's grid.  Seeded by the first Dirichlet
// eigenfield (or a Gaussian bump), scaled onto the constraint manifold, then
// driven by projected descent; iterates are purified to the requested sign
// (|v| replacement, which never increases the energy).
inline std::pair<RadialField, SolveReport> solve_annulus_ground(
    const EnergyModel& em, double rho, double sigma, int sign, const SolverOptions& opts,
    const RadialField* warm_seed = nullptr) {
    const bool whole = (rho == em.grid->inner && sigma == em.grid->outer);
    EnergyModel local;
    if (whole) {
        local = em;
    } else {
        const int n_local = std::max(opts.n_local_min,
                                     static_cast<int>(std::lround((sigma - rho) / em.grid->h)) - 1);
        local = make_energy_model(build_annulus_grid(em.grid->dim, rho, sigma, n_local), em.nl,
                                  em.pot, em.transform);
        local.nehari_tol_factor = em.nehari_tol_factor;
        local.s_max = em.s_max;
    }

    SolveReport rep;
    rep.task = "annulus_ground";
    rep.sign = sign >= 0 ? "plus" : "minus";
    rep.grid_dim = local.grid->dim;
    rep.grid_inner = local.grid->inner;
    rep.grid_outer = local.grid->outer;
    rep.grid_n = local.grid->n;
    rep.l = em.nl.l;
    rep.theta_generalized = (em.nl.l != 1.0);

    // seed: warm restart if usable, else eigenfield / Gaussian bump
    RadialField seed;
    bool have_seed = false;
    if (warm_seed && warm_seed->grid) {
        RadialField w = interpolate(*warm_seed, local.grid);
        for (double& x : w.values) x = std::fabs(x);
        if (detail::max_abs(w) > 0.0 && theta_test(local, w).ok) {
            seed = std::move(w);
            have_seed = true;
        }
    }
    if (!have_seed) {
        if (opts.seed == "gaussian") {
            seed = detail::gaussian_bump(local.grid);
        } else {
            seed = dirichlet_eig_first(local.grid).field;
        }
        const ThetaResult th = theta_test(local, seed);
        if (!th.ok)
            throw SeedNotProjectable(
                "seed fails the projectability test: grad_sq = " + std::to_string(th.grad) +
                " >= l |u|_2^2 = " + std::to_string(th.l * th.l2sq) + " on annulus (" +
                std::to_string(rho) + ", " + std::to_string(sigma) + ")");
    }

    RadialField v0;
    try {
        v0 = project_nehari(local, seed).field;
    } catch (const NotProjectable& e) {
        throw SeedNotProjectable(std::string("seed projection failed: ") + e.what());
    }

    auto project = [&local](const RadialField& raw) -> std::optional<RadialField> {
        RadialField pur(raw.grid);
        for (size_t i = 0; i < raw.values.size(); ++i) pur.values[i] = std::fabs(raw.values[i]);
        if (detail::max_abs(pur) == 0.0) return std::nullopt;
        try {
            return project_nehari(local, pur).field;
        } catch (const Error&) {
            return std::nullopt;
        }
    };

    detail::DescentOutcome dout = detail::descend(local, v0, project, opts.el_tol,
                                                  opts.max_iters, opts);
    rep.converged = dout.converged;
    rep.failure_reason = dout.reason;
    rep.energy = dout.energy;
    rep.el_residual = dout.el_residual;
    rep.iterations = dout.iterations;
    rep.max_energy_increase = dout.max_energy_increase;
    rep.nehari_residuals = {std::fabs(nehari_psi(local, dout.v, 1.0))};
    RadialField field = (sign >= 0) ? dout.v : scaled(dout.v, -1.0);
    rep.node_count = detail::count_sign_changes(field);
    return {std::move(field), std::move(rep)};
}

namespace detail {

// Minimize fn over [a, b] by golden-section search; fn may return +inf for
// infeasible points.  Returns the best sampled point.
inline std::pair<double, double> golden_min(const std::function<double(double)>& fn, double a,
                                            double b, double xtol) {
    const double invphi = 0.6180339887498949;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = fn(c), fd = fn(d);
    double bx = fc < fd ? c : d;
    double bf = std::min(fc, fd);
    while (b - a > xtol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = fn(d);
        }
        if (fc < bf) { bf = fc; bx = c; }
        if (fd < bf) { bf = fd; bx = d; }
    }
    return {bx, bf};
}

} // namespace detail

// Sign-changing solution with exactly k interior nodes, built by gluing k+1
// alternating-sign annulus ground states and optimizing the node radii by
// cyclic per-coordinate golden-section search on the summed subdomain
// energies.  Inner solves run at a relaxed tolerance (warm-restarted) while
// the radii move, then every annulus is polished at full tolerance.
inline std::pair<RadialField, SolveReport> solve_k_node(const EnergyModel& em, int k,
                                                        const SolverOptions& opts,
                                                        int sign_first = +1) {
    if (k < 0) throw BadConfig("k must be nonnegative");
    if (em.grid->inner != 0.0) throw BadConfig("k-node construction expects a ball grid");
    if (k == 0) {
        auto [field, rep] = solve_annulus_ground(em, 0.0, em.grid->outer, sign_first, opts);
        rep.task = "k_node";
        rep.k = 0;
        rep.piece_energies = {rep.energy};
        return {std::move(field), std::move(rep)};
    }

    const double R = em.grid->outer;
    const double min_sep = opts.min_sep_factor * R / (k + 1);
    const double radius_tol = opts.radius_tol_factor * R;
    std::vector<double> rho(k);
    for (int j = 0; j < k; ++j) rho[j] = R * (j + 1) / (k + 1);
    NodalPartition init(R, rho, min_sep); // validates the initial partition

    SolverOptions inner = opts;
    inner.el_tol = opts.inner_el_tol;
    inner.max_iters = opts.inner_max_iters;

    std::vector<RadialField> warm(k + 1);
    long total_iters = 0;
    const double inf = std::numeric_limits<double>::infinity();

    auto piece_energy = [&](double lo, double hi, int piece, const SolverOptions& o) -> double {
        if (hi - lo < min_sep) return inf;
        try {
            auto [field, rep] = solve_annulus_ground(em, lo, hi, +1, o,
                                                     warm[piece].grid ? &warm[piece] : nullptr);
            total_iters += rep.iterations;
            if (!std::isfinite(rep.energy)) return inf;
            warm[piece] = std::move(field);
            return rep.energy;
        } catch (const SeedNotProjectable&) {
            return inf;
        } catch (const TooFewNodes&) {
            return inf;
        } catch (const BadResolution&) {
            return inf;
        }
    };

    std::vector<double> E(k + 1);
    for (int j = 0; j <= k; ++j) {
        const double lo = (j == 0) ? 0.0 : rho[j - 1];
        const double hi = (j == k) ? R : rho[j];
        E[j] = piece_energy(lo, hi, j, inner);
        if (!std::isfinite(E[j]))
            throw InfeasiblePartition("initial partition has an unsolvable annulus (piece " +
                                      std::to_string(j) + ")");
    }

    bool outer_converged = false;
    for (int sweep = 0; sweep < opts.outer_max_sweeps && !outer_converged; ++sweep) {
        double moved = 0.0;
        for (int j = 0; j < k; ++j) {
            const double left = (j == 0) ? 0.0 : rho[j - 1];
            const double right = (j == k - 1) ? R : rho[j + 1];
            const double a = left + min_sep, b = right - min_sep;
            if (b <= a) continue;
            auto fn = [&](double r) {
                const double el = piece_energy(left, r, j, inner);
                const double er = piece_energy(r, right, j + 1, inner);
                return el + er;
            };
            // The objective is +inf on flanks where a piece falls below the
            // projectability width, so a bare golden section can narrow onto
            // an infeasible flank when both probes miss the valley between
            // them.  Locate the valley with a coarse scan first, refine
            // around the best cell, and if no probed radius is feasible keep
            // the current one (the standing partition has finite energies).
            const int cells = 16;
            const double cell = (b - a) / cells;
            double seed_r = rho[j], seed_f = fn(rho[j]);
            for (int m = 0; m < cells; ++m) {
                const double r = a + (m + 0.5) * cell;
                const double v = fn(r);
                if (v < seed_f) { seed_f = v; seed_r = r; }
            }
            if (!std::isfinite(seed_f)) continue;
            auto [bx, bf] = detail::golden_min(fn, std::max(a, seed_r - cell),
                                               std::min(b, seed_r + cell), radius_tol);
            if (seed_f < bf) { bx = seed_r; bf = seed_f; }
            moved = std::max(moved, std::fabs(bx - rho[j]));
            rho[j] = bx;
            E[j] = piece_energy(left, bx, j, inner);
            E[j + 1] = piece_energy(bx, right, j + 1, inner);
        }
        if (moved < radius_tol) outer_converged = true;
    }

    // full-tolerance polish of every annulus, then glue with alternating signs
    SolveReport rep;
    rep.task = "k_node";
    rep.k = k;
    rep.mode = "nonvanishing";
    rep.sign = sign_first >= 0 ? "plus" : "minus";
    rep.grid_dim = em.grid->dim;
    rep.grid_inner = em.grid->inner;
    rep.grid_outer = em.grid->outer;
    rep.grid_n = em.grid->n;
    rep.l = em.nl.l;
    rep.theta_generalized = (em.nl.l != 1.0);
    rep.partition = rho;

    RadialField glued(em.grid);
    double energy = 0.0, worst_el = 0.0;
    bool pieces_ok = true;
    std::string piece_fail;
    for (int j = 0; j <= k; ++j) {
        const double lo = (j == 0) ? 0.0 : rho[j - 1];
        const double hi = (j == k) ? R : rho[j];
        const int sgn = (j % 2 == 0) ? sign_first : -sign_first;
        try {
            auto [field, prep] = solve_annulus_ground(em, lo, hi, sgn, opts,
                                                      warm[j].grid ? &warm[j] : nullptr);
            total_iters += prep.iterations;
            energy += prep.energy;
            rep.piece_energies.push_back(prep.energy);
            rep.nehari_residuals.push_back(prep.nehari_residuals.empty()
                                               ? kNaN
                                               : prep.nehari_residuals[0]);
            worst_el = std::max(worst_el, prep.el_residual);
            rep.max_energy_increase = std::max(rep.max_energy_increase, prep.max_energy_increase);
            if (!prep.converged) {
                pieces_ok = false;
                piece_fail = "InnerSolveFailed: annulus " + std::to_string(j) + " (" +
                             prep.failure_reason + ")";
            }
            const RadialField on_global = interpolate(field, em.grid);
            for (int i = 0; i < em.grid->n; ++i) glued.values[i] += on_global.values[i];
        } catch (const Error& e) {
            throw InnerSolveFailed("annulus " + std::to_string(j) + " [" + std::to_string(lo) +
                                   ", " + std::to_string(hi) + "]: " + e.what());
        }
    }

    rep.energy = energy;
    rep.el_residual = worst_el;
    rep.iterations = total_iters;
    rep.node_count = detail::count_sign_changes(glued);
    rep.interface_mismatch = l2_norm(euler_lagrange_residual(em, glued));
    rep.converged = outer_converged && pieces_ok;
    if (!pieces_ok) rep.failure_reason = piece_fail;
    else if (!outer_converged) rep.failure_reason = "OuterRadiiNotSettled";
    return {std::move(glued), std::move(rep)};
}

// Least-energy sign-changing solution.  Two independent routes are run and
// cross-checked: (a) the nodal route, i.e. the k = 1 glued construction, and
// (b) a direct projected descent on the full field with pointwise sign-split
// reprojection.  In vanishing mode the direct route is seeded from the first
// Dirichlet eigenfields of the two declared zero-set subdomains, with the
// scaling roots certified by sign brackets of psi; when no root exists below
// the bracketing cap (the linearized threshold mu is not exceeded by l) the
// construction fails with SeedConstructionFailed.
inline std::pair<RadialField, SolveReport> solve_least_energy_sign_changing(
    const EnergyModel& em, Mode mode, const SolverOptions& opts) {
    SolveReport rep;
    rep.task = "sign_changing";
    rep.mode = to_string(mode);
    rep.k = 1;
    rep.grid_dim = em.grid->dim;
    rep.grid_inner = em.grid->inner;
    rep.grid_outer = em.grid->outer;
    rep.grid_n = em.grid->n;
    rep.l = em.nl.l;
    rep.theta_generalized = (em.nl.l != 1.0);

    // direct-route seed
    RadialField seed;
    if (mode == Mode::vanishing) {
        if (em.pot.zero_subdomains.size() < 2)
            throw BadConfig("vanishing mode requires two declared zero-set subdomains");
        const auto [a1, b1] = em.pot.zero_subdomains[0];
        const auto [a2, b2] = em.pot.zero_subdomains[1];
        const EigResult e1 = dirichlet_eig_first(build_annulus_grid(em.grid->dim, a1, b1, 1024));
        const EigResult e2 = dirichlet_eig_first(build_annulus_grid(em.grid->dim, a2, b2, 1024));
        rep.mu1 = e1.lambda;
        rep.mu2 = e2.lambda;
        rep.mu = std::max(e1.lambda, e2.lambda);
        const RadialField v1 = interpolate(e1.field, em.grid);
        const RadialField v2 = interpolate(e2.field, em.grid);
        ProjectResult p1, p2;
        try {
            p1 = project_nehari(em, v1);
            p2 = project_nehari(em, v2);
        } catch (const NotProjectable& e) {
            throw SeedConstructionFailed(
                "no scaling root for a zero-subdomain eigenfield (l = " + std::to_string(em.nl.l) +
                " vs mu = " + std::to_string(rep.mu) + "): " + e.what());
        }
        rep.seed_s0 = p1.t_u;
        rep.seed_t0 = p2.t_u;
        rep.cert1_s_pos = p1.bracket_lo; rep.cert1_psi_pos = p1.psi_at_lo;
        rep.cert1_s_neg = p1.bracket_hi; rep.cert1_psi_neg = p1.psi_at_hi;
        rep.cert2_s_pos = p2.bracket_lo; rep.cert2_psi_pos = p2.psi_at_lo;
        rep.cert2_s_neg = p2.bracket_hi; rep.cert2_psi_neg = p2.psi_at_hi;
        seed = RadialField(em.grid);
        for (int i = 0; i < em.grid->n; ++i)
            seed.values[i] = p1.t_u * v1.values[i] - p2.t_u * v2.values[i];
    }

    // route (a): nodal construction
    auto [nodal_field, nodal_rep] = solve_k_node(em, 1, opts, +1);
    rep.nodal_energy = nodal_rep.energy;
    rep.partition = nodal_rep.partition;

    if (mode != Mode::vanishing) {
        seed = RadialField(em.grid);
        for (int i = 0; i < em.grid->n; ++i) {
            const double v = nodal_field.values[i];
            seed.values[i] = (v >= 0.0 ? 1.05 : 0.95) * v;
        }
    }

    // route (b): direct sign-split descent
    auto project = [&em](const RadialField& raw) -> std::optional<RadialField> {
        try {
            return project_sign_changing(em, raw).field;
        } catch (const Error&) {
            return std::nullopt;
        }
    };
    RadialField v0;
    try {
        v0 = project_sign_changing(em, seed).field;
    } catch (const NotProjectable& e) {
        throw SeedConstructionFailed(std::string("direct-route seed projection failed: ") +
                                     e.what());
    }
    detail::DescentOutcome direct = detail::descend(em, v0, project, opts.el_tol,
                                                    opts.max_iters, opts);
    rep.direct_energy = direct.energy;
    rep.iterations = nodal_rep.iterations + direct.iterations;
    rep.max_energy_increase = std::max(nodal_rep.max_energy_increase,
                                       direct.max_energy_increase);
    rep.path_gap = std::fabs(direct.energy - nodal_rep.energy) /
                   std::max(1.0, std::min(std::fabs(direct.energy), std::fabs(nodal_rep.energy)));

    const bool use_direct = direct.converged &&
                            (!nodal_rep.converged || direct.energy <= nodal_rep.energy);
    RadialField best = use_direct ? std::move(direct.v) : std::move(nodal_field);
    rep.energy = use_direct ? direct.energy : nodal_rep.energy;
    rep.el_residual = use_direct ? direct.el_residual : nodal_rep.el_residual;
    if (use_direct) {
        // <I'(u), u+-> via the weighted-L2 representative of dI
        const RadialField res = euler_lagrange_residual(em, best);
        const auto [bp, bm] = split_signs(best);
        rep.nehari_residuals = {std::fabs(dot_weighted(res, bp)),
                                std::fabs(dot_weighted(res, bm))};
    } else {
        rep.nehari_residuals = nodal_rep.nehari_residuals;
    }
    rep.node_count = detail::count_sign_changes(best);
    rep.converged = nodal_rep.converged && direct.converged;
    if (!direct.converged)
        rep.failure_reason = "direct route: " + (direct.reason.empty() ? "failed" : direct.reason);
    else if (!nodal_rep.converged)
        rep.failure_reason = "nodal route: " +
                             (nodal_rep.failure_reason.empty() ? "failed" : nodal_rep.failure_reason);
    return {std::move(best), std::move(rep)};
}

} // namespace qsnodal
