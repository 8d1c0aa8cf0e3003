#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "errors.hpp"

namespace qsnodal {

inline double powi(double x, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

// Uniform radial grid on [inner, outer] in dimension N >= 3, discretizing the
// space of radial H^1 fields that vanish at r = outer (and at r = inner when
// inner > 0; a ball grid instead uses the regularity condition u'(0) = 0).
// Stores interior nodes r_i = inner + i h, i = 1..n, h = (outer - inner)/(n+1).
//
// quad_weights carry the volume measure sigma_{N-1} r^(N-1) dr via the
// composite trapezoid rule over [inner, outer]; the half-cell weights of the
// two boundary points are folded into their adjacent interior nodes, so the
// weights sum to the exact shell volume up to the rule's own O(h^2) error
// while fields keep implicit zero boundary values.
struct RadialGrid {
    int dim = 3;
    double inner = 0.0;
    double outer = 1.0;
    int n = 0;
    double h = 0.0;
    double sphere_area = 0.0; // sigma_{N-1} = 2 pi^{N/2} / Gamma(N/2)
    std::vector<double> nodes;
    std::vector<double> quad_weights;

    double volume() const {
        return sphere_area * (powi(outer, dim) - powi(inner, dim)) / dim;
    }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline bool same_grid(const RadialGrid& a, const RadialGrid& b) {
    return a.dim == b.dim && a.inner == b.inner && a.outer == b.outer && a.n == b.n;
}

inline GridPtr build_annulus_grid(int dim, double inner, double outer, int n) {
    if (dim < 3) throw BadDimension("radial grid requires dimension >= 3");
    if (!(outer > inner) || !(inner >= 0.0) || !std::isfinite(outer))
        throw BadResolution("radial grid requires 0 <= inner < outer < inf");
    if (n < 16) throw BadResolution("radial grid requires at least 16 interior nodes");

    auto g = std::make_shared<RadialGrid>();
    g->dim = dim;
    g->inner = inner;
    g->outer = outer;
    g->n = n;
    g->h = (outer - inner) / (n + 1);
    g->sphere_area = 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
    g->nodes.resize(n);
    g->quad_weights.resize(n);
    for (int i = 0; i < n; ++i) {
        g->nodes[i] = inner + (i + 1) * g->h;
        g->quad_weights[i] = g->h * g->sphere_area * powi(g->nodes[i], dim - 1);
    }
    // boundary half-cell folds (the r = inner one vanishes for a ball)
    g->quad_weights[0] += 0.5 * g->h * g->sphere_area * powi(inner, dim - 1);
    g->quad_weights[n - 1] += 0.5 * g->h * g->sphere_area * powi(outer, dim - 1);
    return g;
}

inline GridPtr build_grid(int dim, double R, int n) {
    return build_annulus_grid(dim, 0.0, R, n);
}

// Radial field sampled at the interior nodes of its grid; boundary values are
// implicitly zero at r = outer (and r = inner for annulus grids).
struct RadialField {
    GridPtr grid;
    std::vector<double> values;

    RadialField() = default;
    explicit RadialField(GridPtr g) : grid(std::move(g)), values(grid->n, 0.0) {}
    RadialField(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (static_cast<int>(values.size()) != grid->n)
            throw GridMismatch("field value count differs from grid node count");
    }
};

inline void require_on(const RadialField& u, const RadialGrid& g) {
    if (!u.grid || !same_grid(*u.grid, g) || static_cast<int>(u.values.size()) != g.n)
        throw GridMismatch("field does not live on the expected grid");
}

inline double integrate(const RadialGrid& g, const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != g.n)
        throw GridMismatch("integrand value count differs from grid node count");
    double s = 0.0;
    for (int i = 0; i < g.n; ++i) s += g.quad_weights[i] * values[i];
    return s;
}

inline double dot_weighted(const RadialField& a, const RadialField& b) {
    require_on(a, *b.grid);
    double s = 0.0;
    const auto& w = a.grid->quad_weights;
    for (int i = 0; i < a.grid->n; ++i) s += w[i] * a.values[i] * b.values[i];
    return s;
}

inline double lp_norm(const RadialField& u, double p) {
    if (!u.grid) throw GridMismatch("field has no grid");
    if (!(p >= 1.0)) throw BadConfig("lp_norm requires p >= 1");
    double s = 0.0;
    const auto& w = u.grid->quad_weights;
    for (int i = 0; i < u.grid->n; ++i) s += w[i] * std::pow(std::fabs(u.values[i]), p);
    return std::pow(s, 1.0 / p);
}

inline double l2_norm(const RadialField& u) {
    if (!u.grid) throw GridMismatch("field has no grid");
    double s = 0.0;
    const auto& w = u.grid->quad_weights;
    for (int i = 0; i < u.grid->n; ++i) s += w[i] * u.values[i] * u.values[i];
    return std::sqrt(s);
}

// Discrete Dirichlet energy integral(|grad u|^2) via midpoint fluxes on cells:
//   grad_sq(u) = (sigma/h) * sum_cells r_{mid}^(N-1) (u_right - u_left)^2,
// with u = 0 beyond the grid and, for ball grids, a mirror value at r = 0
// (the origin cell then contributes nothing).
inline double grad_sq(const RadialField& u) {
    if (!u.grid) throw GridMismatch("field has no grid");
    const RadialGrid& g = *u.grid;
    const double* v = u.values.data();
    double s = 0.0;
    const bool ball = (g.inner == 0.0);
    if (!ball) {
        const double rmid = g.inner + 0.5 * g.h;
        s += powi(rmid, g.dim - 1) * v[0] * v[0];
    }
    for (int c = 1; c < g.n; ++c) { // cell between nodes c-1 and c (0-based)
        const double rmid = g.inner + (c + 0.5) * g.h;
        const double d = v[c] - v[c - 1];
        s += powi(rmid, g.dim - 1) * d * d;
    }
    const double rmid = g.outer - 0.5 * g.h;
    s += powi(rmid, g.dim - 1) * v[g.n - 1] * v[g.n - 1];
    return s * g.sphere_area / g.h;
}

// Bilinear form of grad_sq: grad_dot(u, v) = integral grad u . grad v with the
// same cell-midpoint weights and boundary conventions, so
// grad_sq(u + v) = grad_sq(u) + 2 grad_dot(u, v) + grad_sq(v) exactly.
inline double grad_dot(const RadialField& u, const RadialField& v) {
    require_on(u, *v.grid);
    const RadialGrid& g = *u.grid;
    const double* a = u.values.data();
    const double* b = v.values.data();
    double s = 0.0;
    const bool ball = (g.inner == 0.0);
    if (!ball) {
        const double rmid = g.inner + 0.5 * g.h;
        s += powi(rmid, g.dim - 1) * a[0] * b[0];
    }
    for (int c = 1; c < g.n; ++c) {
        const double rmid = g.inner + (c + 0.5) * g.h;
        s += powi(rmid, g.dim - 1) * (a[c] - a[c - 1]) * (b[c] - b[c - 1]);
    }
    const double rmid = g.outer - 0.5 * g.h;
    s += powi(rmid, g.dim - 1) * a[g.n - 1] * b[g.n - 1];
    return s * g.sphere_area / g.h;
}

// Symmetric tridiagonal matrix: d[i] on the diagonal, e[i] coupling i, i+1.
struct TridiagMatrix {
    std::vector<double> d, e;
    int size() const { return static_cast<int>(d.size()); }
};

// LDL^T factorization of a symmetric positive-definite tridiagonal matrix.
struct TridiagFactor {
    std::vector<double> dhat, l;

    explicit TridiagFactor(const TridiagMatrix& A) : dhat(A.d), l(A.e) {
        const int m = A.size();
        for (int i = 0; i + 1 < m; ++i) {
            l[i] = A.e[i] / dhat[i];
            dhat[i + 1] -= A.e[i] * l[i];
        }
    }

    void solve_inplace(std::vector<double>& x) const {
        const int m = static_cast<int>(dhat.size());
        for (int i = 1; i < m; ++i) x[i] -= l[i - 1] * x[i - 1];
        for (int i = 0; i < m; ++i) x[i] /= dhat[i];
        for (int i = m - 2; i >= 0; --i) x[i] -= l[i] * x[i + 1];
    }
};

// Stiffness matrix of grad_sq restricted to nodes [first, last] (0-based,
// inclusive) with zero Dirichlet values at the neighbouring nodes outside the
// window.  A window that starts at node 0 of a ball grid inherits the mirror
// condition at the origin instead.  Satisfies v' A v = grad_sq(zero-extension).
inline TridiagMatrix stiffness_window(const RadialGrid& g, int first, int last) {
    const int m = last - first + 1;
    TridiagMatrix A;
    A.d.assign(m, 0.0);
    A.e.assign(m > 1 ? m - 1 : 0, 0.0);
    const double c = g.sphere_area / g.h;
    auto wmid = [&](int cell) { // cell between node (cell-1) and node (cell); node -1 is r = inner
        return c * powi(g.inner + (cell + 0.5) * g.h, g.dim - 1);
    };
    for (int k = 0; k < m; ++k) {
        const int i = first + k;
        const double wl = wmid(i);       // cell on the left of node i
        const double wr = wmid(i + 1);   // cell on the right of node i
        const bool mirror_left = (i == 0 && g.inner == 0.0);
        A.d[k] = wr + (mirror_left ? 0.0 : wl);
        if (k + 1 < m) A.e[k] = -wr;
    }
    return A;
}

inline TridiagMatrix stiffness_matrix(const RadialGrid& g) {
    return stiffness_window(g, 0, g.n - 1);
}

struct EigResult {
    double lambda = 0.0;
    RadialField field; // zero-extended to the input grid, l2_norm = 1, one-signed
};

// First Dirichlet eigenpair of -Laplace on the annulus {rho < |x| < sigma}
// intersected with the grid (nodes strictly inside the window; a window
// touching the origin of a ball grid keeps the regularity condition there).
// Generalized pencil A v = lambda M v, A the windowed stiffness, M the
// diagonal of quadrature weights; solved by inverse iteration with LDL^T
// tridiagonal solves from the deterministic all-ones start.
inline EigResult dirichlet_eig_first(const GridPtr& grid, double rho, double sigma) {
    const RadialGrid& g = *grid;
    int first = 0;
    while (first < g.n && g.nodes[first] <= rho) ++first;
    int last = g.n - 1;
    while (last >= 0 && g.nodes[last] >= sigma) --last;
    const int m = last - first + 1;
    if (m < 32) throw TooFewNodes("fewer than 32 grid nodes strictly inside the annulus");

    const TridiagMatrix A = stiffness_window(g, first, last);
    const TridiagFactor F(A);
    std::vector<double> x(m, 1.0), y(m);

    auto mass = [&](int k) { return g.quad_weights[first + k]; };
    double lambda = 0.0;
    bool settled = false;
    for (int it = 0; it < 500 && !settled; ++it) {
        for (int k = 0; k < m; ++k) y[k] = mass(k) * x[k];
        F.solve_inplace(y); // y = A^{-1} M x
        double ymx = 0.0, ymy = 0.0;
        for (int k = 0; k < m; ++k) {
            ymx += y[k] * mass(k) * x[k];
            ymy += y[k] * mass(k) * y[k];
        }
        const double lam = ymx / ymy; // Rayleigh quotient of y, since A y = M x
        const double nrm = std::sqrt(ymy);
        for (int k = 0; k < m; ++k) x[k] = y[k] / nrm;
        if (it > 0 && std::fabs(lam - lambda) <= 1e-12 * std::max(1.0, std::fabs(lam)))
            settled = true;
        lambda = lam;
    }
    if (!settled) throw NonConvergence("inverse iteration did not settle in 500 sweeps");

    // orient positive; the ground mode of this pencil is one-signed
    double peak = 0.0;
    for (double v : x) if (std::fabs(v) > std::fabs(peak)) peak = v;
    if (peak < 0.0) for (double& v : x) v = -v;
    for (double v : x)
        if (v < 0.0) throw NonConvergence("inverse iteration returned a sign-changing mode");

    EigResult res;
    res.lambda = lambda;
    res.field = RadialField(grid);
    for (int k = 0; k < m; ++k) res.field.values[first + k] = x[k];
    return res;
}

inline EigResult dirichlet_eig_first(const GridPtr& grid) {
    return dirichlet_eig_first(grid, grid->inner, grid->outer);
}

// Piecewise-linear interpolation of a field onto another grid; zero outside
// the source support (fields vanish at their own grid boundaries).
inline RadialField interpolate(const RadialField& u, const GridPtr& target) {
    const RadialGrid& s = *u.grid;
    RadialField out(target);
    for (int i = 0; i < target->n; ++i) {
        const double r = target->nodes[i];
        if (r <= s.inner || r >= s.outer) continue;
        const double x = (r - s.inner) / s.h; // node index + 1 coordinate
        const int c = static_cast<int>(std::floor(x)); // surrounding cell
        const double t = x - c;
        const double vl = (c >= 1 && c <= s.n) ? u.values[c - 1] : 0.0;
        double vr = (c + 1 >= 1 && c + 1 <= s.n) ? u.values[c] : 0.0;
        double lv = vl;
        if (c == 0 && s.inner == 0.0) lv = vr; // mirror cell at the origin
        out.values[i] = lv + t * (vr - lv);
    }
    return out;
}

} // namespace qsnodal
