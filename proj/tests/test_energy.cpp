#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include <qsnodal/energy.hpp>

using namespace qsnodal;

namespace {

// Smooth random field: a few random sine modes, zero at both boundaries.
// Low mode counts on a wide grid keep the Rayleigh quotient below the
// projectability threshold l = 1.
RadialField random_smooth(const GridPtr& grid, std::mt19937& rng, int modes = 3) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<double> c(modes);
    for (double& x : c) x = coef(rng);
    RadialField u(grid);
    const double L = grid->outer - grid->inner;
    for (int i = 0; i < grid->n; ++i) {
        const double z = (grid->nodes[i] - grid->inner) / L;
        for (int m = 0; m < modes; ++m) u.values[i] += c[m] * std::sin((m + 1) * M_PI * z);
    }
    return u;
}

EnergyModel small_model(double l = 1.0, double R = 20.0, int n = 320) {
    return make_energy_model(build_grid(3, R, n), Nonlinearity::builtin(l),
                             Potential::constant(1.0));
}

} // namespace

TEST_CASE("energy of the zero field is zero") {
    const EnergyModel em = small_model();
    REQUIRE(functional_I(em, RadialField(em.grid)) == 0.0);
}

TEST_CASE("residual is the exact weighted-l2 gradient of the energy") {
    const EnergyModel em = small_model();
    std::mt19937 rng(12345);
    const double eps = 1e-5;
    for (int trial = 0; trial < 10; ++trial) {
        const RadialField v = random_smooth(em.grid, rng);
        const RadialField h = random_smooth(em.grid, rng);
        const RadialField res = euler_lagrange_residual(em, v);
        const double analytic = dot_weighted(res, h);

        RadialField vp(em.grid), vm(em.grid);
        for (int i = 0; i < em.grid->n; ++i) {
            vp.values[i] = v.values[i] + eps * h.values[i];
            vm.values[i] = v.values[i] - eps * h.values[i];
        }
        const double fd = (functional_I(em, vp) - functional_I(em, vm)) / (2.0 * eps);
        REQUIRE(analytic == Catch::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("semilinear projection matches the closed-form scaling") {
    // With the identity transform, psi(s) = s^2 A - s^4 B for
    // A = grad_sq(u) + integral V u^2 and B = integral u^4, so the positive
    // root is exactly sqrt(A/B).
    // the tolerance must stay above the roundoff floor of psi (~ eps * A t^2)
    // yet give root accuracy |dt|/t ~ tol / (2 A t^2) far below 1e-10
    EnergyModel em = make_energy_model(build_grid(3, 8.0, 256), Nonlinearity::semilinear(),
                                       Potential::constant(1.0));
    em.nehari_tol_factor = 1e-11;
    std::mt19937 rng(777);
    for (int trial = 0; trial < 20; ++trial) {
        RadialField u = random_smooth(em.grid, rng);
        const double scale = 1.0 / std::sqrt(grad_sq(u));
        for (double& x : u.values) x *= scale; // keep the tolerance target absolute

        double A = grad_sq(u), B = 0.0;
        for (int i = 0; i < em.grid->n; ++i) {
            const double w = em.grid->quad_weights[i];
            const double x = u.values[i];
            A += w * em.V[i] * x * x;
            B += w * x * x * x * x;
        }
        const ProjectResult pr = project_nehari(em, u);
        REQUIRE(pr.t_u == Catch::Approx(std::sqrt(A / B)).epsilon(1e-10));
        REQUIRE(std::fabs(pr.psi_residual) <= 1e-10);
        // bracket certificate pins the root
        REQUIRE(pr.bracket_lo < pr.t_u);
        REQUIRE(pr.t_u < pr.bracket_hi);
        REQUIRE(pr.psi_at_lo > 0.0);
        REQUIRE(pr.psi_at_hi < 0.0);
    }
}

TEST_CASE("projection lands on the constraint manifold and is idempotent") {
    const EnergyModel em = small_model();
    std::mt19937 rng(99);
    const RadialField u = random_smooth(em.grid, rng);
    const ProjectResult pr = project_nehari(em, u);
    REQUIRE(std::fabs(nehari_psi(em, pr.field, 1.0)) <=
            em.nehari_tol_factor * std::max(1.0, grad_sq(pr.field)));
    const ProjectResult again = project_nehari(em, pr.field);
    REQUIRE(again.t_u == Catch::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("scaled maximum property along the ray") {
    const EnergyModel em = small_model();
    std::mt19937 rng(4242);
    const RadialField u = random_smooth(em.grid, rng);
    const ProjectResult pr = project_nehari(em, u);
    const double peak = functional_I(em, pr.field);
    REQUIRE(peak > 0.0);
    for (double alpha : {0.5, 0.9, 1.1, 2.0})
        REQUIRE(peak > functional_I(em, scaled(pr.field, alpha)));
}

TEST_CASE("psi changes sign exactly once and psi/s^2 decreases") {
    const EnergyModel em = small_model();
    std::mt19937 rng(31);
    const RadialField u = random_smooth(em.grid, rng);
    int sign_changes = 0;
    double prev_psi = 0.0, prev_ratio = std::numeric_limits<double>::infinity();
    bool first = true;
    for (int i = 0; i <= 160; ++i) {
        const double s = 1e-4 * std::pow(1e8, i / 160.0); // s in [1e-4, 1e4]
        const double psi = nehari_psi(em, u, s);
        const double ratio = psi / (s * s);
        if (!first && psi * prev_psi < 0.0) ++sign_changes;
        if (!first) REQUIRE(ratio < prev_ratio);
        prev_psi = psi;
        prev_ratio = ratio;
        first = false;
    }
    REQUIRE(sign_changes == 1);
}

TEST_CASE("projectability cone membership") {
    const EnergyModel em = small_model();
    const RadialField u = dirichlet_eig_first(em.grid).field;
    const ThetaResult th = theta_test(em, u);
    REQUIRE(th.ok); // lambda_1 of the R=8 ball is well below l |u|^2 threshold
    REQUIRE(th.grad < th.l * th.l2sq);
    REQUIRE_THROWS_AS(theta_test(em, RadialField(em.grid)), ZeroField);
}

TEST_CASE("a field outside the cone is not projectable") {
    // On the ball of radius 1/4 the first eigenvalue 16 pi^2 far exceeds
    // l = 1, so psi stays positive along the whole ray: the bracket search
    // must hit its cap and report the failure precisely.
    const EnergyModel em = make_energy_model(build_grid(3, 0.25, 192),
                                             Nonlinearity::builtin(1.0),
                                             Potential::constant(1.0));
    const RadialField u = dirichlet_eig_first(em.grid).field;
    REQUIRE_FALSE(theta_test(em, u).ok);
    REQUIRE_THROWS_AS(project_nehari(em, u), NotProjectable);
    REQUIRE_THROWS_AS(project_nehari(em, RadialField(em.grid)), ZeroField);
}

TEST_CASE("sign-splitting is exact and one-signed input is rejected") {
    const EnergyModel em = small_model();
    std::mt19937 rng(5);
    const RadialField u = random_smooth(em.grid, rng);
    const auto [plus, minus] = split_signs(u);
    for (int i = 0; i < em.grid->n; ++i) {
        REQUIRE(plus.values[i] >= 0.0);
        REQUIRE(minus.values[i] <= 0.0);
        REQUIRE(plus.values[i] + minus.values[i] == u.values[i]);
    }
    const RadialField pos = dirichlet_eig_first(em.grid).field;
    REQUIRE_THROWS_AS(project_sign_changing(em, pos), MissingSign);
}

TEST_CASE("separated supports decouple the sign-changing projection") {
    const EnergyModel em = small_model(1.0, 12.0, 600);
    RadialField u(em.grid);
    for (int i = 0; i < em.grid->n; ++i) {
        const double r = em.grid->nodes[i];
        if (r > 2.0 && r < 6.0) u.values[i] = std::sin(M_PI * (r - 2.0) / 4.0);
        if (r > 7.0 && r < 11.0) u.values[i] = -std::sin(M_PI * (r - 7.0) / 4.0);
    }
    const auto [plus, minus] = split_signs(u);
    REQUIRE(grad_dot(plus, minus) == 0.0); // a full zero gap between supports

    const SignProjectResult sp = project_sign_changing(em, u);
    REQUIRE(sp.coupling == 0.0);
    const ProjectResult iso_p = project_nehari(em, plus);
    const ProjectResult iso_m = project_nehari(em, minus);
    REQUIRE(sp.s_u == Catch::Approx(iso_p.t_u).epsilon(1e-13));
    REQUIRE(sp.t_u == Catch::Approx(iso_m.t_u).epsilon(1e-13));
}

TEST_CASE("coupled projection satisfies the sign-split constraints exactly") {
    // Adjacent supports share interface cells of the discrete gradient; the
    // projected field must still annihilate I' against each signed part (the
    // defining property of the sign-changing constraint set).
    const EnergyModel em = small_model(1.0, 10.0, 400);
    RadialField u(em.grid);
    for (int i = 0; i < em.grid->n; ++i)
        u.values[i] = std::sin(2.0 * M_PI * em.grid->nodes[i] / 10.0);

    const auto [plus, minus] = split_signs(u);
    const double tol_p = em.nehari_tol_factor * std::max(1.0, grad_sq(plus));
    const double tol_m = em.nehari_tol_factor * std::max(1.0, grad_sq(minus));

    const SignProjectResult sp = project_sign_changing(em, u);
    REQUIRE(sp.coupling > 0.0);
    REQUIRE(std::fabs(sp.psi_plus) <= tol_p);
    REQUIRE(std::fabs(sp.psi_minus) <= tol_m);

    // cross-check through the energy gradient itself
    const RadialField res = euler_lagrange_residual(em, sp.field);
    const auto [wp, wm] = split_signs(sp.field);
    REQUIRE(std::fabs(dot_weighted(res, wp)) <= 4.0 * tol_p);
    REQUIRE(std::fabs(dot_weighted(res, wm)) <= 4.0 * tol_m);

    // the combined field is the recorded scaling of the parts
    for (int i = 0; i < em.grid->n; ++i) {
        const double expect = sp.s_u * plus.values[i] + sp.t_u * minus.values[i];
        REQUIRE(sp.field.values[i] == Catch::Approx(expect).margin(1e-14));
    }
}

TEST_CASE("gradient cross-term identity links grad_sq and grad_dot") {
    const EnergyModel em = small_model();
    std::mt19937 rng(808);
    const RadialField a = random_smooth(em.grid, rng);
    const RadialField b = random_smooth(em.grid, rng);
    RadialField sum(em.grid);
    for (int i = 0; i < em.grid->n; ++i) sum.values[i] = a.values[i] + b.values[i];
    const double lhs = grad_sq(sum);
    const double rhs = grad_sq(a) + 2.0 * grad_dot(a, b) + grad_sq(b);
    REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-12));
    REQUIRE(grad_dot(a, a) == Catch::Approx(grad_sq(a)).epsilon(1e-14));
}
