#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <qsnodal/dual_transform.hpp>
#include <qsnodal/quadrature.hpp>

using namespace qsnodal;

// Frozen oracle values (independent high-precision evaluation of the closed
// forms; F(1) cross-checked by quadrature below).
static constexpr double kF_at_1 = 1.27127389852281552;  // F(1) = sqrt(3)/2 + asinh(sqrt(2))/(2 sqrt 2)
static constexpr double kf_at_1 = 0.834424741483279253; // f(1) = F^{-1}(1)

TEST_CASE("closed-form inverse equals the quadrature of its derivative") {
    // F is the antiderivative of sqrt(1 + 2 s^2) with F(0) = 0; integrating
    // that derivative numerically is an implementation-independent oracle.
    for (double y : {0.1, 0.5, 1.0, 3.0, 10.0, 250.0}) {
        const double quad =
            adaptive_simpson([](double s) { return std::sqrt(1.0 + 2.0 * s * s); }, 0.0, y, 1e-13);
        REQUIRE(DualTransform::inverse(y) == Catch::Approx(quad).epsilon(1e-12));
    }
    REQUIRE(DualTransform::inverse(1.0) == Catch::Approx(kF_at_1).epsilon(1e-15));
    REQUIRE(DualTransform::inverse(0.0) == 0.0);
}

TEST_CASE("forward map inverts F to the configured tolerance") {
    DualTransform tr;
    REQUIRE(tr.forward(0.0) == 0.0);
    REQUIRE(tr.forward(kF_at_1) == Catch::Approx(1.0).epsilon(1e-13));
    REQUIRE(tr.forward(1.0) == Catch::Approx(kf_at_1).epsilon(1e-13));

    // log-spaced round trip over the full working range
    for (int i = 0; i <= 64; ++i) {
        const double t = 1e-8 * std::pow(1e16, i / 64.0);
        for (double s : {t, -t}) {
            const double y = tr.forward(s);
            REQUIRE(std::fabs(DualTransform::inverse(y) - s) <=
                    tr.newton_tol * std::max(1.0, std::fabs(s)));
        }
    }
}

TEST_CASE("oddness is bit-exact") {
    DualTransform tr;
    for (double t : {1e-8, 0.37, 1.0, 42.0, 1e8, 1e305}) {
        REQUIRE(tr.forward(-t) == -tr.forward(t));
        REQUIRE(DualTransform::inverse(-t) == -DualTransform::inverse(t));
        REQUIRE(tr.second(-t) == -tr.second(t));
    }
}

TEST_CASE("derivatives match finite differences of the forward map") {
    DualTransform tr;
    for (double t : {0.3, 1.0, 5.0, 40.0}) {
        const double h = 1e-6 * std::max(1.0, t);
        const double fd1 = (tr.forward(t + h) - tr.forward(t - h)) / (2.0 * h);
        REQUIRE(tr.prime(t) == Catch::Approx(fd1).epsilon(1e-8));
        const double fd2 = (tr.prime(t + h) - tr.prime(t - h)) / (2.0 * h);
        REQUIRE(tr.second(t) == Catch::Approx(fd2).epsilon(1e-5));
    }
    REQUIRE(tr.prime(0.0) == 1.0);
    REQUIRE(tr.second(0.0) == 0.0);
    REQUIRE(tr.second(2.0) < 0.0);
}

TEST_CASE("large-argument asymptotics") {
    DualTransform tr;
    const double t = 1e8;
    REQUIRE(std::fabs(tr.forward(t) / std::sqrt(t) - std::pow(2.0, 0.25)) <= 1e-3);
    REQUIRE(std::fabs(tr.prime(t) * std::sqrt(t) - std::pow(2.0, -0.75)) <= 1e-3);
}

TEST_CASE("overflow guard takes the asymptotic branch") {
    DualTransform tr;
    for (double t : {1e300, 1e305, 1e308}) {
        const double y = tr.forward(t);
        REQUIRE(std::isfinite(y));
        REQUIRE(y == Catch::Approx(std::pow(2.0, 0.25) * std::sqrt(t)).epsilon(1e-12));
        REQUIRE(tr.forward(-t) == -y);
    }
}

TEST_CASE("exhausted iteration budget reports NonConvergence") {
    DualTransform tr;
    tr.max_newton_iters = 0;
    REQUIRE_THROWS_AS(tr.forward(5.0), NonConvergence);
    REQUIRE(tr.forward(0.0) == 0.0); // trivial cases bypass the iteration
}
