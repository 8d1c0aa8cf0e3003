#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "dual_transform.hpp"
#include "energy.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "quadrature.hpp"
#include "radial_mesh.hpp"
#include "solvers.hpp"

namespace qsnodal {


namespace detail {
inline std::string short_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}
} // namespace detail

struct PropertyCheck {
    std::string name;
    std::string status; // "pass" | "fail" | "skipped"
    double margin = kNaN;
    long samples = 0;
    std::string note;
};

struct PropertyReport {
    std::string suite;
    std::vector<PropertyCheck> checks;

    bool pass() const {
        for (const auto& c : checks)
            if (c.status == "fail") return false;
        return true;
    }
    const PropertyCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

// Property audit of a transform triple (f, f', F) over the sample grid.
// Margins are the worst slack of each inequality; negative beyond -1e-12
// fails.  An empty sample set marks every check "skipped" (not "pass").
inline PropertyReport run_transform_suite(const std::function<double(double)>& f,
                                          const std::function<double(double)>& fp,
                                          const std::function<double(double)>& finv,
                                          const SampleSpec& spec) {
    const std::vector<double> ts = spec.make();
    PropertyReport rep;
    rep.suite = "transform";
    const long ns = static_cast<long>(ts.size());

    auto add = [&](std::string name, bool ok, double margin, std::string note = "") {
        rep.checks.push_back({std::move(name), ok ? "pass" : "fail", margin, ns, std::move(note)});
    };
    if (ts.empty()) {
        for (const char* name :
             {"odd_symmetry", "derivative_bounds", "bound_linear", "bound_sqrt",
              "near_zero_linear", "asymptote_sqrt", "scaling_squeeze", "ratio_monotonicity",
              "equivalence_witness", "product_bound", "prime_asymptote", "round_trip"})
            rep.checks.push_back({name, "skipped", kNaN, 0, "empty sample set"});
        return rep;
    }

    const double quarter_root_2 = std::pow(2.0, 0.25);
    const double inf = std::numeric_limits<double>::infinity();

    { // f(-t) = -f(t) bit-exactly, and f(0) = 0
        double worst = 0.0;
        for (double t : ts)
            if (t > 0.0) worst = std::max(worst, std::fabs(f(-t) + f(t)));
        const bool zero_ok = (f(0.0) == 0.0);
        add("odd_symmetry", worst == 0.0 && zero_ok, -worst,
            zero_ok ? "" : "f(0) != 0");
    }
    { // 0 < f'(t) <= 1
        double worst = inf;
        for (double t : ts) {
            const double d = fp(t);
            worst = std::min(worst, std::min(d, 1.0 - d));
        }
        add("derivative_bounds", worst >= -1e-12, worst);
    }
    { // |f(t)| <= |t|
        double worst = inf;
        for (double t : ts)
            if (t != 0.0) worst = std::min(worst, std::fabs(t) - std::fabs(f(t)));
        add("bound_linear", worst >= -1e-12, worst);
    }
    { // |f(t)| <= 2^(1/4) |t|^(1/2)
        double worst = inf;
        for (double t : ts)
            if (t != 0.0)
                worst = std::min(worst, quarter_root_2 * std::sqrt(std::fabs(t)) - std::fabs(f(t)));
        add("bound_sqrt", worst >= -1e-12, worst);
    }
    { // f(t)/t -> 1: checked at the smallest magnitude
        const double t = spec.lo;
        const double dev = std::fabs(f(t) / t - 1.0);
        add("near_zero_linear", dev <= 1e-6, 1e-6 - dev,
            "at |t| = " + detail::short_num(spec.lo));
    }
    { // |f(t)|/sqrt(|t|) -> 2^(1/4): checked at the largest magnitude
        const double t = spec.hi;
        const double dev = std::fabs(std::fabs(f(t)) / std::sqrt(t) - quarter_root_2);
        add("asymptote_sqrt", dev <= 1e-3, 1e-3 - dev, "at |t| = " + detail::short_num(spec.hi));
    }
    { // f(t)^2 / 2 <= t f'(t) f(t) <= f(t)^2
        double worst = inf;
        for (double t : ts) {
            if (t == 0.0) continue;
            const double y = f(t), mid = t * fp(t) * y;
            worst = std::min(worst, std::min(mid - 0.5 * y * y, y * y - mid));
        }
        add("scaling_squeeze", worst >= -1e-12, worst);
    }
    { // f f'/t nonincreasing and f^3 f'/t nondecreasing on sorted positive pairs
        double worst = inf;
        double prev_a = kNaN, prev_b = kNaN;
        bool first = true;
        for (double t : ts) {
            if (t <= 0.0) continue;
            const double y = f(t), d = fp(t);
            const double a = y * d / t, b = y * y * y * d / t;
            if (!first) {
                worst = std::min(worst, (prev_a - a) + 1e-12 * std::max(1.0, std::fabs(a)));
                worst = std::min(worst, (b - prev_b) + 1e-12 * std::max(1.0, std::fabs(b)));
            }
            prev_a = a;
            prev_b = b;
            first = false;
        }
        add("ratio_monotonicity", worst >= 0.0, worst);
    }
    { // |f(t)| >= C |t| on |t| <= 1 and >= C sqrt(|t|) beyond, witness C = f(1)
        const double C = f(1.0);
        double worst = inf;
        for (double t : ts) {
            if (t == 0.0) continue;
            const double a = std::fabs(t);
            const double bound = (a <= 1.0) ? C * a : C * std::sqrt(a);
            worst = std::min(worst, std::fabs(f(t)) - bound);
        }
        add("equivalence_witness", worst >= -1e-12, worst,
            "witness C = f(1) = " + detail::short_num(C));
    }
    { // |f(t) f'(t)| <= 2^(-1/2)
        double worst = inf;
        for (double t : ts)
            worst = std::min(worst, 1.0 / M_SQRT2 - std::fabs(f(t) * fp(t)));
        add("product_bound", worst >= -1e-12, worst);
    }
    { // f'(t) |t|^(1/2) -> 2^(-3/4): checked at the largest magnitude
        const double t = spec.hi;
        const double dev = std::fabs(fp(t) * std::sqrt(t) - std::pow(2.0, -0.75));
        add("prime_asymptote", dev <= 1e-3, 1e-3 - dev, "at |t| = " + detail::short_num(spec.hi));
    }
    { // F(f(t)) = t to 1e-10 * max(1, |t|)
        double worst = inf;
        for (double t : ts) {
            const double err = std::fabs(finv(f(t)) - t);
            worst = std::min(worst, 1e-10 * std::max(1.0, std::fabs(t)) - err);
        }
        add("round_trip", worst >= 0.0, worst);
    }
    return rep;
}

inline PropertyReport run_transform_suite(const DualTransform& tr, const SampleSpec& spec) {
    return run_transform_suite([&tr](double t) { return tr.forward(t); },
                               [&tr](double t) { return tr.prime(t); },
                               [](double y) { return DualTransform::inverse(y); }, spec);
}

// Model audit: the hypothesis checks plus an independent quadrature oracle for
// the closed-form primitive (G(t) vs adaptive-Simpson integral of g).
inline PropertyReport run_model_suite(const Nonlinearity& nl, const Potential& pot, Mode mode,
                                      const SampleSpec& spec) {
    const HypothesisReport hyp = validate_hypotheses(nl, pot, mode, spec);
    PropertyReport rep;
    rep.suite = "model";
    for (const auto& c : hyp.checks)
        rep.checks.push_back({c.name, c.status, c.margin, spec.per_sign * 2L + 1, c.note});

    if (spec.per_sign == 0) {
        rep.checks.push_back({"G_matches_g_quadrature", "skipped", kNaN, 0, "empty sample set"});
        return rep;
    }
    // subsample the magnitudes (quadrature is the expensive oracle)
    std::vector<double> pts;
    const int count = std::min(24, spec.per_sign);
    for (int i = 0; i < count; ++i) {
        const double frac = (count == 1) ? 0.0 : static_cast<double>(i) / (count - 1);
        const double mag = spec.lo * std::pow(spec.hi / spec.lo, frac);
        pts.push_back(mag);
        pts.push_back(-mag);
    }
    double worst = std::numeric_limits<double>::infinity();
    for (double t : pts) {
        const double closed = nl.G(t);
        const double quad = adaptive_simpson(nl.g, 0.0, t,
                                             1e-13 * std::max(1.0, std::fabs(closed)));
        const double rel = std::fabs(closed - quad) / std::max(1.0, std::fabs(closed));
        worst = std::min(worst, 1e-10 - rel);
    }
    rep.checks.push_back({"G_matches_g_quadrature", worst >= 0.0 ? "pass" : "fail", worst,
                          static_cast<long>(pts.size()), "closed form vs adaptive Simpson"});
    return rep;
}

// Interior sign changes of a radial profile; entries below 1e-8 * max|u| are
// treated as zero so one-cell flicker at interfaces is not counted.
inline int count_nodes(const RadialField& u) {
    return detail::count_sign_changes(u);
}

// Energy-ordering audit across solve reports: with d the k = 0 baseline,
// every k-node level must satisfy c_k >= (k+1) d (1 - tol) and the levels
// must increase strictly in k.  Throws MissingBaseline without a k = 0 run.
inline PropertyReport compare_energies(const std::vector<SolveReport>& reports,
                                       double tol = 1e-2) {
    PropertyReport rep;
    rep.suite = "energy_ordering";
    const SolveReport* base = nullptr;
    for (const auto& r : reports)
        if (r.k == 0 && std::isfinite(r.energy)) base = &r;
    if (!base) throw MissingBaseline("no k = 0 ground-state report to compare against");
    const double d = base->energy;
    rep.checks.push_back({"baseline_positive", d > 0.0 ? "pass" : "fail", d, 1,
                          "d = " + std::to_string(d)});

    std::vector<std::pair<int, double>> levels;
    for (const auto& r : reports) {
        if (r.k <= 0 || !std::isfinite(r.energy)) continue;
        levels.push_back({r.k, r.energy});
        const double bound = (r.k + 1) * d * (1.0 - tol);
        rep.checks.push_back({"level_lower_bound_k" + std::to_string(r.k),
                              r.energy >= bound ? "pass" : "fail", r.energy - bound, 1,
                              "c_k = " + std::to_string(r.energy) +
                                  " vs (k+1) d (1-tol) = " + std::to_string(bound)});
    }
    if (levels.size() >= 2) {
        double worst = std::numeric_limits<double>::infinity();
        bool ordered = true;
        for (size_t i = 0; i + 1 < levels.size(); ++i) {
            for (size_t j = i + 1; j < levels.size(); ++j) {
                if (levels[i].first < levels[j].first) {
                    worst = std::min(worst, levels[j].second - levels[i].second);
                    if (!(levels[i].second < levels[j].second)) ordered = false;
                } else if (levels[i].first > levels[j].first) {
                    worst = std::min(worst, levels[i].second - levels[j].second);
                    if (!(levels[j].second < levels[i].second)) ordered = false;
                }
            }
        }
        rep.checks.push_back({"levels_strictly_increasing", ordered ? "pass" : "fail", worst,
                              static_cast<long>(levels.size()), ""});
    }
    return rep;
}

} // namespace qsnodal
