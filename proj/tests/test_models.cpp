// SPDX-License-Identifier: MIT
//
// Catalog tests: every built-in model must load, carry an orthonormal
// adapted frame across its default grid, and reproduce the closed-form
// geometry it was built around. The warped profile helpers are pinned to
// their defining equation and to the model's own data.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <string>

#include "bisub/models.hpp"
#include "support.hpp"

using bisub::CatalogEntry;
using bisub::FramedModel;
using bisub::ModelError;
using bisub::Point;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

double phi(double c1, double x) {
    const double E = std::exp(c1 * x);
    return c1 * (1.0 + E) / (1.0 - E);
}

double dphi(double c1, double x) {
    const double E = std::exp(c1 * x);
    return 2.0 * c1 * c1 * E / ((1.0 - E) * (1.0 - E));
}

}  // namespace

TEST_CASE("catalog lists the five built-in models", "[models]") {
    const auto& names = bisub::builtin_names();
    REQUIRE(names.size() == 5);
    REQUIRE(bisub::catalog().size() == names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        const CatalogEntry& e = bisub::catalog()[i];
        CHECK(e.name == names[i]);
        CHECK_FALSE(e.note.empty());
    }
    CHECK(bisub::builtin("nil").is_framed());
    CHECK(std::string(bisub::builtin("helical").kind()) == "vertical-field");
    CHECK(std::string(bisub::builtin("warped").kind()) == "framed");

    CHECK_THROWS_MATCHES(bisub::builtin("noexist"), ModelError,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring("noexist") &&
                             ContainsSubstring("warped") &&
                             ContainsSubstring("hyperbolic-projection")));
}

TEST_CASE("framed models are orthonormal and adapted on their grids",
          "[models]") {
    for (const CatalogEntry& e : bisub::catalog()) {
        if (!e.is_framed()) continue;
        const FramedModel& m = e.framed();
        INFO(m.name);
        for (const Point& p : m.grid.points()) {
            REQUIRE(m.chart.domain.contains(p));
            CHECK(bisub::orthonormality_residual(m.chart, p) < 1e-11);
            CHECK(bisub::adaptedness_residual(m.chart, p) < 1e-10);
        }
    }
}

TEST_CASE("model-declared base blocks and curvatures are coherent", "[models]") {
    // Declared space-form curvature matches the base Gauss curvature.
    const FramedModel euc = bisub::builtin("euclidean-projection").framed();
    CHECK_THAT(bisub::gauss_curvature_base(euc, {0.3, -0.2, 0.8}),
               WithinAbs(0, 1e-13));
    const FramedModel hyp = bisub::builtin("hyperbolic-projection").framed();
    CHECK_THAT(bisub::gauss_curvature_base(hyp, {0.4, -0.3, 1.5}),
               WithinAbs(-1, 1e-11));
    REQUIRE(euc.curvature_c.has_value());
    REQUIRE(hyp.curvature_c.has_value());
    CHECK(*euc.curvature_c == 0.0);
    CHECK(*hyp.curvature_c == -1.0);

    // The nil base is a plane whose curvature follows (1-2x^2)/(1+x^2)^2.
    const FramedModel nil = bisub::builtin("nil").framed();
    CHECK_FALSE(nil.curvature_c.has_value());
    for (double x : {0.0, 0.5, 1.0, 2.0})
        CHECK_THAT(bisub::gauss_curvature_base(nil, {x, 0.1, -0.4}),
                   WithinAbs((1 - 2 * x * x) / std::pow(1 + x * x, 2), 1e-10));

    // Warped sits over the flat plane.
    const FramedModel wrp = bisub::builtin("warped").framed();
    CHECK_FALSE(wrp.curvature_c.has_value());
    CHECK_THAT(bisub::gauss_curvature_base(wrp, {0.9, 1.7, 0}),
               WithinAbs(0, 1e-11));
}

TEST_CASE("expected verdict mechanics of the catalog", "[models]") {
    // euclidean-projection: harmonic (zero tension everywhere sampled).
    const FramedModel euc = bisub::builtin("euclidean-projection").framed();
    const auto te = bisub::tension(euc, {0.4, -0.9, 0.2});
    CHECK_THAT(std::hypot(te[0], te[1]), WithinAbs(0, 1e-13));

    // hyperbolic-projection: the tension is the constant (0, -1) -- never
    // harmonic -- and the bitension is the constant (0, 2).
    const FramedModel hyp = bisub::builtin("hyperbolic-projection").framed();
    const auto th = bisub::tension(hyp, {0.7, 0.1, 1.1});
    CHECK_THAT(th[0], WithinAbs(0, 1e-12));
    CHECK_THAT(th[1], WithinAbs(-1, 1e-12));
    CHECK_THAT(bisub::bitension(hyp, {0.7, 0.1, 1.1}).r2, WithinAbs(2, 1e-11));

    // nil: harmonic only on the fiber through x = 0.
    const FramedModel nil = bisub::builtin("nil").framed();
    CHECK_THAT(std::abs(bisub::tension(nil, {0, 0.5, 0.5})[0]), WithinAbs(0, 1e-13));
    CHECK(std::abs(bisub::tension(nil, {1, 0.5, 0.5})[0]) > 0.4);

    // warped: proper biharmonic (nonzero tension, vanishing bitension).
    const FramedModel wrp = bisub::builtin("warped").framed();
    const auto tw = bisub::tension(wrp, {1.2, 0.8, 0});
    CHECK(std::hypot(tw[0], tw[1]) > 1.0);
    CHECK_THAT(bisub::bitension(wrp, {1.2, 0.8, 0}).norm(), WithinAbs(0, 1e-8));
}

TEST_CASE("profile equation residual", "[models]") {
    for (double c1 : {0.5, 1.0, 2.0})
        for (double x : {0.3, 0.7, 1.0, 1.5, 2.5})
            CHECK_THAT(bisub::profile_ode_residual(c1, x), WithinAbs(0, 1e-10));

    // The cancellation is real: both terms are large on their own.
    CHECK(std::abs(phi(1, 0.3) * dphi(1, 0.3)) > 100.0);

    // A scaled profile no longer solves the equation: lam^2 phi phi' - lam
    // phi'' = lam (lam - 1) phi phi' != 0.
    const double lam = 1.1;
    const double detuned =
        lam * phi(1, 0.7) * lam * dphi(1, 0.7) -
        lam * (phi(1, 0.7) * dphi(1, 0.7));  // lam * phi'' = lam * phi phi'
    CHECK(std::abs(detuned) > 1.0);

    CHECK_THROWS_MATCHES(bisub::profile_ode_residual(1.0, 0.0), ModelError,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring("pole")));
}

TEST_CASE("warped log-profile jet", "[models]") {
    const Point p{0.7, 1.3, 0.2};
    const auto j = bisub::warped_log_beta(1.0, 1.0, p);

    const auto direct = [](double c1, double b1, double x, double y) {
        return c1 * x - 2 * std::log(std::abs(std::exp(c1 * x) - 1)) + b1 * y -
               2 * std::log(std::abs(std::exp(b1 * y) - 1));
    };
    CHECK_THAT(j.value(), WithinAbs(direct(1, 1, 0.7, 1.3), 1e-12));

    // First derivatives are the profile functions; the variables separate.
    const auto jx = bisub::derivative(j, 0);
    const auto jy = bisub::derivative(j, 1);
    CHECK_THAT(jx.value(), WithinAbs(phi(1, 0.7), 1e-12));
    CHECK_THAT(jy.value(), WithinAbs(phi(1, 1.3), 1e-12));
    CHECK(bisub::derivative(jx, 1).value() == 0.0);
    CHECK_THAT(bisub::derivative(jx, 0).value(), WithinAbs(dphi(1, 0.7), 1e-11));
    CHECK(bisub::derivative(j, 2).value() == 0.0);

    // Other parameter values, including a negative argument (abs branch).
    const auto j2 = bisub::warped_log_beta(2.0, 0.5, {0.8, 1.1, 0});
    CHECK_THAT(bisub::derivative(j2, 0).value(), WithinAbs(phi(2, 0.8), 1e-11));
    CHECK_THAT(bisub::derivative(j2, 1).value(), WithinAbs(phi(0.5, 1.1), 1e-12));
    const auto jn = bisub::warped_log_beta(1.0, 1.0, {-0.5, -0.3, 0});
    CHECK_THAT(jn.value(), WithinAbs(direct(1, 1, -0.5, -0.3), 1e-12));
    CHECK_THAT(bisub::derivative(jn, 0).value(), WithinAbs(phi(1, -0.5), 1e-12));

    // The model's own kappa1 is the same function.
    const FramedModel wrp = bisub::builtin("warped").framed();
    CHECK_THAT(bisub::integrability_data(wrp, p).kappa1,
               WithinAbs(jx.value(), 1e-11));

    CHECK_THROWS_AS(bisub::warped_log_beta(1.0, 1.0, {0, 1, 0}), ModelError);
}

TEST_CASE("warped model stays healthy across its default grid", "[models]") {
    const FramedModel wrp = bisub::builtin("warped").framed();
    double worst = 0.0;
    bisub::Grid sub = wrp.grid;
    sub.count = {5, 5, 3};
    for (const Point& p : sub.points())
        worst = std::max(worst, bisub::bitension(wrp, p).norm());
    CHECK(worst < 1e-7);
}

TEST_CASE("helical vertical field", "[models]") {
    const auto& hel = bisub::builtin("helical").vertical();

    // Unit length everywhere sampled, against the metric.
    for (const Point& p : {Point{0, 0, 0}, Point{0.9, -0.4, 0.5}}) {
        double n2 = 0;
        for (int a = 0; a < 3; ++a) {
            const double za = bisub::eval_value(hel.vertical[a], p, hel.params);
            n2 += za * za;  // flat metric
        }
        CHECK_THAT(n2, WithinAbs(1, 1e-13));
    }

    // Mean curvature against a finite-difference covariant derivative of the
    // field (flat metric: plain directional derivative of Z along itself).
    const Point p{0.9, -0.4, 0.5};
    std::array<double, 3> zval{}, dzz{};
    for (int a = 0; a < 3; ++a)
        zval[a] = bisub::eval_value(hel.vertical[a], p, hel.params);
    for (int b = 0; b < 3; ++b) {
        const auto fb = [&](const Point& q) {
            return bisub::eval_value(hel.vertical[b], q, hel.params);
        };
        double acc = 0;
        for (int a = 0; a < 3; ++a)
            acc += zval[a] * testsupport::fd_first(fb, p, a);
        dzz[b] = acc;
    }
    double ip = 0;
    for (int a = 0; a < 3; ++a) ip += dzz[a] * zval[a];
    const auto got = bisub::fiber_mean_curvature(hel, p);
    for (int a = 0; a < 3; ++a)
        CHECK_THAT(got[a], WithinAbs(dzz[a] - ip * zval[a], 1e-8));
}
