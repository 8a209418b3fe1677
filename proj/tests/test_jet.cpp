// SPDX-License-Identifier: MIT
//
// Unit tests for the truncated Taylor (jet) layer. Expected values are either
// exact small-polynomial coefficients or closed-form derivatives stated next
// to each check.

#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>

#include "bisub/jet.hpp"

using bisub::Jet;

namespace {

/// Distance in representable doubles ("ulps"); large constant for mixed signs.
std::int64_t ulps_apart(double a, double b) {
    if (a == b) return 0;
    if (!std::isfinite(a) || !std::isfinite(b)) return INT64_MAX;
    auto key = [](double v) {
        const auto bits = std::bit_cast<std::int64_t>(v);
        return bits < 0 ? std::int64_t{INT64_MIN} + 1 - bits + 1 : bits;
    };
    const std::int64_t ka = key(a), kb = key(b);
    return ka > kb ? ka - kb : kb - ka;
}

template <int N>
Jet<N> random_jet(std::mt19937& rng) {
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    Jet<N> j;
    for (int p = 0; p < Jet<N>::size; ++p) j.coeff(p) = dist(rng);
    return j;
}

}  // namespace

// ===========================================================================
// Seeds, coefficients, indexing
// ===========================================================================

TEST_CASE("jet seeds and coefficient layout", "[jet]") {
    const auto x = Jet<3>::variable(2.0, 0);
    CHECK(x.value() == 2.0);
    CHECK(x.partial(1, 0, 0) == 1.0);
    CHECK(x.partial(0, 1, 0) == 0.0);
    CHECK(x.partial(0, 0, 1) == 0.0);
    CHECK(x.partial(2, 0, 0) == 0.0);

    // x*y has exactly one nonzero coefficient: the mixed (1,1,0) one.
    const auto y = Jet<3>::variable(0.0, 1);
    const auto xy = Jet<3>::variable(0.0, 0) * y;
    CHECK(xy.partial(1, 1, 0) == 1.0);
    CHECK(xy.value() == 0.0);
    CHECK(xy.partial(1, 0, 0) == 0.0);
    CHECK(xy.partial(2, 0, 0) == 0.0);

    CHECK(Jet<0>::size == 1);
    CHECK(Jet<1>::size == 4);
    CHECK(Jet<2>::size == 10);
    CHECK(Jet<3>::size == 20);
    CHECK(Jet<4>::size == 35);
    CHECK_THROWS_AS(x.partial(4, 0, 0), std::out_of_range);
}

TEST_CASE("jet polynomial products are exact", "[jet]") {
    // (1 + x + y)^2 = 1 + 2x + 2y + x^2 + 2xy + y^2 : integer coefficients,
    // exact in floating point.
    const auto u = Jet<2>::constant(1.0) + Jet<2>::variable(0.0, 0) +
                   Jet<2>::variable(0.0, 1);
    const auto u2 = u * u;
    CHECK(u2.value() == 1.0);
    CHECK(u2.partial(1, 0, 0) == 2.0);
    CHECK(u2.partial(0, 1, 0) == 2.0);
    CHECK(u2.partial(2, 0, 0) == 2.0);   // coefficient 1 -> D^2 = 2
    CHECK(u2.partial(1, 1, 0) == 2.0);
    CHECK(u2.partial(0, 2, 0) == 2.0);
    CHECK(u2.partial(0, 0, 1) == 0.0);

    // Degrees above the order are discarded: x^2 * x^3 has no coefficient
    // of degree <= 4.
    const auto x4 = Jet<4>::variable(0.0, 0);
    const auto prod = bisub::pow(x4, 2) * bisub::pow(x4, 3);
    for (int p = 0; p < Jet<4>::size; ++p) CHECK(prod.coeff(p) == 0.0);
}

TEST_CASE("jet truncation is a prefix copy", "[jet]") {
    std::mt19937 rng(7);
    const auto a = random_jet<4>(rng);
    const auto t = bisub::truncate<2>(a);
    for (int p = 0; p < Jet<2>::size; ++p) CHECK(t.coeff(p) == a.coeff(p));
}

// ===========================================================================
// Derivative extraction
// ===========================================================================

TEST_CASE("jet derivative shifts coefficients", "[jet]") {
    // f = x^2 y: D_x f = 2xy, checked at (3, 5, 0).
    const auto x = Jet<3>::variable(3.0, 0);
    const auto y = Jet<3>::variable(5.0, 1);
    const auto f = x * x * y;
    const auto fx = bisub::derivative(f, 0);
    CHECK(fx.value() == 2.0 * 3.0 * 5.0);
    CHECK(fx.partial(1, 0, 0) == 2.0 * 5.0);   // D_xx f = 2y
    CHECK(fx.partial(0, 1, 0) == 2.0 * 3.0);   // D_xy f = 2x
    const auto fy = bisub::derivative(f, 1);
    CHECK(fy.value() == 9.0);                  // D_y f = x^2
    CHECK(fy.partial(1, 0, 0) == 6.0);
}

TEST_CASE("jet Leibniz rule across orders", "[jet]") {
    // derivative(a*b) = derivative(a)*b + a*derivative(b) ties the
    // convolution tables of adjacent orders together.
    std::mt19937 rng(123);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_jet<3>(rng);
        const auto b = random_jet<3>(rng);
        for (int axis = 0; axis < 3; ++axis) {
            const auto lhs = bisub::derivative(a * b, axis);
            const auto rhs = bisub::derivative(a, axis) * bisub::truncate<2>(b) +
                             bisub::truncate<2>(a) * bisub::derivative(b, axis);
            // Both sides sum the same products in different orders; the
            // identity is exact up to reassociation roundoff (coefficients
            // here are bounded by 2, degree multipliers by 3).
            for (int p = 0; p < Jet<2>::size; ++p)
                CHECK_THAT(lhs.coeff(p),
                           Catch::Matchers::WithinAbs(rhs.coeff(p), 1e-12));
        }
    }
}

// ===========================================================================
// Elementary functions
// ===========================================================================

TEST_CASE("jet elementary functions match closed-form derivatives", "[jet]") {
    const double x0 = 0.7;
    const auto x = Jet<3>::variable(x0, 0);

    SECTION("log: D log = 1/x, D^2 = -1/x^2, D^3 = 2/x^3") {
        const auto f = bisub::log(x);
        CHECK_THAT(f.value(), Catch::Matchers::WithinULP(std::log(x0), 2));
        CHECK_THAT(f.partial(1, 0, 0), Catch::Matchers::WithinULP(1.0 / x0, 4));
        CHECK_THAT(f.partial(2, 0, 0),
                   Catch::Matchers::WithinULP(-1.0 / (x0 * x0), 4));
        CHECK_THAT(f.partial(3, 0, 0),
                   Catch::Matchers::WithinULP(2.0 / (x0 * x0 * x0), 4));
    }
    SECTION("exp: all derivatives e^x; exp(2x) doubles per order") {
        const auto f = bisub::exp(x * 2.0);
        const double e = std::exp(2.0 * x0);
        CHECK_THAT(f.partial(1, 0, 0), Catch::Matchers::WithinULP(2.0 * e, 4));
        CHECK_THAT(f.partial(2, 0, 0), Catch::Matchers::WithinULP(4.0 * e, 4));
        CHECK_THAT(f.partial(3, 0, 0), Catch::Matchers::WithinULP(8.0 * e, 4));
    }
    SECTION("sqrt: D = 1/(2 sqrt), D^2 = -1/(4 x^(3/2))") {
        const auto f = bisub::sqrt(x);
        const double s = std::sqrt(x0);
        CHECK_THAT(f.partial(1, 0, 0), Catch::Matchers::WithinULP(0.5 / s, 4));
        CHECK_THAT(f.partial(2, 0, 0),
                   Catch::Matchers::WithinULP(-0.25 / (x0 * s), 4));
    }
    SECTION("sin/cos: Pythagorean identity as a jet") {
        const auto s = bisub::sin(x);
        const auto c = bisub::cos(x);
        const auto one = s * s + c * c;
        CHECK_THAT(one.value(), Catch::Matchers::WithinULP(1.0, 4));
        for (int p = 1; p < Jet<3>::size; ++p)
            CHECK_THAT(one.coeff(p), Catch::Matchers::WithinAbs(0.0, 1e-15));
    }
    SECTION("reciprocal: u * (1/u) = 1") {
        std::mt19937 rng(5);
        auto u = random_jet<3>(rng);
        u.coeff(0) = 1.7;  // keep away from zero
        const auto one = u * bisub::reciprocal(u);
        CHECK_THAT(one.value(), Catch::Matchers::WithinULP(1.0, 4));
        for (int p = 1; p < Jet<3>::size; ++p)
            CHECK_THAT(one.coeff(p), Catch::Matchers::WithinAbs(0.0, 1e-13));
    }
}

TEST_CASE("jet integer powers", "[jet]") {
    std::mt19937 rng(11);
    const auto u = random_jet<3>(rng);
    const auto cubed = bisub::pow(u, 3);
    const auto manual = u * u * u;
    for (int p = 0; p < Jet<3>::size; ++p)
        CHECK(ulps_apart(cubed.coeff(p), manual.coeff(p)) <= 4);

    // Powers at a zero base value need no division.
    const auto x0 = Jet<3>::variable(0.0, 0);
    CHECK(bisub::pow(x0, 2).partial(2, 0, 0) == 2.0);
    CHECK(bisub::pow(x0, 0).value() == 1.0);

    // Negative powers go through the reciprocal: x^-2 at x=2 is 1/4 with
    // derivative -2/x^3 = -1/4.
    const auto x2 = Jet<2>::variable(2.0, 0);
    const auto m = bisub::pow(x2, -2);
    CHECK_THAT(m.value(), Catch::Matchers::WithinULP(0.25, 4));
    CHECK_THAT(m.partial(1, 0, 0), Catch::Matchers::WithinULP(-0.25, 4));
}

TEST_CASE("jet domain errors are thrown, not propagated as NaN", "[jet]") {
    const auto neg = Jet<2>::constant(-1.0);
    const auto zero = Jet<2>::constant(0.0);
    CHECK_THROWS_AS(bisub::log(neg), std::domain_error);
    CHECK_THROWS_AS(bisub::log(zero), std::domain_error);
    CHECK_THROWS_AS(bisub::sqrt(neg), std::domain_error);
    CHECK_THROWS_AS(bisub::sqrt(zero), std::domain_error);  // derivatives blow up
    CHECK_NOTHROW(bisub::sqrt(Jet<0>::constant(0.0)));      // value-only is fine
    CHECK_THROWS_AS(bisub::reciprocal(zero), std::domain_error);
    CHECK_THROWS_AS(neg / zero, std::domain_error);
    CHECK_THROWS_AS(bisub::pow(zero, -1), std::domain_error);
}
