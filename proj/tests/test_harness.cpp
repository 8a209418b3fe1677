// SPDX-License-Identifier: MIT
//
// Harness tests: the verdict ladder on the built-in catalog, structural
// failures never reaching a geometric verdict, space-form audits with a
// negative control, determinism, grid-refinement stability, and the
// finite-difference cross-check of the jet engine.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <set>
#include <string>

#include "bisub/harness.hpp"
#include "bisub/models.hpp"

using bisub::AuditReport;
using bisub::FramedModel;
using bisub::Grid;
using bisub::ToleranceSet;
using bisub::Verdict;
using bisub::VerificationReport;
using bisub::VerticalFieldModel;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

bisub::Expr E(const std::string& s, const std::set<std::string>& names = {}) {
    return bisub::parse_expr(s, names);
}

bisub::MetricSpec metric6(const std::array<std::string, 6>& s,
                          const std::set<std::string>& names = {}) {
    bisub::MetricSpec g;
    for (int q = 0; q < 6; ++q) g.entry[q] = E(s[q], names);
    return g;
}

std::array<std::array<bisub::Expr, 3>, 3> frame9(
    const std::array<std::array<std::string, 3>, 3>& s,
    const std::set<std::string>& names = {}) {
    std::array<std::array<bisub::Expr, 3>, 3> f;
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a) f[i][a] = E(s[i][a], names);
    return f;
}

Grid box(double lo, double hi, int n) {
    Grid g;
    g.lo = {lo, lo, lo};
    g.hi = {hi, hi, hi};
    g.count = {n, n, n};
    return g;
}

/// Constant kappa1 = eps, everything else zero: a one-parameter family that
/// is exactly biharmonic with tension norm eps, exercising every rung of
/// the proper/gap ladder.
FramedModel exp_slide(double eps) {
    const std::set<std::string> ps = {"eps"};
    FramedModel m;
    m.name = "exp-slide";
    m.chart.metric = metric6({"1", "0", "0", "1", "0", "exp(-2*eps*x)"}, ps);
    m.chart.frame = frame9(
        {{{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "exp(eps*x)"}}}, ps);
    m.chart.params = {{"eps", eps}};
    m.grid = box(-1.0, 1.0, 5);
    return m;
}

FramedModel stretched_frame() {
    FramedModel m;
    m.name = "stretched";
    m.chart.metric = metric6({"1", "0", "0", "1", "0", "1"});
    m.chart.frame =
        frame9({{{"2", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}}});
    m.grid = box(-1.0, 1.0, 3);
    return m;
}

FramedModel screw_frame() {
    FramedModel m;
    m.name = "screw";
    m.chart.metric = metric6({"1", "0", "0", "1", "0", "1"});
    m.chart.frame = frame9({{{"cos(z)", "sin(z)", "0"},
                             {"-sin(z)", "cos(z)", "0"},
                             {"0", "0", "1"}}});
    m.grid = box(-1.0, 1.0, 3);
    return m;
}

VerticalFieldModel vertical_column() {
    VerticalFieldModel m;
    m.name = "column";
    m.metric = metric6({"1", "0", "0", "1", "0", "1"});
    m.vertical = {E("0"), E("0"), E("1")};
    m.grid = box(-1.0, 1.0, 3);
    return m;
}

const FramedModel& framed(const std::string& name) {
    return bisub::builtin(name).framed();
}

}  // namespace

TEST_CASE("tolerances are addressable by name", "[harness]") {
    ToleranceSet t;
    REQUIRE(ToleranceSet::fields().size() == 10);
    REQUIRE(t.get("harmonic") == 1e-8);
    REQUIRE(t.get("proper-gap") == 1e-3);
    t.set("biharmonic", 2.5e-6);
    REQUIRE(t.biharmonic == 2.5e-6);
    REQUIRE(t.get("biharmonic") == 2.5e-6);
    CHECK_THROWS_MATCHES(t.set("bogus", 1.0), std::invalid_argument,
                         Catch::Matchers::MessageMatches(
                             ContainsSubstring("bogus") &&
                             ContainsSubstring("proper-gap") &&
                             ContainsSubstring("spaceform-curvature")));
    CHECK_THROWS_AS(t.get("bogus"), std::invalid_argument);
}

TEST_CASE("built-in framed models classify per their closed forms", "[harness]") {
    SECTION("euclidean projection is harmonic") {
        const auto& e = bisub::builtin("euclidean-projection");
        const VerificationReport r = classify(e.framed(), e.grid());
        REQUIRE(r.verdict == Verdict::Harmonic);
        REQUIRE(r.kind == "framed");
        REQUIRE(r.model == "euclidean-projection");
        REQUIRE(r.detail.empty());
        REQUIRE(r.points == 9 * 9 * 9);
        REQUIRE(r.checks.size() == 5);
        for (const char* name :
             {"orthonormality", "adaptedness", "jacobi", "tension", "bitension"})
            REQUIRE(r.check(name).max < 1e-12);
        REQUIRE(r.find("nonsense") == nullptr);
        CHECK_THROWS_AS(r.check("nonsense"), std::out_of_range);
        REQUIRE(r.wall_seconds >= 0.0);
        REQUIRE(r.wall_seconds < 30.0);
    }
    SECTION("warped product is properly biharmonic") {
        const auto& e = bisub::builtin("warped");
        const VerificationReport r = classify(e.framed(), e.grid());
        REQUIRE(r.verdict == Verdict::ProperBiharmonic);
        REQUIRE(r.check("bitension").max < 1e-7);
        REQUIRE(r.check("tension").max > 1e-3);
        REQUIRE(r.min_tension > 0.1);
    }
    SECTION("nil bundle is not biharmonic, worst residual at |x| = 0.5") {
        const auto& e = bisub::builtin("nil");
        const VerificationReport r = classify(e.framed(), e.grid());
        REQUIRE(r.verdict == Verdict::NotBiharmonic);
        REQUIRE(r.check("bitension").max > 1e-7);
        // |r1|(x) = |x|(x^2+5)/(1+x^2)^3 peaks near x = 0.52; on the default
        // grid the argmax lands on x = +-0.5 with value 1.344.
        REQUIRE_THAT(std::abs(r.check("bitension").witness.x),
                     WithinAbs(0.5, 1e-12));
        REQUIRE_THAT(r.check("bitension").max, WithinAbs(1.344, 1e-12));
    }
    SECTION("hyperbolic projection has constant nonzero bitension") {
        const auto& e = bisub::builtin("hyperbolic-projection");
        const VerificationReport r = classify(e.framed(), e.grid());
        REQUIRE(r.verdict == Verdict::NotBiharmonic);
        REQUIRE_THAT(r.check("tension").max, WithinAbs(1.0, 1e-12));
        REQUIRE_THAT(r.check("bitension").max, WithinAbs(2.0, 1e-11));
    }
    SECTION("rotating the frame does not change the verdict") {
        const FramedModel rotated = rotate_frame(framed("warped"));
        const VerificationReport r = classify(rotated, bisub::builtin("warped").grid());
        REQUIRE(r.verdict == Verdict::ProperBiharmonic);
    }
}

TEST_CASE("vertical-field models classify through the fiber tension", "[harness]") {
    SECTION("helical field is not harmonic and cannot go further") {
        const auto& e = bisub::builtin("helical");
        const VerificationReport r = classify(e.vertical(), e.grid());
        REQUIRE(r.kind == "vertical-field");
        REQUIRE(r.verdict == Verdict::Inconclusive);
        REQUIRE_THAT(r.detail, ContainsSubstring("not harmonic"));
        REQUIRE_THAT(r.detail, ContainsSubstring("bitension"));
        REQUIRE(r.check("tension").max > 0.4);
        REQUIRE(r.check("unit").max < 1e-12);
    }
    SECTION("a parallel unit field is harmonic") {
        const VerticalFieldModel m = vertical_column();
        const VerificationReport r = classify(m, m.grid);
        REQUIRE(r.verdict == Verdict::Harmonic);
        REQUIRE(r.check("tension").max < 1e-15);
    }
    SECTION("a non-unit field is inconclusive, not wrong") {
        VerticalFieldModel m = vertical_column();
        m.vertical[2] = E("2");
        const VerificationReport r = classify(m, m.grid);
        REQUIRE(r.verdict == Verdict::Inconclusive);
        REQUIRE_THAT(r.detail, ContainsSubstring("unit"));
    }
}

TEST_CASE("structural failures classify as inconclusive", "[harness]") {
    SECTION("a non-orthonormal frame is named, not classified") {
        const FramedModel m = stretched_frame();
        const VerificationReport r = classify(m, m.grid);
        REQUIRE(r.verdict == Verdict::Inconclusive);
        REQUIRE_THAT(r.detail, ContainsSubstring("orthonormality"));
        // The model would otherwise look perfectly harmonic.
        REQUIRE(r.check("tension").max < 1e-15);
    }
    SECTION("a non-adapted frame is named, not classified") {
        const FramedModel m = screw_frame();
        const VerificationReport r = classify(m, m.grid);
        REQUIRE(r.verdict == Verdict::Inconclusive);
        REQUIRE_THAT(r.detail, ContainsSubstring("not adapted"));
    }
}

TEST_CASE("the proper verdict requires clearly nonzero tension", "[harness]") {
    SECTION("tension inside the indeterminate band") {
        const FramedModel m = exp_slide(1e-5);
        const VerificationReport r = classify(m, m.grid);
        REQUIRE(r.verdict == Verdict::Inconclusive);
        REQUIRE_THAT(r.detail, ContainsSubstring("indeterminate band"));
        REQUIRE_THAT(r.check("tension").max, WithinAbs(1e-5, 1e-12));
        REQUIRE(r.check("bitension").max < 1e-12);
    }
    SECTION("tension above the gap") {
        const FramedModel m = exp_slide(1e-2);
        const VerificationReport r = classify(m, m.grid);
        REQUIRE(r.verdict == Verdict::ProperBiharmonic);
    }
    SECTION("overridden tolerances drive the ladder") {
        ToleranceSet loose;
        loose.set("harmonic", 1.0);
        const auto& nil = bisub::builtin("nil");
        REQUIRE(classify(nil.framed(), nil.grid(), loose).verdict ==
                Verdict::Harmonic);

        ToleranceSet wide_gap;
        wide_gap.set("proper-gap", 100.0);
        const auto& w = bisub::builtin("warped");
        const VerificationReport r = classify(w.framed(), w.grid(), wide_gap);
        REQUIRE(r.verdict == Verdict::Inconclusive);
        REQUIRE_THAT(r.detail, ContainsSubstring("indeterminate band"));
    }
}

TEST_CASE("grid refinement does not flip verdicts", "[harness]") {
    for (const char* name : {"euclidean-projection", "hyperbolic-projection",
                             "nil", "warped"}) {
        const auto& e = bisub::builtin(name);
        Grid fine = e.grid();
        for (int a = 0; a < 3; ++a) fine.count[a] *= 2;
        const Verdict coarse = classify(e.framed(), e.grid()).verdict;
        INFO(name);
        REQUIRE(classify(e.framed(), fine).verdict == coarse);
    }
}

TEST_CASE("reports are deterministic", "[harness]") {
    const auto& e = bisub::builtin("nil");
    const VerificationReport a = classify(e.framed(), e.grid());
    const VerificationReport b = classify(e.framed(), e.grid());
    REQUIRE(a.verdict == b.verdict);
    REQUIRE(a.points == b.points);
    REQUIRE(a.min_tension == b.min_tension);
    REQUIRE(a.min_tension_witness == b.min_tension_witness);
    REQUIRE(a.checks.size() == b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
        REQUIRE(a.checks[i].name == b.checks[i].name);
        REQUIRE(a.checks[i].max == b.checks[i].max);
        REQUIRE(a.checks[i].witness == b.checks[i].witness);
        REQUIRE(a.checks[i].tol == b.checks[i].tol);
    }
}

TEST_CASE("space-form audits separate space forms from impostors", "[harness]") {
    SECTION("euclidean projection audits cleanly against c = 0") {
        const auto& e = bisub::builtin("euclidean-projection");
        const AuditReport a = spaceform_audit(e.framed(), 0.0, e.grid());
        REQUIRE(a.pass());
        REQUIRE(a.worst() < 1e-10);
        REQUIRE(a.curvature.size() == 7);
        REQUIRE(a.vertical.size() == 5);
        REQUIRE(a.points == 9 * 9 * 9);
    }
    SECTION("hyperbolic projection audits cleanly against c = -1") {
        const auto& e = bisub::builtin("hyperbolic-projection");
        const AuditReport a = spaceform_audit(e.framed(), -1.0, e.grid());
        REQUIRE(a.pass());
        for (const auto& r : a.curvature) REQUIRE(r.max < 1e-7);
        for (const auto& r : a.vertical) REQUIRE(r.max < 1e-8);
    }
    SECTION("nil fails a c = 0 audit loudly") {
        const auto& e = bisub::builtin("nil");
        const AuditReport a = spaceform_audit(e.framed(), 0.0, e.grid());
        REQUIRE_FALSE(a.pass());
        REQUIRE(a.worst() >= 0.2);
        REQUIRE(a.curvature[3].name == "R1212");
        REQUIRE(a.curvature[3].max >= 0.2);
    }
    SECTION("audits are deterministic") {
        const auto& e = bisub::builtin("nil");
        const AuditReport a = spaceform_audit(e.framed(), 0.0, e.grid());
        const AuditReport b = spaceform_audit(e.framed(), 0.0, e.grid());
        REQUIRE(a.worst() == b.worst());
        for (std::size_t i = 0; i < a.curvature.size(); ++i) {
            REQUIRE(a.curvature[i].max == b.curvature[i].max);
            REQUIRE(a.curvature[i].witness == b.curvature[i].witness);
        }
    }
}

TEST_CASE("finite differences corroborate the jet derivatives", "[harness]") {
    SECTION("per-model bounds") {
        const auto& eu = bisub::builtin("euclidean-projection");
        REQUIRE(fd_crosscheck(eu.framed(), eu.grid()).max < 1e-12);

        const auto& nil = bisub::builtin("nil");
        const bisub::FdResult n = fd_crosscheck(nil.framed(), nil.grid());
        REQUIRE(n.max < 1e-6);
        REQUIRE_FALSE(n.quantity.empty());

        const auto& hyp = bisub::builtin("hyperbolic-projection");
        REQUIRE(fd_crosscheck(hyp.framed(), hyp.grid()).max < 1e-6);

        const auto& w = bisub::builtin("warped");
        REQUIRE(fd_crosscheck(w.framed(), w.grid()).max < 1e-5);

        const auto& hel = bisub::builtin("helical");
        REQUIRE(fd_crosscheck(hel.vertical(), hel.grid()).max < 1e-6);
    }
    SECTION("every catalog model stays under the fd tolerance") {
        const ToleranceSet tols;
        for (const auto& entry : bisub::catalog()) {
            const double worst =
                entry.is_framed()
                    ? fd_crosscheck(entry.framed(), entry.grid()).max
                    : fd_crosscheck(entry.vertical(), entry.grid()).max;
            INFO(entry.name);
            REQUIRE(worst < tols.fd);
        }
    }
}
