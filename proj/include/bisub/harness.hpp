// SPDX-License-Identifier: MIT
//
// Grid sweeps and report assembly: the classification ladder, space-form
// audits and a finite-difference cross-check of the jet engine. Everything
// here reduces pointwise quantities from submersion.hpp over a sampling grid
// and reports maxima together with their witness points, so any failure can
// be reproduced with a single pointwise call.
//
// Verdict ladder (a pure function of residual maxima and tolerances):
//   a structural check fails        -> inconclusive, failing check named
//   max |tension| < harmonic        -> harmonic
//   max bitension < biharmonic and
//       max |tension| > proper_gap  -> proper-biharmonic
//       otherwise                   -> inconclusive (indeterminate band)
//   else                            -> not-biharmonic
//
// The gap between `harmonic` and `proper_gap` exists so that a borderline
// tension can never be promoted to "proper": a proper verdict requires the
// map to be clearly non-harmonic.

#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bisub/submersion.hpp"

namespace bisub {

/// Named thresholds for every check the harness runs. All of them can be
/// overridden by name (the names are what a CLI exposes as --tol name=value).
struct ToleranceSet {
    double orthonormality = 1e-9;      // frame Gram matrix vs identity
    double adaptedness = 1e-9;         // horizontal part of [e_i, e3]
    double jacobi = 1e-9;              // bracket-cycle identity of the data
    double harmonic = 1e-8;            // max |tension| for a harmonic verdict
    double biharmonic = 1e-7;          // max bitension norm for biharmonicity
    double proper_gap = 1e-3;          // min |tension| for a *proper* verdict
    double spaceform_curvature = 1e-7; // curvature residuals in an audit
    double spaceform_vertical = 1e-8;  // fiber-direction data derivatives
    double crosspath = 1e-6;           // curvature-from-data vs direct table
    double fd = 1e-5;                  // finite-difference cross-check

    struct NamedField {
        const char* name;
        double ToleranceSet::*field;
    };

    [[nodiscard]] static const std::array<NamedField, 10>& fields() {
        static const std::array<NamedField, 10> f = {{
            {"orthonormality", &ToleranceSet::orthonormality},
            {"adaptedness", &ToleranceSet::adaptedness},
            {"jacobi", &ToleranceSet::jacobi},
            {"harmonic", &ToleranceSet::harmonic},
            {"biharmonic", &ToleranceSet::biharmonic},
            {"proper-gap", &ToleranceSet::proper_gap},
            {"spaceform-curvature", &ToleranceSet::spaceform_curvature},
            {"spaceform-vertical", &ToleranceSet::spaceform_vertical},
            {"crosspath", &ToleranceSet::crosspath},
            {"fd", &ToleranceSet::fd},
        }};
        return f;
    }

    void set(const std::string& name, double value) {
        for (const auto& nf : fields())
            if (name == nf.name) {
                this->*nf.field = value;
                return;
            }
        std::string known;
        for (const auto& nf : fields()) known += std::string(" ") + nf.name;
        throw std::invalid_argument("unknown tolerance '" + name +
                                    "'; known names:" + known);
    }

    [[nodiscard]] double get(const std::string& name) const {
        for (const auto& nf : fields())
            if (name == nf.name) return this->*nf.field;
        throw std::invalid_argument("unknown tolerance '" + name + "'");
    }
};

/// Maximum of one pointwise residual over a grid, with its argmax location.
struct CheckResult {
    std::string name;
    double max = 0.0;
    Point witness;
    double tol = 0.0;

    [[nodiscard]] bool pass() const { return max < tol; }
};

enum class Verdict { Harmonic, ProperBiharmonic, NotBiharmonic, Inconclusive };

[[nodiscard]] constexpr const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Harmonic: return "harmonic";
        case Verdict::ProperBiharmonic: return "proper-biharmonic";
        case Verdict::NotBiharmonic: return "not-biharmonic";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

/// Grid-level summary for one model: every intermediate maximum with its
/// witness, the verdict, and the exact tolerances it was derived from.
struct VerificationReport {
    std::string model;
    std::string kind;  // "framed" or "vertical-field"
    Verdict verdict = Verdict::Inconclusive;
    std::string detail;  // why inconclusive; empty for definitive verdicts
    std::vector<CheckResult> checks;
    double min_tension = 0.0;  // pointwise minimum of the tension norm
    Point min_tension_witness;
    ToleranceSet tolerances;
    std::size_t points = 0;
    double wall_seconds = 0.0;

    [[nodiscard]] const CheckResult* find(std::string_view name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
    [[nodiscard]] const CheckResult& check(std::string_view name) const {
        if (const CheckResult* c = find(name)) return *c;
        throw std::out_of_range("report has no check named '" + std::string(name) +
                                "'");
    }
};

namespace harness_detail {

struct MaxTracker {
    double max = -std::numeric_limits<double>::infinity();
    Point witness;

    void feed(double v, const Point& p) {
        if (v > max) {
            max = v;
            witness = p;
        }
    }
    [[nodiscard]] CheckResult result(std::string name, double tol) const {
        return {std::move(name), max, witness, tol};
    }
};

struct MinTracker {
    double min = std::numeric_limits<double>::infinity();
    Point witness;

    void feed(double v, const Point& p) {
        if (v < min) {
            min = v;
            witness = p;
        }
    }
};

class Stopwatch {
public:
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_ =
        std::chrono::steady_clock::now();
};

inline std::string at_point(const Point& p) {
    char buf[96];
    std::snprintf(buf, sizeof buf, " at (%g, %g, %g)", p.x, p.y, p.z);
    return buf;
}

[[nodiscard]] inline std::vector<Point> sample(const Grid& g) {
    std::vector<Point> pts = g.points();
    if (pts.empty())
        throw ModelError("grid produced no sample points (all excluded?)");
    return pts;
}

/// Relative deviation with an absolute floor of 1, so residuals of
/// near-zero quantities are judged absolutely.
[[nodiscard]] inline double rel_dev(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

/// Squared norm of a chart-coordinate vector in the given metric.
[[nodiscard]] inline double metric_norm(const MetricSpec& g, const Params& params,
                                        const Point& p,
                                        const std::array<double, 3>& v) {
    double s = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            s += eval_value(g(a, b), p, params) * v[a] * v[b];
    return std::sqrt(std::max(0.0, s));
}

}  // namespace harness_detail

// ===========================================================================
// Classification
// ===========================================================================

/// Sweeps the grid and applies the verdict ladder. Structural problems
/// (non-orthonormal or non-adapted frames, Jacobi violations, evaluation
/// failures) always yield "inconclusive" with the failing check named;
/// they never masquerade as a geometric verdict.
[[nodiscard]] inline VerificationReport classify(const FramedModel& m,
                                                 const Grid& g,
                                                 const ToleranceSet& tols = {}) {
    const harness_detail::Stopwatch clock;
    VerificationReport r;
    r.model = m.name;
    r.kind = "framed";
    r.tolerances = tols;

    const std::vector<Point> pts = harness_detail::sample(g);
    r.points = pts.size();

    harness_detail::MaxTracker ortho, adapt, jac, ten, bit;
    harness_detail::MinTracker ten_min;
    std::string failure;
    for (const Point& p : pts) {
        try {
            ortho.feed(orthonormality_residual(m.chart, p), p);
            adapt.feed(adaptedness_residual(m.chart, p), p);
            jac.feed(std::abs(jacobi_residual(m, p)), p);
            const std::array<double, 2> t = tension(m, p);
            const double tn = std::hypot(t[0], t[1]);
            ten.feed(tn, p);
            ten_min.feed(tn, p);
            bit.feed(bitension(m, p).norm(), p);
        } catch (const std::runtime_error& e) {
            failure = e.what() + harness_detail::at_point(p);
            break;
        }
    }

    r.checks = {ortho.result("orthonormality", tols.orthonormality),
                adapt.result("adaptedness", tols.adaptedness),
                jac.result("jacobi", tols.jacobi),
                ten.result("tension", tols.harmonic),
                bit.result("bitension", tols.biharmonic)};
    r.min_tension = ten_min.min;
    r.min_tension_witness = ten_min.witness;

    if (!failure.empty()) {
        r.verdict = Verdict::Inconclusive;
        r.detail = failure;
    } else if (const CheckResult* bad = [&]() -> const CheckResult* {
                   for (const char* name :
                        {"orthonormality", "adaptedness", "jacobi"})
                       if (!r.check(name).pass()) return &r.check(name);
                   return nullptr;
               }()) {
        r.verdict = Verdict::Inconclusive;
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "structural check '%s' fails: max residual %.3e exceeds "
                      "tolerance %g",
                      bad->name.c_str(), bad->max, bad->tol);
        r.detail = buf + harness_detail::at_point(bad->witness);
    } else if (r.check("tension").max < tols.harmonic) {
        r.verdict = Verdict::Harmonic;
    } else if (r.check("bitension").max < tols.biharmonic) {
        if (r.check("tension").max > tols.proper_gap) {
            r.verdict = Verdict::ProperBiharmonic;
        } else {
            r.verdict = Verdict::Inconclusive;
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          "bitension vanishes but max |tension| %.3e lies in the "
                          "indeterminate band [%g, %g] between harmonic and "
                          "clearly proper",
                          r.check("tension").max, tols.harmonic, tols.proper_gap);
            r.detail = buf;
        }
    } else {
        r.verdict = Verdict::NotBiharmonic;
    }

    r.wall_seconds = clock.seconds();
    return r;
}

/// Classification for a vertical-field-only model: without a basic
/// horizontal frame only the tension norm (fiber mean curvature) is
/// available, so the possible verdicts are "harmonic" and "inconclusive".
[[nodiscard]] inline VerificationReport classify(const VerticalFieldModel& m,
                                                 const Grid& g,
                                                 const ToleranceSet& tols = {}) {
    const harness_detail::Stopwatch clock;
    VerificationReport r;
    r.model = m.name;
    r.kind = "vertical-field";
    r.tolerances = tols;

    const std::vector<Point> pts = harness_detail::sample(g);
    r.points = pts.size();

    harness_detail::MaxTracker unit, ten;
    harness_detail::MinTracker ten_min;
    std::string failure;
    for (const Point& p : pts) {
        try {
            std::array<double, 3> z{};
            for (int a = 0; a < 3; ++a)
                z[a] = eval_value(m.vertical[a], p, m.params);
            const double zn =
                harness_detail::metric_norm(m.metric, m.params, p, z);
            unit.feed(std::abs(zn * zn - 1.0), p);
            const std::array<double, 3> h = fiber_mean_curvature(m, p);
            ten.feed(harness_detail::metric_norm(m.metric, m.params, p, h), p);
            ten_min.feed(harness_detail::metric_norm(m.metric, m.params, p, h),
                         p);
        } catch (const std::runtime_error& e) {
            failure = e.what() + harness_detail::at_point(p);
            break;
        }
    }

    r.checks = {unit.result("unit", tols.orthonormality),
                ten.result("tension", tols.harmonic)};
    r.min_tension = ten_min.min;
    r.min_tension_witness = ten_min.witness;

    if (!failure.empty()) {
        r.verdict = Verdict::Inconclusive;
        r.detail = failure;
    } else if (!r.check("unit").pass()) {
        const CheckResult& u = r.check("unit");
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "structural check 'unit' fails: max residual %.3e exceeds "
                      "tolerance %g",
                      u.max, u.tol);
        r.verdict = Verdict::Inconclusive;
        r.detail = buf + harness_detail::at_point(u.witness);
    } else if (r.check("tension").max < tols.harmonic) {
        r.verdict = Verdict::Harmonic;
    } else {
        r.verdict = Verdict::Inconclusive;
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "fibration is not harmonic (max |tension| %.3e) and no "
                      "basic frame is available, so the bitension cannot be "
                      "evaluated",
                      r.check("tension").max);
        r.detail = buf;
    }

    r.wall_seconds = clock.seconds();
    return r;
}

// ===========================================================================
// Space-form audit
// ===========================================================================

/// Grid maxima of the residuals a constant-curvature total space must
/// satisfy: the seven data-expressible curvature components against
/// (0, c, 0, c, 0, 0, c), and the five fiber-direction derivatives of the
/// integrability data (which must descend to the base).
struct AuditReport {
    std::string model;
    double c = 0.0;
    std::vector<CheckResult> curvature;  // seven entries, R1312 .. R2323
    std::vector<CheckResult> vertical;   // five entries, e3(f1) .. e3(sigma)
    ToleranceSet tolerances;
    std::size_t points = 0;
    double wall_seconds = 0.0;

    [[nodiscard]] bool pass() const {
        for (const auto& r : curvature)
            if (!r.pass()) return false;
        for (const auto& r : vertical)
            if (!r.pass()) return false;
        return true;
    }
    [[nodiscard]] double worst() const {
        double w = 0.0;
        for (const auto& r : curvature) w = std::max(w, r.max);
        for (const auto& r : vertical) w = std::max(w, r.max);
        return w;
    }
};

[[nodiscard]] inline AuditReport spaceform_audit(const FramedModel& m, double c,
                                                 const Grid& g,
                                                 const ToleranceSet& tols = {}) {
    const harness_detail::Stopwatch clock;
    AuditReport out;
    out.model = m.name;
    out.c = c;
    out.tolerances = tols;

    const std::vector<Point> pts = harness_detail::sample(g);
    out.points = pts.size();

    std::array<harness_detail::MaxTracker, 7> curv;
    std::array<harness_detail::MaxTracker, 5> vert;
    const std::array<double, 7> want = DataCurvature::spaceform_values(c);
    for (const Point& p : pts) {
        const std::array<double, 7> have = curvature_from_data(m, p).values();
        for (int i = 0; i < 7; ++i) curv[i].feed(std::abs(have[i] - want[i]), p);
        const VerticalInvariance vi = vertical_invariance(m, p);
        const std::array<double, 5> dz = {vi.f1, vi.f2, vi.kappa1, vi.kappa2,
                                          vi.sigma};
        for (int i = 0; i < 5; ++i) vert[i].feed(std::abs(dz[i]), p);
    }

    for (int i = 0; i < 7; ++i)
        out.curvature.push_back(
            curv[i].result(DataCurvature::names()[i], tols.spaceform_curvature));
    static const std::array<const char*, 5> vnames = {
        "e3(f1)", "e3(f2)", "e3(kappa1)", "e3(kappa2)", "e3(sigma)"};
    for (int i = 0; i < 5; ++i)
        out.vertical.push_back(vert[i].result(vnames[i], tols.spaceform_vertical));

    out.wall_seconds = clock.seconds();
    return out;
}

// ===========================================================================
// Finite-difference cross-check
// ===========================================================================

/// Worst relative deviation between a jet-computed derivative and its
/// central finite-difference estimate over the grid, with the offending
/// quantity named.
struct FdResult {
    double max = 0.0;
    Point witness;
    std::string quantity;
};

inline constexpr double kCrosscheckStep = 1e-5;

/// Cross-checks every first and second frame derivative the bitension
/// consumes: coordinate partials of the five data scalars, the frame
/// derivatives e_i(u), and the repeated derivatives e_i(e_i(kappa_j)).
/// The second-order comparison differentiates the jet-computed first
/// derivative, so no noisy second-order difference quotients appear.
[[nodiscard]] inline FdResult fd_crosscheck(const FramedModel& m, const Grid& g) {
    using sub_detail::PointCalculus;
    constexpr double h = kCrosscheckStep;
    static constexpr std::array<Jet<2> PointCalculus::*, 5> scalars = {
        &PointCalculus::f1, &PointCalculus::f2, &PointCalculus::k1,
        &PointCalculus::k2, &PointCalculus::sigma};
    static constexpr std::array<const char*, 5> scalar_names = {
        "f1", "f2", "kappa1", "kappa2", "sigma"};
    static constexpr std::array<const char*, 3> axis_names = {"x", "y", "z"};

    FdResult worst;
    auto feed = [&](double jet, double fd, const Point& p, std::string name) {
        const double d = harness_detail::rel_dev(jet, fd);
        if (d > worst.max) {
            worst.max = d;
            worst.witness = p;
            worst.quantity = std::move(name);
        }
    };

    for (const Point& p : harness_detail::sample(g)) {
        const PointCalculus pc = sub_detail::analyze(m.chart, p);
        std::array<PointCalculus, 3> plus, minus;
        for (int a = 0; a < 3; ++a) {
            Point q = p;
            q[a] = p[a] + h;
            plus[a] = sub_detail::analyze(m.chart, q);
            q[a] = p[a] - h;
            minus[a] = sub_detail::analyze(m.chart, q);
        }

        for (std::size_t s = 0; s < scalars.size(); ++s) {
            const Jet<2> PointCalculus::*u = scalars[s];
            // Coordinate partials of the scalar.
            std::array<double, 3> fd_partial{};
            for (int a = 0; a < 3; ++a) {
                fd_partial[a] =
                    ((plus[a].*u).value() - (minus[a].*u).value()) / (2 * h);
                feed(derivative(pc.*u, a).value(), fd_partial[a], p,
                     std::string("d(") + scalar_names[s] + ")/d" + axis_names[a]);
            }
            // Frame derivatives e_i(u).
            for (int i = 0; i < 3; ++i) {
                double fd = 0.0;
                for (int a = 0; a < 3; ++a)
                    fd += pc.e[i][a].value() * fd_partial[a];
                feed(pc.dv(i, pc.*u), fd, p,
                     std::string("e") + std::to_string(i + 1) + "(" +
                         scalar_names[s] + ")");
            }
        }

        // Repeated frame derivatives of the kappas (the Laplacian's second
        // order content): differentiate the jet-computed e_i(u).
        for (const std::size_t s : {std::size_t{2}, std::size_t{3}}) {
            const Jet<2> PointCalculus::*u = scalars[s];
            for (int i = 0; i < 3; ++i) {
                double fd = 0.0;
                for (int a = 0; a < 3; ++a)
                    fd += pc.e[i][a].value() *
                          (plus[a].dv(i, plus[a].*u) -
                           minus[a].dv(i, minus[a].*u)) /
                          (2 * h);
                feed(pc.ddv(i, i, pc.*u), fd, p,
                     std::string("e") + std::to_string(i + 1) + "(e" +
                         std::to_string(i + 1) + "(" + scalar_names[s] + "))");
            }
        }
    }
    return worst;
}

/// Cross-check for vertical-field models: every derivative the fiber mean
/// curvature consumes, i.e. the first partials of the metric entries and of
/// the vertical-field components.
[[nodiscard]] inline FdResult fd_crosscheck(const VerticalFieldModel& m,
                                            const Grid& g) {
    constexpr double h = kCrosscheckStep;
    static constexpr std::array<const char*, 6> metric_names = {
        "g_xx", "g_xy", "g_xz", "g_yy", "g_yz", "g_zz"};
    static constexpr std::array<const char*, 3> axis_names = {"x", "y", "z"};

    FdResult worst;
    auto feed = [&](double jet, double fd, const Point& p, std::string name) {
        const double d = harness_detail::rel_dev(jet, fd);
        if (d > worst.max) {
            worst.max = d;
            worst.witness = p;
            worst.quantity = std::move(name);
        }
    };
    auto sweep = [&](const Expr& e, const std::string& label, const Point& p) {
        const Jet<1> jet = eval_jet<1>(e, p, m.params);
        for (int a = 0; a < 3; ++a) {
            Point qp = p, qm = p;
            qp[a] = p[a] + h;
            qm[a] = p[a] - h;
            const double fd =
                (eval_value(e, qp, m.params) - eval_value(e, qm, m.params)) /
                (2 * h);
            feed(derivative(jet, a).value(), fd, p,
                 "d(" + label + ")/d" + axis_names[a]);
        }
    };

    for (const Point& p : harness_detail::sample(g)) {
        for (int q = 0; q < 6; ++q)
            sweep(m.metric.entry[q], metric_names[q], p);
        for (int a = 0; a < 3; ++a)
            sweep(m.vertical[a], std::string("Z") + std::to_string(a + 1), p);
    }
    return worst;
}

}  // namespace bisub
