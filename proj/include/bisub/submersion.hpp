// SPDX-License-Identifier: MIT
//
// Pointwise analysis of a Riemannian submersion pi: M^3 -> N^2 described by
// a metric chart with an adapted orthonormal frame {e1, e2, e3}: e3 tangent
// to the fibers, e1/e2 projecting isometrically onto the base.
//
// Everything is driven by the five bracket scalars of the adapted frame,
//   kappa1 = <[e1,e3], e3>   kappa2 = <[e2,e3], e3>    (fiber mean curvature)
//   f1     = <[e1,e2], e1>   f2     = <[e1,e2], e2>    (base frame data)
//   sigma  = -<[e1,e2], e3> / 2                        (non-integrability)
// and their frame derivatives, all evaluated through jets.

#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <string>

#include "bisub/geometry.hpp"

namespace bisub {

/// Optional base-manifold data: 2x2 metric (entries xx, xy, yy) and the base
/// orthonormal frame in base coordinates (x, y), plus the projection map.
struct BaseBlock {
    std::array<Expr, 3> metric;               // h_xx, h_xy, h_yy
    std::array<std::array<Expr, 2>, 2> frame; // frame[i][a]: eps_i component a
    std::array<Expr, 2> projection;           // base coordinates of pi(x,y,z)
};

/// A submersion model: chart-level geometry plus submersion bookkeeping.
struct FramedModel {
    std::string name;
    std::string note;  // one-line description shown by catalog listings
    Chart chart;
    std::optional<BaseBlock> base;
    std::optional<double> curvature_c;  // declared constant sectional curvature
    Grid grid;

    [[nodiscard]] bool rotated() const { return chart.rotated(); }
};

/// A metric with only a unit vertical field: enough for fiber geometry when
/// no basic horizontal frame is available.
struct VerticalFieldModel {
    std::string name;
    std::string note;
    MetricSpec metric;
    std::array<Expr, 3> vertical;
    Params params;
    Domain domain;
    Grid grid;
};

struct IntegrabilityData {
    double f1 = 0, f2 = 0, kappa1 = 0, kappa2 = 0, sigma = 0;
};

/// Left-hand sides of the two biharmonicity equations along the base frame.
struct BitensionResidual {
    double r1 = 0, r2 = 0;
    [[nodiscard]] double norm() const { return std::hypot(r1, r2); }
};

/// e3-derivatives of the five data scalars (all vanish when the data descend
/// to the base, e.g. over a constant-curvature total space).
struct VerticalInvariance {
    double f1 = 0, f2 = 0, kappa1 = 0, kappa2 = 0, sigma = 0;
    [[nodiscard]] double max_abs() const {
        return std::max({std::abs(f1), std::abs(f2), std::abs(kappa1),
                         std::abs(kappa2), std::abs(sigma)});
    }
};

/// The seven curvature components that are expressible in integrability data
/// alone. Over a space form of curvature c they must equal
/// (0, c, 0, c, 0, 0, c).
struct DataCurvature {
    double r1312 = 0, r1313 = 0, r1323 = 0, r1212 = 0, r1223 = 0, r2313 = 0,
           r2323 = 0;

    [[nodiscard]] std::array<double, 7> values() const {
        return {r1312, r1313, r1323, r1212, r1223, r2313, r2323};
    }
    [[nodiscard]] static std::array<double, 7> spaceform_values(double c) {
        return {0, c, 0, c, 0, 0, c};
    }
    [[nodiscard]] static const std::array<const char*, 7>& names() {
        static const std::array<const char*, 7> n = {
            "R1312", "R1313", "R1323", "R1212", "R1223", "R2313", "R2323"};
        return n;
    }
    /// Frame index quadruples matching values(), for cross-checks against
    /// directly computed curvature components.
    [[nodiscard]] static const std::array<std::array<int, 4>, 7>& indices() {
        static const std::array<std::array<int, 4>, 7> ix = {{{1, 3, 1, 2},
                                                              {1, 3, 1, 3},
                                                              {1, 3, 2, 3},
                                                              {1, 2, 1, 2},
                                                              {1, 2, 2, 3},
                                                              {2, 3, 1, 3},
                                                              {2, 3, 2, 3}}};
        return ix;
    }
};

namespace sub_detail {

inline constexpr double kAdaptedTol = 1e-9;
inline constexpr double kUnitTol = 1e-9;
inline constexpr double kFiberConstTol = 1e-8;
inline constexpr double kSimplifiedKappa2Tol = 1e-8;

/// One evaluation of everything pointwise analysis needs: order-2 jets of
/// the five data scalars, frame jets for directional derivatives, connection
/// values, and the horizontal components of the vertical brackets.
struct PointCalculus {
    Jet<2> f1, f2, k1, k2, sigma;
    std::array<Vec3Jet<1>, 3> e;                                // frame at order 1
    std::array<std::array<std::array<double, 3>, 3>, 3> gamma;  // values
    double adapt13 = 0, adapt23 = 0;  // worst horizontal part of [e_i, e3]

    [[nodiscard]] IntegrabilityData data() const {
        return {f1.value(), f2.value(), k1.value(), k2.value(), sigma.value()};
    }

    /// e_i(u) as an order-1 jet.
    [[nodiscard]] Jet<1> d(int i, const Jet<2>& u) const {
        return dir_derivative(e[i], u);
    }
    /// e_i(u) value.
    [[nodiscard]] double dv(int i, const Jet<2>& u) const { return d(i, u).value(); }
    /// e_i(e_j(u)) value.
    [[nodiscard]] double ddv(int i, int j, const Jet<2>& u) const {
        return dir_derivative(truncate_vec<1, 0>(e[i]), d(j, u)).value();
    }
    /// Rough Laplacian sum_i [e_i(e_i(u)) - (nabla_{e_i}e_i)(u)].
    [[nodiscard]] double laplacian(const Jet<2>& u) const {
        double s = 0.0;
        for (int i = 0; i < 3; ++i) {
            s += ddv(i, i, u);
            for (int k = 0; k < 3; ++k) s -= gamma[i][i][k] * dv(k, u);
        }
        return s;
    }
    /// Gauss curvature of the base pulled back through the projection.
    [[nodiscard]] double base_curvature() const {
        const double F1 = f1.value(), F2 = f2.value();
        return -(dv(1, f1) - dv(0, f2) + F1 * F1 + F2 * F2);
    }
};

inline PointCalculus analyze(const Chart& c, const Point& p) {
    const FrameData<3> fd = geo_detail::frame_data<3>(c, p);
    const SymMat3Jet<2> g2 = truncate_sym<3, 2>(fd.g);
    std::array<Vec3Jet<2>, 3> e2;
    for (int i = 0; i < 3; ++i) e2[i] = truncate_vec<3, 2>(fd.e[i]);

    const Vec3Jet<2> b12 = lie_bracket_jets(fd.e[0], fd.e[1]);
    const Vec3Jet<2> b13 = lie_bracket_jets(fd.e[0], fd.e[2]);
    const Vec3Jet<2> b23 = lie_bracket_jets(fd.e[1], fd.e[2]);

    PointCalculus pc;
    pc.f1 = inner(g2, b12, e2[0]);
    pc.f2 = inner(g2, b12, e2[1]);
    pc.k1 = inner(g2, b13, e2[2]);
    pc.k2 = inner(g2, b23, e2[2]);
    pc.sigma = inner(g2, b12, e2[2]) * (-0.5);
    pc.adapt13 = std::max(std::abs(inner(g2, b13, e2[0]).value()),
                          std::abs(inner(g2, b13, e2[1]).value()));
    pc.adapt23 = std::max(std::abs(inner(g2, b23, e2[0]).value()),
                          std::abs(inner(g2, b23, e2[1]).value()));
    for (int i = 0; i < 3; ++i) pc.e[i] = truncate_vec<2, 1>(e2[i]);

    FrameData<1> fd1;
    fd1.g = truncate_sym<3, 1>(fd.g);
    for (int i = 0; i < 3; ++i) fd1.e[i] = truncate_vec<3, 1>(fd.e[i]);
    const ConnectionJets<0> conn = connection_jets<0>(fd1);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) pc.gamma[i][j][k] = conn.gamma[i][j][k].value();
    return pc;
}

inline void require_in_domain(const Chart& c, const Point& p) {
    if (!c.domain.contains(p))
        throw ModelError("point outside chart domain " + c.domain.describe());
}

inline void require_adapted(const PointCalculus& pc, const Point& p) {
    const char* failing = pc.adapt13 > kAdaptedTol   ? "[e1,e3]"
                          : pc.adapt23 > kAdaptedTol ? "[e2,e3]"
                                                     : nullptr;
    if (failing) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "frame is not adapted: %s has a horizontal component of "
                      "magnitude %.3e at (%.17g, %.17g, %.17g)",
                      failing, std::max(pc.adapt13, pc.adapt23), p.x, p.y, p.z);
        throw StructuralError(buf);
    }
}

inline PointCalculus checked_analyze(const FramedModel& m, const Point& p) {
    require_in_domain(m.chart, p);
    PointCalculus pc = analyze(m.chart, p);
    require_adapted(pc, p);
    return pc;
}

}  // namespace sub_detail

// ===========================================================================
// Pointwise operations
// ===========================================================================

[[nodiscard]] inline IntegrabilityData integrability_data(const FramedModel& m,
                                                          const Point& p) {
    return sub_detail::checked_analyze(m, p).data();
}

/// Tension components along the base frame: (-kappa1, -kappa2).
[[nodiscard]] inline std::array<double, 2> tension(const FramedModel& m,
                                                   const Point& p) {
    const IntegrabilityData d = integrability_data(m, p);
    return {-d.kappa1, -d.kappa2};
}

/// Gauss curvature of the base, K = -[e2(f1) - e1(f2) + f1^2 + f2^2].
[[nodiscard]] inline double gauss_curvature_base(const FramedModel& m,
                                                 const Point& p) {
    return sub_detail::checked_analyze(m, p).base_curvature();
}

/// Full biharmonicity residuals: the submersion is biharmonic at p iff both
/// vanish. r1/r2 are the components along the base frame of the bitension.
[[nodiscard]] inline BitensionResidual bitension(const FramedModel& m,
                                                 const Point& p) {
    const auto pc = sub_detail::checked_analyze(m, p);
    const auto [F1, F2, K1, K2, S] = pc.data();
    const double KN = pc.base_curvature();
    const double G2 = -KN + F1 * F1 + F2 * F2;

    BitensionResidual r;
    r.r1 = -pc.laplacian(pc.k1) - F1 * pc.dv(0, pc.k2) - pc.dv(0, pc.k2 * pc.f1) -
           F2 * pc.dv(1, pc.k2) - pc.dv(1, pc.k2 * pc.f2) + K1 * K2 * F1 +
           K2 * K2 * F2 + K1 * G2;
    r.r2 = -pc.laplacian(pc.k2) + F1 * pc.dv(0, pc.k1) + pc.dv(0, pc.k1 * pc.f1) +
           F2 * pc.dv(1, pc.k1) + pc.dv(1, pc.k1 * pc.f2) - K1 * K2 * F2 -
           K1 * K1 * F1 + K2 * G2;
    return r;
}

/// Reduced biharmonicity residuals, valid only where kappa2 vanishes.
[[nodiscard]] inline BitensionResidual bitension_simplified(const FramedModel& m,
                                                            const Point& p) {
    const auto pc = sub_detail::checked_analyze(m, p);
    const auto [F1, F2, K1, K2, S] = pc.data();
    if (std::abs(K2) > sub_detail::kSimplifiedKappa2Tol) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "simplified residuals need |kappa2| <= %.0e but |kappa2| = "
                      "%.3e here",
                      sub_detail::kSimplifiedKappa2Tol, std::abs(K2));
        throw ModelError(buf);
    }
    BitensionResidual r;
    r.r1 = -pc.laplacian(pc.k1) + K1 * (-pc.base_curvature() + F1 * F1 + F2 * F2);
    r.r2 = F1 * pc.dv(0, pc.k1) + pc.dv(0, pc.k1 * pc.f1) + F2 * pc.dv(1, pc.k1) +
           pc.dv(1, pc.k1 * pc.f2) - K1 * K1 * F1;
    return r;
}

/// Bracket-cycle identity of the data: 2 e3(sigma) + kappa1 f1 + kappa2 f2
/// + e2(kappa1) - e1(kappa2). Vanishes for every genuine adapted frame.
[[nodiscard]] inline double jacobi_residual(const FramedModel& m, const Point& p) {
    const auto pc = sub_detail::checked_analyze(m, p);
    const auto [F1, F2, K1, K2, S] = pc.data();
    return 2.0 * pc.dv(2, pc.sigma) + K1 * F1 + K2 * F2 + pc.dv(1, pc.k1) -
           pc.dv(0, pc.k2);
}

/// e3-derivatives of the five data scalars.
[[nodiscard]] inline VerticalInvariance vertical_invariance(const FramedModel& m,
                                                            const Point& p) {
    const auto pc = sub_detail::checked_analyze(m, p);
    VerticalInvariance v;
    v.f1 = pc.dv(2, pc.f1);
    v.f2 = pc.dv(2, pc.f2);
    v.kappa1 = pc.dv(2, pc.k1);
    v.kappa2 = pc.dv(2, pc.k2);
    v.sigma = pc.dv(2, pc.sigma);
    return v;
}

/// The seven curvature components determined by the integrability data and
/// its first frame derivatives.
[[nodiscard]] inline DataCurvature curvature_from_data(const FramedModel& m,
                                                       const Point& p) {
    const auto pc = sub_detail::checked_analyze(m, p);
    const auto [F1, F2, K1, K2, S] = pc.data();
    DataCurvature r;
    r.r1312 = -(pc.dv(0, pc.sigma) - 2.0 * K1 * S);
    r.r1313 = -(-pc.dv(0, pc.k1) - S * S + K1 * K1 - K2 * F1);
    r.r1323 = -(-pc.dv(0, pc.k2) + pc.dv(2, pc.sigma) + K1 * F1 + K1 * K2);
    r.r1212 = -(pc.dv(1, pc.f1) - pc.dv(0, pc.f2) + F1 * F1 + F2 * F2 + 3.0 * S * S);
    // R_1223 mirrors R_1312 under swapping the two basic directions (which
    // negates sigma and exchanges the kappas), hence the sigma*kappa2 term.
    r.r1223 = -(pc.dv(1, pc.sigma) - 2.0 * S * K2);
    r.r2313 = -(-pc.dv(1, pc.k1) - pc.dv(2, pc.sigma) - K2 * F2 + K1 * K2);
    r.r2323 = -(-S * S - pc.dv(1, pc.k2) + K1 * F2 + K2 * K2);
    return r;
}

/// Residuals of the three relations kappa1^2 = 3 sigma^2 - 3c,
/// 7 sigma^2 - c, 15 sigma^2 - c that a proper-biharmonic submersion of a
/// space form would have to satisfy simultaneously (impossible with
/// kappa1 != 0, which is the non-existence mechanism this toolkit probes).
/// Expects a kappa2 = 0 frame; rotate first if needed.
[[nodiscard]] inline std::array<double, 3> spaceform_obstruction(
    const FramedModel& m, const Point& p) {
    if (!m.curvature_c)
        throw ModelError("model '" + m.name +
                         "' declares no constant curvature c; the obstruction "
                         "residuals are only defined over a space form");
    const double c = *m.curvature_c;
    const IntegrabilityData d = integrability_data(m, p);
    const double k2 = d.kappa1 * d.kappa1, s2 = d.sigma * d.sigma;
    return {k2 - (3 * s2 - 3 * c), k2 - (7 * s2 - c), k2 - (15 * s2 - c)};
}

// ===========================================================================
// Frame rotation
// ===========================================================================

/// Rotates the basic frame by theta = atan2(kappa2, kappa1), producing an
/// equivalent model whose data satisfy kappa2' = 0,
/// kappa1' = sqrt(kappa1^2 + kappa2^2), sigma' = sigma.
///
/// The rotation is only well defined when theta descends to the base, i.e.
/// kappa1 and kappa2 are constant along fibers; this is checked on the grid
/// and violations are refused. Points where kappa1^2 + kappa2^2 <= 1e-16
/// keep the original frame (nothing to rotate there); if that happens on the
/// whole grid the model is returned unchanged.
[[nodiscard]] inline FramedModel rotate_frame(const FramedModel& m) {
    if (m.rotated())
        throw ModelError(
            "the frame is already a rotated view; rotate the original model "
            "instead of stacking rotations");

    double worst_fiber = 0.0, worst_rho2 = 0.0;
    for (const Point& p : m.grid.points()) {
        const auto pc = sub_detail::checked_analyze(m, p);
        worst_fiber = std::max(
            {worst_fiber, std::abs(pc.dv(2, pc.k1)), std::abs(pc.dv(2, pc.k2))});
        const double k1 = pc.k1.value(), k2 = pc.k2.value();
        worst_rho2 = std::max(worst_rho2, k1 * k1 + k2 * k2);
    }
    if (worst_fiber > sub_detail::kFiberConstTol) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "cannot rotate: kappa1/kappa2 vary along fibers "
                      "(max |e3(kappa)| = %.3e > %.0e), so the rotation angle "
                      "does not descend to the base",
                      worst_fiber, sub_detail::kFiberConstTol);
        throw ModelError(buf);
    }
    if (worst_rho2 <= geo_detail::kRotationDegenerate) return m;

    FramedModel out = m;
    out.chart.frame = {};  // frame now comes from the rotation of the original
    out.chart.rotated_from = std::make_shared<const Chart>(m.chart);
    // The original base block describes the unrotated frame downstairs and
    // would no longer be consistent with e1', e2'.
    out.base.reset();
    return out;
}

// ===========================================================================
// Vertical-field geometry
// ===========================================================================

/// Horizontal part of nabla_{e3} e3 in chart coordinates; its norm is the
/// norm of the tension of the fibration at that point.
[[nodiscard]] inline std::array<double, 3> fiber_mean_curvature(
    const VerticalFieldModel& m, const Point& p) {
    if (!m.domain.contains(p))
        throw ModelError("point outside chart domain " + m.domain.describe());
    SymMat3Jet<1> g;
    for (int q = 0; q < 6; ++q) g.m[q] = eval_jet<1>(m.metric.entry[q], p, m.params);
    Vec3Jet<1> Z;
    for (int a = 0; a < 3; ++a) Z[a] = eval_jet<1>(m.vertical[a], p, m.params);

    const Jet<1> zz = inner(g, Z, Z);
    if (std::abs(zz.value() - 1.0) > sub_detail::kUnitTol) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "vertical field is not unit: |<Z,Z> - 1| = %.3e",
                      std::abs(zz.value() - 1.0));
        throw StructuralError(buf);
    }

    const Vec3Jet<0> Z0 = truncate_vec<1, 0>(Z);
    // Koszul with a constant coordinate field E_a:
    //   2<nabla_Z Z, E_a> = 2 Z<Z,E_a> - d_a<Z,Z> - 2<[Z,E_a], Z>,
    // and [Z, E_a] = -d_a Z componentwise.
    std::array<double, 3> cov{};  // <nabla_Z Z, d/dx^a>
    for (int a = 0; a < 3; ++a) {
        Jet<1> za;  // <Z, E_a>
        for (int b = 0; b < 3; ++b) za += g(a, b) * Z[b];
        double v = dir_derivative(Z0, za).value() - 0.5 * derivative(zz, a).value();
        for (int b = 0; b < 3; ++b)
            for (int cth = 0; cth < 3; ++cth)
                v += derivative(Z[b], a).value() * g(b, cth).value() * Z0[cth].value();
        cov[a] = v;
    }

    // Raise the index, then remove the vertical component.
    std::array<std::array<double, 3>, 3> gv{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) gv[i][j] = g(i, j).value();
    const double det =
        gv[0][0] * (gv[1][1] * gv[2][2] - gv[1][2] * gv[2][1]) -
        gv[0][1] * (gv[1][0] * gv[2][2] - gv[1][2] * gv[2][0]) +
        gv[0][2] * (gv[1][0] * gv[2][1] - gv[1][1] * gv[2][0]);
    auto adj = [&](int i, int j) {
        const int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3,
                  j2 = (j + 2) % 3;
        return gv[j1][i1] * gv[j2][i2] - gv[j1][i2] * gv[j2][i1];
    };
    std::array<double, 3> V{};
    for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a) V[b] += adj(a, b) / det * cov[a];

    double vz = 0.0;  // <nabla_Z Z, Z> (should be ~0 for unit Z)
    for (int a = 0; a < 3; ++a) vz += cov[a] * Z0[a].value();
    std::array<double, 3> H{};
    for (int b = 0; b < 3; ++b) H[b] = V[b] - vz * Z0[b].value();
    return H;
}

/// Reinterprets a framed model through its vertical field only.
[[nodiscard]] inline VerticalFieldModel as_vertical_field(const FramedModel& m) {
    const Chart* root = &m.chart;
    while (root->rotated()) root = root->rotated_from.get();
    VerticalFieldModel v;
    v.name = m.name;
    v.note = m.note;
    v.metric = m.chart.metric;
    v.vertical = root->frame[2];
    v.params = m.chart.params;
    v.domain = m.chart.domain;
    v.grid = m.grid;
    return v;
}

// ===========================================================================
// Base-block consistency
// ===========================================================================

/// Worst deviation between the pushed-forward frame dpi(e_i) and the
/// declared base frame at the projected point, together with the deviation
/// of (f1, f2) from the base bracket data. Returns nothing when the model
/// carries no base block.
[[nodiscard]] inline std::optional<double> base_consistency_residual(
    const FramedModel& m, const Point& p) {
    if (!m.base) return std::nullopt;
    sub_detail::require_in_domain(m.chart, p);
    const BaseBlock& bb = *m.base;
    const auto pc = sub_detail::analyze(m.chart, p);

    // Projected point; base expressions use coordinates (x, y).
    Point q{eval_value(bb.projection[0], p, m.chart.params),
            eval_value(bb.projection[1], p, m.chart.params), 0.0};

    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int a = 0; a < 2; ++a) {
            const Jet<1> proj = eval_jet<1>(bb.projection[a], p, m.chart.params);
            const double push =
                dir_derivative(truncate_vec<1, 0>(pc.e[i]), proj).value();
            const double eps = eval_value(bb.frame[i][a], q, m.chart.params);
            worst = std::max(worst, std::abs(push - eps));
        }
    }

    // Base bracket data F_i: [eps1, eps2] = F1 eps1 + F2 eps2 downstairs.
    std::array<Jet<1>, 2> ve1, ve2;
    for (int a = 0; a < 2; ++a) {
        ve1[a] = eval_jet<1>(bb.frame[0][a], q, m.chart.params);
        ve2[a] = eval_jet<1>(bb.frame[1][a], q, m.chart.params);
    }
    std::array<double, 2> br{};
    for (int b = 0; b < 2; ++b)
        for (int a = 0; a < 2; ++a)
            br[b] += ve1[a].value() * derivative(ve2[b], a).value() -
                     ve2[a].value() * derivative(ve1[b], a).value();
    const double hxx = eval_value(bb.metric[0], q, m.chart.params);
    const double hxy = eval_value(bb.metric[1], q, m.chart.params);
    const double hyy = eval_value(bb.metric[2], q, m.chart.params);
    auto hdot = [&](const std::array<double, 2>& u, const std::array<Jet<1>, 2>& w) {
        return hxx * u[0] * w[0].value() +
               hxy * (u[0] * w[1].value() + u[1] * w[0].value()) +
               hyy * u[1] * w[1].value();
    };
    worst = std::max(worst, std::abs(hdot(br, ve1) - pc.f1.value()));
    worst = std::max(worst, std::abs(hdot(br, ve2) - pc.f2.value()));
    return worst;
}

}  // namespace bisub
