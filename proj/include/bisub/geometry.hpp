// SPDX-License-Identifier: MIT
//
// Riemannian calculus for a chart with an orthonormal moving frame, built
// entirely on jets: metric evaluation, Lie brackets, the full Koszul
// connection (no constant-inner-product shortcut), and frame-indexed
// curvature components. Curvature is always computed in the frame; chart
// Christoffel symbols appear nowhere outside the test oracles.
//
// Sign and ordering conventions used throughout:
//   R(X,Y)Z       = [nabla_X, nabla_Y]Z - nabla_[X,Y] Z
//   R_{ijkl}      = -< R(e_i, e_j) e_k, e_l >
//   Gamma_{ijk}   = < nabla_{e_i} e_j, e_k >
// Public component indices are 1-based to match the usual notation R_1313.

#pragma once

#include <algorithm>
#include <array>
#include <memory>
#include <string>

#include "bisub/expr.hpp"
#include "bisub/jet.hpp"
#include "bisub/types.hpp"

namespace bisub {

/// A model definition is unusable (bad metric, missing fields, ...).
class ModelError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A frame fails a structural requirement (orthonormality, adaptedness, ...)
/// beyond tolerance at a concrete point.
class StructuralError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <int K>
using Vec3Jet = std::array<Jet<K>, 3>;

template <int K>
struct SymMat3Jet {
    std::array<Jet<K>, 6> m{};  // xx, xy, xz, yy, yz, zz

    [[nodiscard]] static int flat(int i, int j) {
        if (i > j) std::swap(i, j);
        static constexpr int table[3][3] = {{0, 1, 2}, {-1, 3, 4}, {-1, -1, 5}};
        return table[i][j];
    }
    [[nodiscard]] const Jet<K>& operator()(int i, int j) const { return m[flat(i, j)]; }
    Jet<K>& operator()(int i, int j) { return m[flat(i, j)]; }
};

/// Symmetric metric tensor given by six expression entries.
struct MetricSpec {
    std::array<Expr, 6> entry{};  // xx, xy, xz, yy, yz, zz

    [[nodiscard]] const Expr& operator()(int i, int j) const {
        return entry[SymMat3Jet<0>::flat(i, j)];
    }
    Expr& operator()(int i, int j) { return entry[SymMat3Jet<0>::flat(i, j)]; }
};

/// Chart-level geometric data: metric expressions, an orthonormal frame
/// (e1, e2 basic and e3 vertical for submersion charts), late-bound
/// parameters and the chart domain. A chart produced by a frame rotation
/// holds a pointer to its base instead of frame expressions; its frame jets
/// are derived from the base frame and the rotation angle
/// theta = atan2(kappa2, kappa1).
struct Chart {
    MetricSpec metric;
    std::array<std::array<Expr, 3>, 3> frame{};  // frame[i][a]: e_i component a
    Params params;
    Domain domain;
    std::shared_ptr<const Chart> rotated_from;

    [[nodiscard]] bool rotated() const { return rotated_from != nullptr; }
};

/// Everything pointwise calculus needs at one jet order.
template <int K>
struct FrameData {
    SymMat3Jet<K> g;
    std::array<Vec3Jet<K>, 3> e;
};

// ===========================================================================
// Jet-level tensor helpers
// ===========================================================================

template <int K>
[[nodiscard]] Jet<K> inner(const SymMat3Jet<K>& g, const Vec3Jet<K>& u,
                           const Vec3Jet<K>& v) {
    Jet<K> s;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) s += g(a, b) * u[a] * v[b];
    return s;
}

/// Coordinate components of [X, Y]; consumes one derivative order.
template <int K>
[[nodiscard]] Vec3Jet<K - 1> lie_bracket_jets(const Vec3Jet<K>& X,
                                              const Vec3Jet<K>& Y) {
    Vec3Jet<K - 1> out;
    for (int b = 0; b < 3; ++b) {
        Jet<K - 1> s;
        for (int a = 0; a < 3; ++a)
            s += truncate<K - 1>(X[a]) * derivative(Y[b], a) -
                 truncate<K - 1>(Y[a]) * derivative(X[b], a);
        out[b] = s;
    }
    return out;
}

/// Directional derivative X(u) of a scalar jet along a vector jet.
template <int K>
[[nodiscard]] Jet<K - 1> dir_derivative(const Vec3Jet<K - 1>& X, const Jet<K>& u) {
    Jet<K - 1> s;
    for (int a = 0; a < 3; ++a) s += X[a] * derivative(u, a);
    return s;
}

template <int K, int M>
[[nodiscard]] Vec3Jet<M> truncate_vec(const Vec3Jet<K>& v) {
    return {truncate<M>(v[0]), truncate<M>(v[1]), truncate<M>(v[2])};
}

template <int K, int M>
[[nodiscard]] SymMat3Jet<M> truncate_sym(const SymMat3Jet<K>& g) {
    SymMat3Jet<M> out;
    for (int q = 0; q < 6; ++q) out.m[q] = truncate<M>(g.m[q]);
    return out;
}

// ===========================================================================
// Chart evaluation
// ===========================================================================

namespace geo_detail {

/// Threshold below which kappa1^2 + kappa2^2 counts as degenerate and the
/// rotation falls back to the identity at that point.
inline constexpr double kRotationDegenerate = 1e-16;

template <int K>
[[nodiscard]] SymMat3Jet<K> metric_jets(const Chart& c, const Point& p) {
    SymMat3Jet<K> g;
    for (int q = 0; q < 6; ++q) g.m[q] = eval_jet<K>(c.metric.entry[q], p, c.params);
    return g;
}

template <int K>
FrameData<K> frame_data(const Chart& c, const Point& p) {
    if (!c.rotated()) {
        FrameData<K> fd;
        fd.g = metric_jets<K>(c, p);
        for (int i = 0; i < 3; ++i)
            for (int a = 0; a < 3; ++a)
                fd.e[i][a] = eval_jet<K>(c.frame[i][a], p, c.params);
        return fd;
    }
    if constexpr (K + 1 > kMaxJetOrder) {
        throw std::logic_error(
            "jet order budget exhausted: a rotated frame cannot supply "
            "order-4 jets");
    } else {
        const FrameData<K + 1> base = frame_data<K + 1>(*c.rotated_from, p);
        FrameData<K> fd;
        fd.g = truncate_sym<K + 1, K>(base.g);
        const Vec3Jet<K> e1 = truncate_vec<K + 1, K>(base.e[0]);
        const Vec3Jet<K> e2 = truncate_vec<K + 1, K>(base.e[1]);
        const Vec3Jet<K> e3 = truncate_vec<K + 1, K>(base.e[2]);
        const Jet<K> k1 = inner(fd.g, lie_bracket_jets(base.e[0], base.e[2]), e3);
        const Jet<K> k2 = inner(fd.g, lie_bracket_jets(base.e[1], base.e[2]), e3);
        const Jet<K> rho2 = k1 * k1 + k2 * k2;
        if (rho2.value() <= kRotationDegenerate) {
            fd.e = {e1, e2, e3};  // identity rotation at a degenerate point
            return fd;
        }
        const Jet<K> rho = sqrt(rho2);
        const Jet<K> cth = k1 / rho, sth = k2 / rho;
        for (int a = 0; a < 3; ++a) {
            fd.e[0][a] = cth * e1[a] + sth * e2[a];
            fd.e[1][a] = cth * e2[a] - sth * e1[a];
            fd.e[2][a] = e3[a];
        }
        return fd;
    }
}

}  // namespace geo_detail

/// Metric values at a point, verified symmetric positive definite via
/// leading principal minors (tolerance 1e-12).
[[nodiscard]] inline SymMat3Jet<0> metric_at(const Chart& c, const Point& p) {
    if (!c.domain.contains(p))
        throw ModelError("point outside chart domain " + c.domain.describe());
    const SymMat3Jet<0> g = geo_detail::metric_jets<0>(c, p);
    auto v = [&](int i, int j) { return g(i, j).value(); };
    const double m1 = v(0, 0);
    const double m2 = v(0, 0) * v(1, 1) - v(0, 1) * v(0, 1);
    const double m3 = v(0, 0) * (v(1, 1) * v(2, 2) - v(1, 2) * v(1, 2)) -
                      v(0, 1) * (v(0, 1) * v(2, 2) - v(1, 2) * v(0, 2)) +
                      v(0, 2) * (v(0, 1) * v(1, 2) - v(1, 1) * v(0, 2));
    if (m1 <= 1e-12 || m2 <= 1e-12 || m3 <= 1e-12)
        throw ModelError("metric is not positive definite at the point "
                         "(principal minors " +
                         std::to_string(m1) + ", " + std::to_string(m2) + ", " +
                         std::to_string(m3) + ")");
    return g;
}

/// Worst deviation of <e_i, e_j> from the identity at a point.
[[nodiscard]] inline double orthonormality_residual(const Chart& c, const Point& p) {
    const auto fd = geo_detail::frame_data<0>(c, p);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            worst = std::max(worst, std::abs(inner(fd.g, fd.e[i], fd.e[j]).value() -
                                             (i == j ? 1.0 : 0.0)));
    return worst;
}

/// Worst horizontal component of [e_1, e_3] and [e_2, e_3] at a point
/// (zero for an adapted frame).
[[nodiscard]] inline double adaptedness_residual(const Chart& c, const Point& p) {
    const auto fd = geo_detail::frame_data<1>(c, p);
    const auto g0 = truncate_sym<1, 0>(fd.g);
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
        const auto br = lie_bracket_jets(fd.e[i], fd.e[2]);
        for (int j = 0; j < 2; ++j)
            worst = std::max(
                std::abs(inner(g0, br, truncate_vec<1, 0>(fd.e[j])).value()), worst);
    }
    return worst;
}

/// Frame components of the bracket of two general expression vector fields.
[[nodiscard]] inline std::array<double, 3> lie_bracket(
    const Chart& c, const std::array<Expr, 3>& X, const std::array<Expr, 3>& Y,
    const Point& p) {
    if (!c.domain.contains(p))
        throw ModelError("point outside chart domain " + c.domain.describe());
    Vec3Jet<1> Xj, Yj;
    for (int a = 0; a < 3; ++a) {
        Xj[a] = eval_jet<1>(X[a], p, c.params);
        Yj[a] = eval_jet<1>(Y[a], p, c.params);
    }
    const auto br = lie_bracket_jets(Xj, Yj);
    const auto fd = geo_detail::frame_data<0>(c, p);
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i) out[i] = inner(fd.g, br, fd.e[i]).value();
    return out;
}

// ===========================================================================
// Connection and curvature
// ===========================================================================

template <int K>
struct ConnectionJets {
    // gamma[i][j][k] = < nabla_{e_i} e_j, e_k >
    std::array<std::array<std::array<Jet<K>, 3>, 3>, 3> gamma{};
};

/// Full Koszul formula; keeps the e(h) terms so nearly-orthonormal frames
/// degrade gracefully instead of silently.
template <int K>
[[nodiscard]] ConnectionJets<K> connection_jets(const FrameData<K + 1>& fd) {
    const auto gK = truncate_sym<K + 1, K>(fd.g);
    std::array<Vec3Jet<K>, 3> eK;
    for (int i = 0; i < 3; ++i) eK[i] = truncate_vec<K + 1, K>(fd.e[i]);

    // h_ij = <e_i, e_j> at order K+1 so a directional derivative survives.
    SymMat3Jet<K + 1> h;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) h(i, j) = inner(fd.g, fd.e[i], fd.e[j]);

    // c[i][j] = [e_i, e_j] coordinate jets at order K.
    std::array<std::array<Vec3Jet<K>, 3>, 3> br{};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) br[i][j] = lie_bracket_jets(fd.e[i], fd.e[j]);
    auto c3 = [&](int i, int j, int k) -> Jet<K> {  // <[e_i,e_j], e_k>
        if (i == j) return Jet<K>{};
        const Jet<K> v = inner(gK, br[std::min(i, j)][std::max(i, j)], eK[k]);
        return i < j ? v : -v;
    };

    ConnectionJets<K> out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                out.gamma[i][j][k] =
                    (dir_derivative(eK[i], h(j, k)) + dir_derivative(eK[j], h(i, k)) -
                     dir_derivative(eK[k], h(i, j)) + c3(i, j, k) - c3(i, k, j) -
                     c3(j, k, i)) *
                    0.5;
    return out;
}

/// All frame curvature components R_{ijkl} = -<R(e_i,e_j)e_k, e_l> at a
/// point, plus the connection values, computed once per point.
struct CurvatureTable {
    std::array<std::array<std::array<std::array<double, 3>, 3>, 3>, 3> r{};
    std::array<std::array<std::array<double, 3>, 3>, 3> gamma{};

    /// 1-based accessor matching the notation R_1313.
    [[nodiscard]] double component(int i, int j, int k, int l) const {
        for (int idx : {i, j, k, l})
            if (idx < 1 || idx > 3)
                throw std::out_of_range("curvature indices are 1-based in 1..3");
        return r[i - 1][j - 1][k - 1][l - 1];
    }
};

[[nodiscard]] inline CurvatureTable curvature_table(const Chart& c, const Point& p) {
    if (!c.domain.contains(p))
        throw ModelError("point outside chart domain " + c.domain.describe());
    const auto fd2 = geo_detail::frame_data<2>(c, p);
    const ConnectionJets<1> conn = connection_jets<1>(fd2);
    const auto e0 = [&](int i) { return truncate_vec<2, 0>(fd2.e[i]); };

    CurvatureTable t;
    // structure coefficients via torsion-freeness: <[e_i,e_j],e_k> = G_ijk - G_jik
    auto G = [&](int i, int j, int k) { return conn.gamma[i][j][k]; };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) t.gamma[i][j][k] = G(i, j, k).value();

    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    double v = dir_derivative(e0(i), G(j, k, l)).value() -
                               dir_derivative(e0(j), G(i, k, l)).value();
                    for (int m = 0; m < 3; ++m) {
                        v += G(j, k, m).value() * G(i, m, l).value() -
                             G(i, k, m).value() * G(j, m, l).value();
                        const double cm =
                            G(i, j, m).value() - G(j, i, m).value();  // <[e_i,e_j],e_m>
                        v -= cm * G(m, k, l).value();
                    }
                    t.r[i][j][k][l] = -v;
                }
    return t;
}

/// Single frame curvature component with 1-based indices.
[[nodiscard]] inline double curvature_component(const Chart& c, int i, int j, int k,
                                                int l, const Point& p) {
    return curvature_table(c, p).component(i, j, k, l);
}

/// Single connection coefficient < nabla_{e_i} e_j, e_k > (1-based indices).
[[nodiscard]] inline double connection_coeff(const Chart& c, int i, int j, int k,
                                             const Point& p) {
    for (int idx : {i, j, k})
        if (idx < 1 || idx > 3)
            throw std::out_of_range("connection indices are 1-based in 1..3");
    if (!c.domain.contains(p))
        throw ModelError("point outside chart domain " + c.domain.describe());
    const auto fd1 = geo_detail::frame_data<1>(c, p);
    return connection_jets<0>(fd1).gamma[i - 1][j - 1][k - 1].value();
}

}  // namespace bisub
