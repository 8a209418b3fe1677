// SPDX-License-Identifier: MIT
//
// Built-in model catalog: concrete submersions with known behaviour, used as
// positive and negative controls, plus the closed-form ingredients of the
// warped-product family.

#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "bisub/submersion.hpp"

namespace bisub {

struct CatalogEntry {
    std::string name;
    std::string note;
    std::variant<FramedModel, VerticalFieldModel> model;

    [[nodiscard]] bool is_framed() const {
        return std::holds_alternative<FramedModel>(model);
    }
    [[nodiscard]] const char* kind() const {
        return is_framed() ? "framed" : "vertical-field";
    }
    [[nodiscard]] const FramedModel& framed() const {
        return std::get<FramedModel>(model);
    }
    [[nodiscard]] const VerticalFieldModel& vertical() const {
        return std::get<VerticalFieldModel>(model);
    }
    [[nodiscard]] const Grid& grid() const {
        return is_framed() ? framed().grid : vertical().grid;
    }
};

namespace model_detail {

inline Expr ex(const std::string& s, const std::set<std::string>& params = {}) {
    return parse_expr(s, params);
}

inline MetricSpec metric6(const std::array<std::string, 6>& s,
                          const std::set<std::string>& params = {}) {
    MetricSpec m;
    for (int q = 0; q < 6; ++q) m.entry[q] = ex(s[q], params);
    return m;
}

inline std::array<std::array<Expr, 3>, 3> frame9(
    const std::array<std::array<std::string, 3>, 3>& s,
    const std::set<std::string>& params = {}) {
    std::array<std::array<Expr, 3>, 3> f;
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a) f[i][a] = ex(s[i][a], params);
    return f;
}

inline FramedModel euclidean_projection() {
    FramedModel m;
    m.name = "euclidean-projection";
    m.note = "orthogonal projection of flat 3-space onto a coordinate plane";
    m.chart.metric = metric6({"1", "0", "0", "1", "0", "1"});
    m.chart.frame = frame9({{{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}}});
    BaseBlock b;
    b.metric = {ex("1"), ex("0"), ex("1")};
    b.frame = {{{ex("1"), ex("0")}, {ex("0"), ex("1")}}};
    b.projection = {ex("x"), ex("y")};
    m.base = b;
    m.curvature_c = 0.0;
    m.grid.lo = {-1, -1, -1};
    m.grid.hi = {1, 1, 1};
    return m;
}

inline FramedModel hyperbolic_projection() {
    FramedModel m;
    m.name = "hyperbolic-projection";
    m.note = "upper-half-space chart collapsed along a boundary-parallel "
             "direction onto the half-plane";
    m.chart.metric = metric6({"1/z^2", "0", "0", "1/z^2", "0", "1/z^2"});
    m.chart.frame =
        frame9({{{"z", "0", "0"}, {"0", "0", "z"}, {"0", "z", "0"}}});
    m.chart.domain.axis[2] = {0.0, std::numeric_limits<double>::infinity()};
    BaseBlock b;
    b.metric = {ex("1/y^2"), ex("0"), ex("1/y^2")};
    b.frame = {{{ex("y"), ex("0")}, {ex("0"), ex("y")}}};
    b.projection = {ex("x"), ex("z")};
    m.base = b;
    m.curvature_c = -1.0;
    m.grid.lo = {-1, -1, 0.5};
    m.grid.hi = {1, 1, 2.5};
    return m;
}

inline FramedModel nil_bundle() {
    FramedModel m;
    m.name = "nil";
    m.note = "Heisenberg-type metric on R^3 fibered over a plane whose "
             "curvature varies with x";
    m.chart.metric = metric6({"1", "0", "0", "1+x^2", "-x", "1"});
    m.chart.frame = frame9({{{"1", "0", "0"},
                             {"0", "-x/sqrt(1+x^2)", "-sqrt(1+x^2)"},
                             {"0", "1/sqrt(1+x^2)", "0"}}});
    BaseBlock b;
    b.metric = {ex("1"), ex("0"), ex("1/(1+x^2)")};
    b.frame = {{{ex("1"), ex("0")}, {ex("0"), ex("-sqrt(1+x^2)")}}};
    b.projection = {ex("x"), ex("z")};
    m.base = b;
    m.grid.lo = {-2, -1, -1};
    m.grid.hi = {2, 1, 1};
    return m;
}

inline const std::set<std::string>& warped_params() {
    static const std::set<std::string> p{"c1", "b1", "c"};
    return p;
}

inline std::string warped_log_beta_text() {
    return "c1*x - 2*ln(exp(c1*x) - 1) + b1*y - 2*ln(exp(b1*y) - 1) + ln(c)";
}

inline FramedModel warped_product() {
    FramedModel m;
    m.name = "warped";
    m.note = "warped fiber length over the flat plane; the default profile "
             "makes the projection biharmonic without being harmonic";
    const std::string lnb = "(" + warped_log_beta_text() + ")";
    m.chart.metric = metric6({"1", "0", "0", "1", "0", "1"}, warped_params());
    m.chart.metric.entry[5] = ex("exp(-2*" + lnb + ")", warped_params());
    m.chart.frame =
        frame9({{{"1", "0", "0"}, {"0", "1", "0"}, {"0", "0", "1"}}});
    m.chart.frame[2][2] = ex("exp(" + lnb + ")", warped_params());
    m.chart.params = {{"c1", 1.0}, {"b1", 1.0}, {"c", 1.0}};
    m.chart.domain.axis[0] = {0.1, 3.0};
    m.chart.domain.axis[1] = {0.1, 3.0};
    m.chart.domain.axis[2] = {-1.0, 1.0};
    BaseBlock b;
    b.metric = {ex("1"), ex("0"), ex("1")};
    b.frame = {{{ex("1"), ex("0")}, {ex("0"), ex("1")}}};
    b.projection = {ex("x"), ex("y")};
    m.base = b;
    m.grid.lo = {0.15, 0.15, -0.95};
    m.grid.hi = {2.95, 2.95, 0.95};
    return m;
}

inline VerticalFieldModel helical_field() {
    VerticalFieldModel m;
    m.name = "helical";
    m.note = "unit Killing field of a screw motion of flat 3-space; fibers "
             "are helices away from the axis";
    m.metric = metric6({"1", "0", "0", "1", "0", "1"});
    m.vertical = {ex("-y/sqrt(1+x^2+y^2)"), ex("x/sqrt(1+x^2+y^2)"),
                  ex("1/sqrt(1+x^2+y^2)")};
    m.grid.lo = {-1, -1, -1};
    m.grid.hi = {1, 1, 1};
    return m;
}

}  // namespace model_detail

/// Names of all built-in models, in listing order.
[[nodiscard]] inline const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names{
        "euclidean-projection", "hyperbolic-projection", "nil", "warped",
        "helical"};
    return names;
}

/// The immutable built-in catalog.
[[nodiscard]] inline const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = [] {
        std::vector<CatalogEntry> v;
        auto add = [&v](auto model) {
            CatalogEntry e;
            e.name = model.name;
            e.note = model.note;
            e.model = std::move(model);
            v.push_back(std::move(e));
        };
        add(model_detail::euclidean_projection());
        add(model_detail::hyperbolic_projection());
        add(model_detail::nil_bundle());
        add(model_detail::warped_product());
        add(model_detail::helical_field());
        return v;
    }();
    return entries;
}

/// Looks up a built-in model by name; unknown names get an error that lists
/// the valid ones.
[[nodiscard]] inline const CatalogEntry& builtin(const std::string& name) {
    for (const CatalogEntry& e : catalog())
        if (e.name == name) return e;
    std::string msg = "unknown model '" + name + "'; built-in models are";
    for (const std::string& n : builtin_names()) msg += " " + n;
    throw ModelError(msg);
}

/// Residual of the fiber-profile equation phi * phi' - phi'' for the
/// closed-form profile phi(x) = c1 (1 + e^{c1 x}) / (1 - e^{c1 x}); vanishes
/// identically, so the returned value measures only rounding.
[[nodiscard]] inline double profile_ode_residual(double c1, double x) {
    const double E = std::exp(c1 * x);
    if (std::abs(1.0 - E) < 1e-12) {
        char buf[96];
        std::snprintf(buf, sizeof buf,
                      "profile pole: |1 - exp(c1 x)| = %.3e at x = %.17g",
                      std::abs(1.0 - E), x);
        throw ModelError(buf);
    }
    const double om = 1.0 - E;
    const double phi = c1 * (1.0 + E) / om;
    const double dphi = 2.0 * c1 * c1 * E / (om * om);
    const double ddphi = 2.0 * c1 * c1 * c1 * E * (1.0 + E) / (om * om * om);
    return phi * dphi - ddphi;
}

/// Order-3 jet of ln beta(x, y) for the warped model (additive constant 0):
/// ln beta = c1 x - 2 ln|1 - e^{c1 x}| + b1 y - 2 ln|1 - e^{b1 y}|.
[[nodiscard]] inline Jet<3> warped_log_beta(double c1, double b1, const Point& p) {
    auto half = [](double k, double v, int axis) {
        const Jet<3> t = Jet<3>::variable(v, axis) * k;
        Jet<3> om = 1.0 - exp(t);  // 1 - e^{k t}
        if (std::abs(om.value()) < 1e-12) {
            char buf[96];
            std::snprintf(buf, sizeof buf,
                          "profile pole: |1 - exp(k v)| = %.3e at v = %.17g",
                          std::abs(om.value()), v);
            throw ModelError(buf);
        }
        if (om.value() < 0.0) om = -om;  // ln|1 - e^{k v}|
        return t - 2.0 * log(om);
    };
    return half(c1, p.x, 0) + half(b1, p.y, 1);
}

}  // namespace bisub
