// SPDX-License-Identifier: MIT
//
// Small shared value types: chart points, parameter bindings, per-axis
// domains and sampling grids.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bisub {

struct Point {
    double x = 0.0, y = 0.0, z = 0.0;

    [[nodiscard]] double operator[](int axis) const {
        return axis == 0 ? x : axis == 1 ? y : z;
    }
    double& operator[](int axis) { return axis == 0 ? x : axis == 1 ? y : z; }

    friend bool operator==(const Point&, const Point&) = default;
};

/// Late-bound real parameters referenced by name from expressions.
using Params = std::map<std::string, double>;

/// Open per-axis chart domain; an unbounded axis uses infinities.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    [[nodiscard]] bool contains(double v) const { return v > lo && v < hi; }
    [[nodiscard]] bool bounded() const { return std::isfinite(lo) && std::isfinite(hi); }
};

struct Domain {
    std::array<Interval, 3> axis{};

    [[nodiscard]] bool contains(const Point& p) const {
        return axis[0].contains(p.x) && axis[1].contains(p.y) &&
               axis[2].contains(p.z);
    }
    [[nodiscard]] std::string describe() const;
};

inline std::string Domain::describe() const {
    auto one = [](const Interval& iv) {
        auto num = [](double v) {
            if (std::isinf(v)) return std::string(v > 0 ? "inf" : "-inf");
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", v);
            return std::string(buf);
        };
        return "(" + num(iv.lo) + ", " + num(iv.hi) + ")";
    };
    return one(axis[0]) + " x " + one(axis[1]) + " x " + one(axis[2]);
}

/// Uniform sampling grid over a closed box, with an optional exclusion
/// predicate for points that must be skipped (singular margins).
struct Grid {
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};
    std::array<int, 3> count{9, 9, 9};
    std::function<bool(const Point&)> exclude;  // true -> skip the point

    [[nodiscard]] std::vector<Point> points() const {
        for (int a = 0; a < 3; ++a) {
            if (count[a] < 1) throw std::invalid_argument("grid count must be >= 1");
            if (hi[a] < lo[a]) throw std::invalid_argument("grid range is empty");
        }
        std::vector<Point> out;
        out.reserve(static_cast<std::size_t>(count[0]) * count[1] * count[2]);
        auto coord = [&](int a, int i) {
            return count[a] == 1 ? lo[a]
                                 : lo[a] + (hi[a] - lo[a]) * i / (count[a] - 1);
        };
        for (int i = 0; i < count[0]; ++i)
            for (int j = 0; j < count[1]; ++j)
                for (int k = 0; k < count[2]; ++k) {
                    Point p{coord(0, i), coord(1, j), coord(2, k)};
                    if (!exclude || !exclude(p)) out.push_back(p);
                }
        if (out.empty()) throw std::invalid_argument("grid has no usable points");
        return out;
    }
};

}  // namespace bisub
