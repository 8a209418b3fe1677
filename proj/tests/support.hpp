// SPDX-License-Identifier: MIT
//
// Shared helpers for the test suite: finite-difference oracles and small
// numeric utilities. Central differences are an implementation-independent
// cross-check for jet-computed derivatives.

#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "bisub/types.hpp"

namespace testsupport {

inline constexpr double kFdStep = 1e-5;

/// Central first difference along a coordinate axis.
inline double fd_first(const std::function<double(const bisub::Point&)>& f,
                       bisub::Point p, int axis, double h = kFdStep) {
    bisub::Point hi = p, lo = p;
    hi[axis] += h;
    lo[axis] -= h;
    return (f(hi) - f(lo)) / (2.0 * h);
}

/// Central second difference along a coordinate axis.
inline double fd_second(const std::function<double(const bisub::Point&)>& f,
                        bisub::Point p, int axis, double h = kFdStep) {
    bisub::Point hi = p, lo = p;
    hi[axis] += h;
    lo[axis] -= h;
    return (f(hi) - 2.0 * f(p) + f(lo)) / (h * h);
}

/// Central mixed difference along two distinct axes.
inline double fd_mixed(const std::function<double(const bisub::Point&)>& f,
                       bisub::Point p, int a1, int a2, double h = kFdStep) {
    auto shifted = [&](double s1, double s2) {
        bisub::Point q = p;
        q[a1] += s1;
        q[a2] += s2;
        return f(q);
    };
    return (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) /
           (4.0 * h * h);
}

/// |a-b| relative to max(1, |a|, |b|): a relative error with an absolute
/// floor so that exact zeros compare cleanly.
inline double rel_dev(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline bisub::Point random_point(std::mt19937& rng, const bisub::Grid& g) {
    auto pick = [&](int axis) {
        std::uniform_real_distribution<double> d(g.lo[axis], g.hi[axis]);
        return d(rng);
    };
    return bisub::Point{pick(0), pick(1), pick(2)};
}

}  // namespace testsupport
