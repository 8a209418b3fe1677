// SPDX-License-Identifier: MIT
//
// Truncated multivariate Taylor arithmetic (forward-mode jets) in three
// variables, up to total degree 4. A Jet<N> stores the Taylor coefficients
// c_a = D^a f / a! of a scalar function at a point, indexed by multi-indices
// a = (i,j,k) with i+j+k <= N in graded order, so that truncation to a lower
// order is a prefix copy and multiplication is truncated convolution.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace bisub {

inline constexpr int kMaxJetOrder = 4;

namespace jet_detail {

/// Number of trivariate multi-indices of total degree <= n.
constexpr int coeff_count(int n) { return (n + 1) * (n + 2) * (n + 3) / 6; }

struct MultiIndex {
    std::int8_t i = 0, j = 0, k = 0;
    constexpr int degree() const { return i + j + k; }
};

/// Graded enumeration shared by every order: all indices of degree 0, then
/// degree 1, ... Each order-N table is a prefix of the order-(N+1) table.
template <int N>
constexpr std::array<MultiIndex, coeff_count(N)> make_index_table() {
    std::array<MultiIndex, coeff_count(N)> table{};
    int pos = 0;
    for (int d = 0; d <= N; ++d)
        for (int i = d; i >= 0; --i)
            for (int j = d - i; j >= 0; --j)
                table[pos++] = MultiIndex{static_cast<std::int8_t>(i),
                                          static_cast<std::int8_t>(j),
                                          static_cast<std::int8_t>(d - i - j)};
    return table;
}

/// Inverse lookup (i,j,k) -> position; -1 for degree > N.
template <int N>
constexpr auto make_position_table() {
    std::array<std::array<std::array<std::int16_t, N + 1>, N + 1>, N + 1> pos{};
    for (auto& plane : pos)
        for (auto& row : plane)
            for (auto& cell : row) cell = -1;
    constexpr auto idx = make_index_table<N>();
    for (int p = 0; p < static_cast<int>(idx.size()); ++p)
        pos[idx[p].i][idx[p].j][idx[p].k] = static_cast<std::int16_t>(p);
    return pos;
}

constexpr double factorial(int n) {
    double f = 1.0;
    for (int m = 2; m <= n; ++m) f *= m;
    return f;
}

}  // namespace jet_detail

template <int N>
class Jet {
    static_assert(N >= 0 && N <= kMaxJetOrder, "jet order out of range");

public:
    static constexpr int order = N;
    static constexpr int size = jet_detail::coeff_count(N);
    static constexpr auto index_table = jet_detail::make_index_table<N>();
    static constexpr auto position_table = jet_detail::make_position_table<N>();

    constexpr Jet() = default;

    [[nodiscard]] static constexpr Jet constant(double v) {
        Jet r;
        r.c_[0] = v;
        return r;
    }

    /// Seed for the coordinate with the given axis (0=x, 1=y, 2=z).
    [[nodiscard]] static constexpr Jet variable(double v, int axis) {
        Jet r;
        r.c_[0] = v;
        if constexpr (N >= 1) r.c_[1 + axis] = 1.0;
        return r;
    }

    [[nodiscard]] constexpr double value() const { return c_[0]; }

    /// Mixed partial derivative D^(i,j,k) f (coefficient times i! j! k!).
    [[nodiscard]] double partial(int i, int j, int k) const {
        const int p = position(i, j, k);
        return c_[p] * jet_detail::factorial(i) * jet_detail::factorial(j) *
               jet_detail::factorial(k);
    }

    [[nodiscard]] constexpr double coeff(int p) const { return c_[p]; }
    constexpr double& coeff(int p) { return c_[p]; }

    [[nodiscard]] static int position(int i, int j, int k) {
        if (i < 0 || j < 0 || k < 0 || i + j + k > N)
            throw std::out_of_range("jet: multi-index degree exceeds order");
        return position_table[i][j][k];
    }

    [[nodiscard]] bool finite() const {
        for (double v : c_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    // ---- arithmetic -----------------------------------------------------

    constexpr Jet& operator+=(const Jet& o) {
        for (int p = 0; p < size; ++p) c_[p] += o.c_[p];
        return *this;
    }
    constexpr Jet& operator-=(const Jet& o) {
        for (int p = 0; p < size; ++p) c_[p] -= o.c_[p];
        return *this;
    }
    constexpr Jet& operator*=(double s) {
        for (double& v : c_) v *= s;
        return *this;
    }

    friend constexpr Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend constexpr Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend constexpr Jet operator+(Jet a, double s) {
        a.c_[0] += s;
        return a;
    }
    friend constexpr Jet operator+(double s, Jet a) {
        a.c_[0] += s;
        return a;
    }
    friend constexpr Jet operator-(Jet a, double s) {
        a.c_[0] -= s;
        return a;
    }
    friend constexpr Jet operator-(double s, const Jet& a) {
        Jet r = -a;
        r.c_[0] += s;
        return r;
    }
    friend constexpr Jet operator-(const Jet& a) {
        Jet r;
        for (int p = 0; p < size; ++p) r.c_[p] = -a.c_[p];
        return r;
    }
    friend constexpr Jet operator*(Jet a, double s) { return a *= s; }
    friend constexpr Jet operator*(double s, Jet a) { return a *= s; }
    friend constexpr Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

    /// Truncated convolution: exact product of the two Taylor polynomials,
    /// coefficients above degree N discarded.
    friend constexpr Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (int pa = 0; pa < size; ++pa) {
            if (a.c_[pa] == 0.0) continue;
            const auto& ia = index_table[pa];
            const int room = N - ia.degree();
            for (int pb = 0; pb < jet_detail::coeff_count(room); ++pb) {
                const auto& ib = index_table[pb];
                r.c_[position_table[ia.i + ib.i][ia.j + ib.j][ia.k + ib.k]] +=
                    a.c_[pa] * b.c_[pb];
            }
        }
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
    friend Jet operator/(double s, const Jet& b) { return reciprocal(b) * s; }

private:
    std::array<double, size> c_{};
};

/// Truncation to a lower order is a prefix copy thanks to graded indexing.
template <int M, int N>
[[nodiscard]] constexpr Jet<M> truncate(const Jet<N>& a) {
    static_assert(M <= N, "cannot truncate to a higher order");
    Jet<M> r;
    for (int p = 0; p < Jet<M>::size; ++p) r.coeff(p) = a.coeff(p);
    return r;
}

/// Partial derivative along one coordinate axis; loses one order.
template <int N>
[[nodiscard]] Jet<N - 1> derivative(const Jet<N>& a, int axis) {
    static_assert(N >= 1, "cannot differentiate an order-0 jet");
    Jet<N - 1> r;
    for (int p = 0; p < Jet<N - 1>::size; ++p) {
        auto b = Jet<N - 1>::index_table[p];
        int i = b.i, j = b.j, k = b.k;
        (axis == 0 ? i : axis == 1 ? j : k) += 1;
        const int factor = (axis == 0 ? i : axis == 1 ? j : k);
        r.coeff(p) = a.coeff(Jet<N>::position_table[i][j][k]) * factor;
    }
    return r;
}

namespace jet_detail {

/// Composition with a univariate outer function given by its derivatives
/// d[m] = h^(m)(u0): Horner evaluation of sum d[m]/m! (u - u0)^m.
template <int N>
[[nodiscard]] Jet<N> compose(const Jet<N>& u,
                             const std::array<double, N + 1>& d) {
    Jet<N> w = u;
    w.coeff(0) = 0.0;
    Jet<N> r = Jet<N>::constant(d[N] / factorial(N));
    for (int m = N - 1; m >= 0; --m) r = r * w + d[m] / factorial(m);
    return r;
}

}  // namespace jet_detail

template <int N>
[[nodiscard]] Jet<N> reciprocal(const Jet<N>& u) {
    const double u0 = u.value();
    if (u0 == 0.0) throw std::domain_error("division by zero");
    std::array<double, N + 1> d{};
    double p = 1.0 / u0;  // (-1)^m m! / u0^(m+1)
    for (int m = 0; m <= N; ++m) {
        d[m] = p;
        p *= -(m + 1) / u0;
    }
    return jet_detail::compose(u, d);
}

template <int N>
[[nodiscard]] Jet<N> exp(const Jet<N>& u) {
    std::array<double, N + 1> d{};
    d.fill(std::exp(u.value()));
    return jet_detail::compose(u, d);
}

template <int N>
[[nodiscard]] Jet<N> log(const Jet<N>& u) {
    const double u0 = u.value();
    if (u0 <= 0.0) throw std::domain_error("log of a non-positive value");
    std::array<double, N + 1> d{};
    d[0] = std::log(u0);
    double p = 1.0 / u0;  // (-1)^(m-1) (m-1)! / u0^m
    for (int m = 1; m <= N; ++m) {
        d[m] = p;
        p *= -m / u0;
    }
    return jet_detail::compose(u, d);
}

template <int N>
[[nodiscard]] Jet<N> sqrt(const Jet<N>& u) {
    const double u0 = u.value();
    if (u0 < 0.0) throw std::domain_error("sqrt of a negative value");
    if (u0 == 0.0 && N >= 1)
        throw std::domain_error("sqrt at zero has no finite derivatives");
    std::array<double, N + 1> d{};
    d[0] = std::sqrt(u0);
    double p = d[0];  // h^(m) = (1/2)(1/2-1)...(1/2-m+1) u0^(1/2-m)
    for (int m = 1; m <= N; ++m) {
        p *= (0.5 - (m - 1)) / u0;
        d[m] = p;
    }
    return jet_detail::compose(u, d);
}

template <int N>
[[nodiscard]] Jet<N> sin(const Jet<N>& u) {
    const double s = std::sin(u.value()), c = std::cos(u.value());
    std::array<double, N + 1> d{};
    constexpr double sign[4] = {1.0, 1.0, -1.0, -1.0};
    for (int m = 0; m <= N; ++m) d[m] = sign[m % 4] * (m % 2 ? c : s);
    return jet_detail::compose(u, d);
}

template <int N>
[[nodiscard]] Jet<N> cos(const Jet<N>& u) {
    const double s = std::sin(u.value()), c = std::cos(u.value());
    std::array<double, N + 1> d{};
    constexpr double sign[4] = {1.0, -1.0, -1.0, 1.0};
    for (int m = 0; m <= N; ++m) d[m] = sign[m % 4] * (m % 2 ? s : c);
    return jet_detail::compose(u, d);
}

/// Integer power by repeated multiplication (valid at zero for n >= 0).
template <int N>
[[nodiscard]] Jet<N> pow(const Jet<N>& u, int n) {
    if (n < 0) return reciprocal(pow(u, -n));
    Jet<N> r = Jet<N>::constant(1.0);
    Jet<N> base = u;
    for (unsigned e = static_cast<unsigned>(n); e != 0; e >>= 1) {
        if (e & 1u) r = r * base;
        if (e > 1u) base = base * base;
    }
    return r;
}

}  // namespace bisub
