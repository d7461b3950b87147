#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "error.hpp"

namespace csp {

inline constexpr double pi = 3.14159265358979323846;

/// Composite Simpson on uniform samples; a 3/8 panel closes an odd interval count.
template <class T>
T simpson(std::span<const T> f, double h) {
    const std::size_t n = f.size();
    if (n == 0) return T{};
    if (n == 1) return T{};
    if (n == 2) return 0.5 * h * (f[0] + f[1]);
    std::size_t m = n - 1; // intervals
    T acc{};
    std::size_t end = m;
    if (m % 2 == 1) {
        if (m < 3) return 0.5 * h * (f[0] + f[1]) + 0.5 * h * (f[1] + f[2]);
        end = m - 3;
        acc += 3.0 * h / 8.0 * (f[end] + 3.0 * f[end + 1] + 3.0 * f[end + 2] + f[end + 3]);
    }
    for (std::size_t i = 0; i + 2 <= end; i += 2)
        acc += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    return acc;
}

template <class T>
T simpson(const std::vector<T>& f, double h) {
    return simpson(std::span<const T>(f), h);
}

/// Running integral F[i] = int_{x_0}^{x_i} f with local cubic panels (4th order).
template <class T>
std::vector<T> cumulative_integral(std::span<const T> f, double h) {
    const std::size_t n = f.size();
    std::vector<T> F(n, T{});
    if (n < 2) return F;
    if (n < 4) {
        for (std::size_t i = 1; i < n; ++i) F[i] = F[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
        return F;
    }
    F[1] = h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    for (std::size_t i = 1; i + 2 < n; ++i)
        F[i + 1] = F[i] + h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
    const std::size_t j = n - 1;
    F[j] = F[j - 1] + h / 24.0 * (f[j - 3] - 5.0 * f[j - 2] + 19.0 * f[j - 1] + 9.0 * f[j]);
    return F;
}

template <class T>
std::vector<T> cumulative_integral(const std::vector<T>& f, double h) {
    return cumulative_integral(std::span<const T>(f), h);
}

namespace detail {

inline constexpr std::array<double, 8> kronrod_x{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_w{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_w{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
auto gk15(F&& f, double a, double b, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    auto fc = f(c);
    auto kron = fc * kronrod_w[7];
    auto gauss = fc * gauss_w[3];
    for (int j = 0; j < 7; ++j) {
        auto f1 = f(c - h * kronrod_x[j]);
        auto f2 = f(c + h * kronrod_x[j]);
        kron += (f1 + f2) * kronrod_w[j];
        if (j % 2 == 1) gauss += (f1 + f2) * gauss_w[j / 2];
    }
    err = std::abs(h * (kron - gauss));
    return h * kron;
}

template <class F>
auto adaptive(F&& f, double a, double b, double tol, int depth, decltype(f(a)) whole, double err)
    -> decltype(f(a)) {
    if (err <= tol || err <= 1e-15 * std::abs(whole) || depth <= 0 || std::abs(b - a) < 1e-15 * (1.0 + std::abs(a))) return whole;
    const double m = 0.5 * (a + b);
    double el = 0.0, er = 0.0;
    auto left = gk15(f, a, m, el);
    auto right = gk15(f, m, b, er);
    return adaptive(f, a, m, 0.5 * tol, depth - 1, left, el) +
           adaptive(f, m, b, 0.5 * tol, depth - 1, right, er);
}

} // namespace detail

/// Adaptive Gauss-Kronrod (7/15) quadrature of a real- or complex-valued f on [a, b].
template <class F>
auto integrate(F&& f, double a, double b, double tol = 1e-13, int max_depth = 40) {
    double err = 0.0;
    auto whole = detail::gk15(f, a, b, err);
    return detail::adaptive(f, a, b, tol, max_depth, whole, err);
}

/// Piecewise cubic Hermite interpolant with Fritsch-Carlson slopes (no overshoot).
class Pchip {
public:
    Pchip() = default;

    Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw Error(ErrorKind::InsufficientTable, "pchip needs >= 2 nodes");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1])) throw Error(ErrorKind::InvalidData, "pchip nodes not increasing");
        std::vector<double> h(n - 1), del(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            del[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        s_.assign(n, 0.0);
        if (n == 2) {
            s_[0] = s_[1] = del[0];
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (del[i - 1] * del[i] <= 0.0) {
                s_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1], w2 = h[i] + 2.0 * h[i - 1];
                s_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
            }
        }
        s_[0] = end_slope(h[0], h[1], del[0], del[1]);
        s_[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    }

    double lo() const { return x_.front(); }
    double hi() const { return x_.back(); }
    const std::vector<double>& nodes() const { return x_; }

    double operator()(double x) const {
        auto [i, t, hh] = locate(x);
        const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
        const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
        return h00 * y_[i] + h10 * hh * s_[i] + h01 * y_[i + 1] + h11 * hh * s_[i + 1];
    }

    double derivative(double x) const {
        auto [i, t, hh] = locate(x);
        const double d00 = 6 * t * t - 6 * t, d10 = 3 * t * t - 4 * t + 1;
        const double d01 = -6 * t * t + 6 * t, d11 = 3 * t * t - 2 * t;
        return (d00 * y_[i] + d01 * y_[i + 1]) / hh + d10 * s_[i] + d11 * s_[i + 1];
    }

private:
    static double end_slope(double h0, double h1, double d0, double d1) {
        double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3 * d0)) return 3 * d0;
        return s;
    }

    struct Loc {
        std::size_t i;
        double t, h;
    };

    Loc locate(double x) const {
        x = std::clamp(x, x_.front(), x_.back());
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        i = std::min(i, x_.size() - 2);
        const double h = x_[i + 1] - x_[i];
        return {i, (x - x_[i]) / h, h};
    }

    std::vector<double> x_, y_, s_;
};

/// Least-squares slope of y against x.
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

} // namespace csp
