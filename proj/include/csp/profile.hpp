#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "fft.hpp"
#include "numerics.hpp"

namespace csp {

/// Uniform grid x_i = x0 + i*dx, i < n. Treated as one period when spectral tools are used.
struct Grid {
    double x0 = 0.0;
    double dx = 1.0;
    std::size_t n = 0;

    double x(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }
    double last() const { return x(n - 1); }

    /// n points spanning [xmin, xmax) with spacing (xmax - xmin)/n.
    static Grid spanning(double xmin, double xmax, std::size_t n) {
        return {xmin, (xmax - xmin) / static_cast<double>(n), n};
    }
};

enum class DerivativeMethod { automatic, finite_difference, spectral };

struct ComplexProfile {
    double x0 = 0.0;
    double dx = 1.0;
    std::size_t n = 0;
    std::vector<cd> u;
    double tail_bound = 0.0;
    std::string derivative_info; ///< empty for primary data, else "spectral" or "fd4" plus order

    Grid grid() const { return {x0, dx, n}; }
    double x(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }

    double max_abs() const {
        double m = 0.0;
        for (auto v : u) m = std::max(m, std::abs(v));
        return m;
    }
};

/// A * exp(-(x-xc)^2/w^2) * exp(i phi (x-xc)); with derivative set, w d/dx of that.
struct GaussianSpec {
    double A = 1.0;
    double w = 1.0;
    double xc = 0.0;
    double phi = 0.0;
    bool derivative = false;
};

/// A * sech(x - xc) * exp(i phi x)
struct SechSpec {
    double A = 1.0;
    double phi = 0.0;
    double xc = 0.0;
};

struct RawSamples {
    std::vector<cd> values;
};

using ProfileSpec = std::variant<GaussianSpec, SechSpec, RawSamples>;

inline cd evaluate(const GaussianSpec& g, double x) {
    const double s = (x - g.xc) / g.w;
    const cd carrier = std::polar(1.0, g.phi * (x - g.xc));
    const double env = g.A * std::exp(-s * s);
    if (!g.derivative) return env * carrier;
    return env * cd(-2.0 * s, g.phi * g.w) * carrier;
}

inline cd evaluate(const SechSpec& s, double x) {
    return s.A / std::cosh(x - s.xc) * std::polar(1.0, s.phi * x);
}

namespace detail {

inline void validate_grid(const Grid& g) {
    if (g.n < 8) throw Error(ErrorKind::GridTooSmall, "need at least 8 samples, got " + std::to_string(g.n));
    if (!(g.dx > 0.0) || !std::isfinite(g.dx) || !std::isfinite(g.x0))
        throw Error(ErrorKind::InvalidData, "grid spacing must be finite and positive");
}

inline void validate_samples(std::span<const cd> u) {
    for (auto v : u)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error(ErrorKind::InvalidData, "non-finite sample");
}

template <class Spec>
double analytic_tail(const Spec& spec, const Grid& g, double scale) {
    double sup = 0.0;
    const int samples = 4000;
    for (int j = 0; j <= samples; ++j) {
        const double s = 40.0 * scale * j / samples;
        sup = std::max({sup, std::abs(evaluate(spec, g.x0 - s)), std::abs(evaluate(spec, g.last() + s))});
    }
    return sup;
}

} // namespace detail

inline ComplexProfile build_profile(const ProfileSpec& spec, const Grid& grid) {
    if (auto raw = std::get_if<RawSamples>(&spec)) {
        if (raw->values.size() < 8)
            throw Error(ErrorKind::GridTooSmall, "need at least 8 samples, got " + std::to_string(raw->values.size()));
        Grid g = grid;
        g.n = raw->values.size();
        detail::validate_grid(g);
        detail::validate_samples(raw->values);
        ComplexProfile p{g.x0, g.dx, g.n, raw->values, 0.0, {}};
        p.tail_bound = std::max(std::abs(p.u.front()), std::abs(p.u.back()));
        return p;
    }
    detail::validate_grid(grid);
    ComplexProfile p{grid.x0, grid.dx, grid.n, std::vector<cd>(grid.n), 0.0, {}};
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (!std::is_same_v<S, RawSamples>) {
                for (std::size_t i = 0; i < grid.n; ++i) p.u[i] = evaluate(s, grid.x(i));
                double scale = 1.0;
                if constexpr (std::is_same_v<S, GaussianSpec>) scale = s.w;
                p.tail_bound = detail::analytic_tail(s, grid, scale);
            }
        },
        spec);
    detail::validate_samples(p.u);
    return p;
}

/// Profile from samples on a grid; tail bound from the end samples.
inline ComplexProfile make_profile(const Grid& grid, std::vector<cd> u) {
    return build_profile(RawSamples{std::move(u)}, grid);
}

/// True when the samples vanish at both ends to relative level tol.
inline bool negligible_ends(const ComplexProfile& p, double tol = 1e-8) {
    const double m = p.max_abs();
    if (m == 0.0) return true;
    return std::max(std::abs(p.u.front()), std::abs(p.u.back())) <= tol * m;
}

namespace detail {

inline std::vector<cd> spectral_derivative(std::span<const cd> u, double dx, int order) {
    const std::size_t n = u.size();
    auto U = fft(u);
    auto q = wavenumbers(n, dx);
    for (std::size_t j = 0; j < n; ++j) {
        if (order == 1) {
            U[j] *= (n % 2 == 0 && j == n / 2) ? cd{} : cd(0.0, q[j]);
        } else {
            U[j] *= -q[j] * q[j];
        }
    }
    return ifft(U);
}

inline std::vector<cd> fd4_derivative(std::span<const cd> u, double h, int order) {
    const std::size_t n = u.size();
    std::vector<cd> d(n);
    if (order == 1) {
        const double s = 1.0 / (12.0 * h);
        for (std::size_t i = 2; i + 2 < n; ++i) d[i] = s * (-u[i + 2] + 8.0 * u[i + 1] - 8.0 * u[i - 1] + u[i - 2]);
        d[0] = s * (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]);
        d[1] = s * (-3.0 * u[0] - 10.0 * u[1] + 18.0 * u[2] - 6.0 * u[3] + u[4]);
        const std::size_t a = n - 1, b = n - 2;
        d[a] = -s * (-25.0 * u[a] + 48.0 * u[a - 1] - 36.0 * u[a - 2] + 16.0 * u[a - 3] - 3.0 * u[a - 4]);
        d[b] = -s * (-3.0 * u[a] - 10.0 * u[a - 1] + 18.0 * u[a - 2] - 6.0 * u[a - 3] + u[a - 4]);
    } else {
        const double s = 1.0 / (12.0 * h * h);
        for (std::size_t i = 2; i + 2 < n; ++i)
            d[i] = s * (-u[i + 2] + 16.0 * u[i + 1] - 30.0 * u[i] + 16.0 * u[i - 1] - u[i - 2]);
        d[0] = s * (35.0 * u[0] - 104.0 * u[1] + 114.0 * u[2] - 56.0 * u[3] + 11.0 * u[4]);
        d[1] = s * (11.0 * u[0] - 20.0 * u[1] + 6.0 * u[2] + 4.0 * u[3] - u[4]);
        const std::size_t a = n - 1, b = n - 2;
        d[a] = s * (35.0 * u[a] - 104.0 * u[a - 1] + 114.0 * u[a - 2] - 56.0 * u[a - 3] + 11.0 * u[a - 4]);
        d[b] = s * (11.0 * u[a] - 20.0 * u[a - 1] + 6.0 * u[a - 2] + 4.0 * u[a - 3] - u[a - 4]);
    }
    return d;
}

} // namespace detail

inline DerivativeMethod resolve(DerivativeMethod m, const ComplexProfile& p) {
    if (m != DerivativeMethod::automatic) return m;
    return negligible_ends(p) ? DerivativeMethod::spectral : DerivativeMethod::finite_difference;
}

inline ComplexProfile differentiate(const ComplexProfile& p, int order,
                                    DerivativeMethod method = DerivativeMethod::automatic) {
    if (order != 1 && order != 2) throw Error(ErrorKind::InvalidData, "derivative order must be 1 or 2");
    detail::validate_grid(p.grid());
    const auto used = resolve(method, p);
    ComplexProfile out{p.x0, p.dx, p.n, {}, 0.0, {}};
    if (used == DerivativeMethod::spectral) {
        out.u = detail::spectral_derivative(p.u, p.dx, order);
        out.derivative_info = "spectral order " + std::to_string(order);
        if (std::all_of(p.u.begin(), p.u.end(), [](cd v) { return v.imag() == 0.0; }))
            for (auto& v : out.u) v = v.real();
    } else {
        out.u = detail::fd4_derivative(p.u, p.dx, order);
        out.derivative_info = "fd4 order " + std::to_string(order);
    }
    out.tail_bound = std::max(std::abs(out.u.front()), std::abs(out.u.back()));
    return out;
}

struct GeometryFields {
    std::vector<double> m;
    std::vector<double> sqrt_m;
    std::vector<double> cplus;
    std::vector<double> y_of_x;
    double c = 0.0;
    cd d{};
};

/// Integrand of d as a real function: d = i * int of this.
inline double phase_density(cd ux, cd uxx) {
    const double m = 1.0 + std::norm(ux), s = std::sqrt(m);
    return 2.0 * std::imag(std::conj(ux) * uxx) / (4.0 * s * (s + 1.0));
}

inline void check_decay(const ComplexProfile& p, double rel = 1e-8) {
    const double m = p.max_abs();
    if (p.tail_bound > rel * m && p.tail_bound > 0.0)
        throw Error(ErrorKind::DecayViolation,
                    "tail bound " + std::to_string(p.tail_bound) + " exceeds 1e-8 of max |u|", p.tail_bound / m);
}

inline GeometryFields geometry(const ComplexProfile& p, DerivativeMethod method = DerivativeMethod::automatic,
                               bool enforce_decay = true) {
    if (enforce_decay) check_decay(p);
    const auto ux = differentiate(p, 1, method).u;
    const auto uxx = differentiate(p, 2, method).u;
    const std::size_t n = p.n;
    GeometryFields g;
    g.m.resize(n);
    g.sqrt_m.resize(n);
    std::vector<double> excess(n), dens(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.m[i] = 1.0 + std::norm(ux[i]);
        g.sqrt_m[i] = std::sqrt(g.m[i]);
        excess[i] = g.sqrt_m[i] - 1.0;
        dens[i] = phase_density(ux[i], uxx[i]);
    }
    g.c = simpson(excess, p.dx);
    g.d = cd(0.0, simpson(dens, p.dx));
    const auto run = cumulative_integral(excess, p.dx);
    g.cplus.resize(n);
    g.y_of_x.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.cplus[i] = run.back() - run[i];
        g.y_of_x[i] = p.x(i) - g.cplus[i];
    }
    return g;
}

/// Field sampled on a uniform (x, t) lattice; values[j * nx + i] is u(x_i, t_j).
struct Lattice {
    double x0 = 0.0, dx = 1.0;
    double t0 = 0.0, dt = 1.0;
    std::size_t nx = 0, nt = 0;
    std::vector<cd> values;

    cd at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
};

/// max over interior points of |u_xt + u + (|u|^2 u_x)_x / 2|, second-order differences.
inline double pde_residual(const Lattice& L) {
    if (L.nx < 5 || L.nt < 5) throw Error(ErrorKind::GridTooSmall, "lattice needs >= 5 points per direction");
    if (L.values.size() != L.nx * L.nt) throw Error(ErrorKind::InvalidData, "lattice size mismatch");
    double worst = 0.0;
    for (std::size_t j = 1; j + 1 < L.nt; ++j) {
        for (std::size_t i = 1; i + 1 < L.nx; ++i) {
            const cd uxt = (L.at(i + 1, j + 1) - L.at(i - 1, j + 1) - L.at(i + 1, j - 1) + L.at(i - 1, j - 1)) /
                           (4.0 * L.dx * L.dt);
            const cd u = L.at(i, j), ur = L.at(i + 1, j), ul = L.at(i - 1, j);
            const cd fr = 0.5 * (std::norm(u) + std::norm(ur)) * (ur - u) / L.dx;
            const cd fl = 0.5 * (std::norm(ul) + std::norm(u)) * (u - ul) / L.dx;
            const cd res = uxt + u + 0.5 * (fr - fl) / L.dx;
            worst = std::max(worst, std::abs(res));
        }
    }
    return worst;
}

} // namespace csp
