#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "numerics.hpp"
#include "profile.hpp"
#include "scatter.hpp"

namespace csp {

struct SpectralPoint {
    cd k;
    cd C;
};

struct DiscreteSpectrum {
    std::vector<SpectralPoint> points;
    cd d{};

    void validate() const {
        if (points.empty()) throw Error(ErrorKind::InvalidSpectrum, "spectrum is empty");
        if (d.real() != 0.0) throw Error(ErrorKind::InvalidSpectrum, "d must be purely imaginary");
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!(points[i].k.imag() > 0.0))
                throw Error(ErrorKind::InvalidSpectrum, "k_" + std::to_string(i) + " not in the upper half plane");
            if (points[i].C == cd(0.0))
                throw Error(ErrorKind::InvalidSpectrum, "C_" + std::to_string(i) + " is zero");
            for (std::size_t j = 0; j < i; ++j)
                if (points[i].k == points[j].k) throw Error(ErrorKind::InvalidSpectrum, "repeated k");
        }
    }
};

struct SolitonPoint {
    double y = 0.0;
    double t = 0.0;
    cd u{};
    double x = 0.0;
    double dxdy = 1.0;
};

enum class SolitonClass { smooth, cuspon, loop };

constexpr std::string_view to_string(SolitonClass c) noexcept {
    switch (c) {
    case SolitonClass::smooth: return "smooth";
    case SolitonClass::cuspon: return "cuspon";
    case SolitonClass::loop: return "loop";
    }
    return "unknown";
}

/// Norming constant of the closed-form one-soliton with phase c and shift y0.
inline cd one_soliton_constant(cd k1, double c_phase, double y0) {
    return 2.0 * k1.imag() * std::exp(cd(-2.0 * y0, 2.0 * c_phase));
}

/// Inverse of one_soliton_constant: (c_phase, y0) from C1.
inline std::pair<double, double> one_soliton_parameters(cd k1, cd C1) {
    return {0.5 * std::arg(C1), -0.5 * std::log(std::abs(C1) / (2.0 * k1.imag()))};
}

inline SolitonPoint one_soliton(cd k1, double c_phase, double y0, cd d, double y, double t) {
    const double a = k1.real(), b = k1.imag();
    if (!(b > 0.0)) throw Error(ErrorKind::InvalidSpectrum, "Im k1 must be positive");
    const double K = a * a + b * b, theta = std::atan2(b, a);
    const double psi1 = a * y + a * t / (4.0 * K);
    const double psi2 = b * y - b * t / (4.0 * K);
    const double z = 2.0 * psi2 + 2.0 * y0;
    const double sech = 1.0 / std::cosh(z), th = std::tanh(z);
    SolitonPoint s;
    s.y = y;
    s.t = t;
    s.u = (b / K) * std::exp(2.0 * d + cd(0.0, 2.0 * c_phase - 2.0 * theta + 0.5 * pi + 2.0 * psi1)) * sech;
    s.x = y - (b / K) * (th - 1.0);
    s.dxdy = 1.0 - (2.0 * b * b / K) * sech * sech;
    return s;
}

inline SolitonClass classify(cd k1) {
    const double a = std::abs(k1.real()), b = std::abs(k1.imag());
    if (std::abs(a - b) <= 1e-12) return SolitonClass::cuspon;
    return a > b ? SolitonClass::smooth : SolitonClass::loop;
}

struct NSolitonExpansion {
    Mat2 M0;
    Mat2 M1;
    double rcond = 1.0; ///< reciprocal condition estimate of the residue system
};

/// Residue system at (y, t) and the first two Taylor coefficients of M(k) at k = 0.
inline NSolitonExpansion nsoliton_eval(const DiscreteSpectrum& spec, double y, double t) {
    spec.validate();
    const std::size_t N = spec.points.size();
    std::vector<cd> k(N), c(N);
    for (std::size_t j = 0; j < N; ++j) {
        k[j] = spec.points[j].k;
        c[j] = spec.points[j].C * std::exp(2.0 * cd(0, 1) * k[j] * (y + t / (4.0 * k[j] * k[j])));
    }
    // unknowns: alpha_j = M11(k_j), betabar_j = conj(M21(k_j))
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(2 * N, 2 * N);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(2 * N);
    for (std::size_t i = 0; i < N; ++i) {
        rhs(i) = 1.0;
        for (std::size_t j = 0; j < N; ++j) {
            A(i, N + j) = -std::conj(c[j]) / (k[i] - std::conj(k[j]));
            A(N + i, j) = c[j] / (std::conj(k[i]) - k[j]);
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14))
        throw Error(ErrorKind::DegenerateConfiguration, "residue system is singular, rcond " + std::to_string(rcond),
                    rcond);
    const Eigen::VectorXcd sol = lu.solve(rhs);

    NSolitonExpansion out;
    out.rcond = rcond;
    out.M0 = Mat2::Identity();
    out.M1 = Mat2::Zero();
    for (std::size_t j = 0; j < N; ++j) {
        const cd alpha = sol(j), betabar = sol(N + j), beta = std::conj(betabar);
        const cd kb = std::conj(k[j]);
        // 1/(k - q) = -1/q - k/q^2 + ...
        const cd e11 = std::conj(c[j]) * betabar, e12 = c[j] * alpha;
        const cd e21 = -std::conj(c[j]) * std::conj(alpha), e22 = c[j] * beta;
        out.M0(0, 0) += -e11 / kb;
        out.M0(0, 1) += -e12 / k[j];
        out.M0(1, 0) += -e21 / kb;
        out.M0(1, 1) += -e22 / k[j];
        out.M1(0, 0) += -e11 / (kb * kb);
        out.M1(0, 1) += -e12 / (k[j] * k[j]);
        out.M1(1, 0) += -e21 / (kb * kb);
        out.M1(1, 1) += -e22 / (k[j] * k[j]);
    }
    return out;
}

struct Reconstruction {
    cd u{};
    double x_minus_y = 0.0;
};

inline Reconstruction reconstruct_u(const Mat2& M0, const Mat2& M1, cd d) {
    const cd det = M0.determinant();
    if (!(std::abs(det) > 1e-300) || !std::isfinite(std::abs(det)))
        throw Error(ErrorKind::DegenerateConfiguration, "M0 is singular");
    const Mat2 W = M0.inverse() * M1;
    return {std::exp(2.0 * d) * W(0, 1) / cd(0, 1), (W(0, 0) / cd(0, 1)).real()};
}

/// Point on the parametric curve (y, x(y), u(y)) at time t.
inline SolitonPoint soliton_point(const DiscreteSpectrum& spec, double y, double t) {
    if (spec.points.size() == 1) {
        const auto& p = spec.points.front();
        auto [cph, y0] = one_soliton_parameters(p.k, p.C);
        return one_soliton(p.k, cph, y0, spec.d, y, t);
    }
    auto e = nsoliton_eval(spec, y, t);
    auto r = reconstruct_u(e.M0, e.M1, spec.d);
    SolitonPoint s;
    s.y = y;
    s.t = t;
    s.u = r.u;
    s.x = y + r.x_minus_y;
    s.dxdy = std::nan("");
    return s;
}

/// Samples u(x, t) on a uniform x grid by inverting the parametric map x(y).
inline ComplexProfile soliton_field(const DiscreteSpectrum& spec, double t, const Grid& grid) {
    spec.validate();
    detail::validate_grid(grid);
    const double xl = grid.x0, xr = grid.last();
    double bound = 0.0;
    if (spec.points.size() == 1) {
        const cd k = spec.points.front().k;
        if (classify(k) != SolitonClass::smooth)
            throw Error(ErrorKind::NotSingleValued, std::string(to_string(classify(k))) + " soliton is not a graph over x");
        bound = 2.0 * k.imag() / std::norm(k) + 1.0;
    } else {
        // sample x(y) densely and require strict monotonicity
        double shift = 0.0;
        for (int pass = 0; pass < 2; ++pass) {
            const double ylo = xl - shift - 1.0, yhi = xr + shift + 1.0;
            const std::size_t m = std::max<std::size_t>(4 * grid.n, 2000);
            double prev = -INFINITY, worst = 0.0;
            for (std::size_t i = 0; i <= m; ++i) {
                const double y = ylo + (yhi - ylo) * static_cast<double>(i) / m;
                const auto s = soliton_point(spec, y, t);
                if (!(s.x > prev)) throw Error(ErrorKind::NotSingleValued, "x(y) is not strictly increasing");
                prev = s.x;
                worst = std::max(worst, std::abs(s.x - y));
            }
            shift = worst;
        }
        bound = shift + 1.0;
    }
    ComplexProfile p{grid.x0, grid.dx, grid.n, std::vector<cd>(grid.n), 0.0, {}};
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        double lo = x - bound, hi = x + bound;
        for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(x)); ++it) {
            const double mid = 0.5 * (lo + hi);
            (soliton_point(spec, mid, t).x < x ? lo : hi) = mid;
        }
        p.u[i] = soliton_point(spec, 0.5 * (lo + hi), t).u;
    }
    p.tail_bound = std::max(std::abs(p.u.front()), std::abs(p.u.back()));
    return p;
}

} // namespace csp
