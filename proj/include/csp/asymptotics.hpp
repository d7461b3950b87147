#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "numerics.hpp"
#include "scatter.hpp"

namespace csp {

/// nu(k) = -ln(1 + |r|^2) / (2 pi)
inline double nu(cd r) { return -std::log1p(std::norm(r)) / (2.0 * pi); }

/// Principal log Gamma for Re z > 0 or z off the non-positive real axis; continuous along rays in the right half plane.
inline cd log_gamma(cd z) {
    if (z.real() <= 0.0 && z.imag() == 0.0 && z.real() == std::floor(z.real()))
        throw Error(ErrorKind::PoleAtZero, "Gamma has a pole at a non-positive integer");
    cd shift{};
    while (std::abs(z) < 15.0 || z.real() < 8.0) {
        shift += std::log(z);
        z += 1.0;
    }
    static constexpr double B[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6,
                                   -3617.0 / 510};
    const cd zinv = 1.0 / z, z2 = zinv * zinv;
    cd series{}, pw = zinv;
    for (int m = 1; m <= 8; ++m) {
        series += B[m - 1] / (2.0 * m * (2.0 * m - 1.0)) * pw;
        pw *= z2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * pi) + series - shift;
}

struct GammaArg {
    double arg = 0.0;   ///< in (-pi, pi]
    long winding = 0;   ///< continuous branch = arg + 2 pi winding
    double branch() const { return arg + 2.0 * pi * static_cast<double>(winding); }
};

/// arg Gamma(i nu); use -gamma_arg(nu) for arg Gamma(-i nu).
inline GammaArg gamma_arg(double nu_value) {
    if (nu_value == 0.0) throw Error(ErrorKind::PoleAtZero, "arg Gamma(i nu) undefined at nu = 0");
    const double cont = log_gamma(cd(0.0, nu_value)).imag();
    double principal = std::remainder(cont, 2.0 * pi);
    if (principal <= -pi) principal += 2.0 * pi;
    return {principal, std::lround((cont - principal) / (2.0 * pi))};
}

/// L(s) = ln(1 + |r(s)|^2), its derivative and arg r(s), on a covered interval.
class ReflectionFunctional {
public:
    using Fn = std::function<double(double)>;

    ReflectionFunctional(Fn L, Fn dL, Fn arg_r, double lo, double hi, std::vector<double> knots = {})
        : L_(std::move(L)), dL_(std::move(dL)), arg_(std::move(arg_r)), lo_(lo), hi_(hi), knots_(std::move(knots)) {}

    /// PCHIP on |r|^2 (with r(0) = 0 adjoined) and on unwrapped arg r.
    static ReflectionFunctional from_table(const ScatteringTable& t) {
        if (t.entries.size() < 4) throw Error(ErrorKind::InsufficientTable, "need at least 4 table entries");
        std::vector<double> k, r2, ph;
        double prev = 0.0;
        for (std::size_t i = 0; i < t.entries.size(); ++i) {
            const auto& e = t.entries[i];
            double a = std::arg(e.r);
            if (i > 0) a = prev + std::remainder(a - prev, 2.0 * pi);
            prev = a;
            ph.push_back(a);
        }
        std::vector<double> kk;
        for (const auto& e : t.entries) kk.push_back(e.k);
        for (std::size_t i = 0; i < t.entries.size(); ++i) {
            if (i > 0 && t.entries[i - 1].k < 0.0 && t.entries[i].k > 0.0) {
                k.push_back(0.0);
                r2.push_back(0.0);
            }
            k.push_back(t.entries[i].k);
            r2.push_back(std::norm(t.entries[i].r));
        }
        auto abs2 = std::make_shared<Pchip>(k, r2);
        auto arg = std::make_shared<Pchip>(kk, ph);
        return ReflectionFunctional(
            [abs2](double s) { return std::log1p(std::max(0.0, (*abs2)(s))); },
            [abs2](double s) { return abs2->derivative(s) / (1.0 + std::max(0.0, (*abs2)(s))); },
            [arg](double s) { return (*arg)(s); }, k.front(), k.back(), k);
    }

    double L(double s) const { return L_(s); }
    double dL(double s) const { return dL_(s); }
    double arg_r(double s) const { return arg_(s); }
    double abs_r(double s) const { return std::sqrt(std::expm1(L_(s))); }
    double nu(double k) const { return -L_(k) / (2.0 * pi); }
    double lo() const { return lo_; }
    double hi() const { return hi_; }

    void require(double k0) const {
        if (!(k0 > 0.0) || lo_ > -k0 || hi_ < k0)
            throw Error(ErrorKind::InsufficientTable,
                        "reflection data does not cover [-" + std::to_string(k0) + ", " + std::to_string(k0) + "]");
    }

    /// Breakpoints of the interpolant inside (a, b), plus a and b.
    std::vector<double> pieces(double a, double b, std::initializer_list<double> extra = {}) const {
        std::vector<double> cuts{a, b};
        for (double k : knots_)
            if (k > a && k < b) cuts.push_back(k);
        for (double k : extra)
            if (k > a && k < b) cuts.push_back(k);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        return cuts;
    }

    template <class F>
    auto integrate_pieces(F&& f, double a, double b, std::initializer_list<double> extra = {}) const {
        const auto cuts = pieces(a, b, extra);
        decltype(f(a)) acc{};
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) acc += integrate(f, cuts[i], cuts[i + 1], 1e-14);
        return acc;
    }

private:
    Fn L_, dL_, arg_;
    double lo_, hi_;
    std::vector<double> knots_;
};

/// delta(k) = exp[(1/2 pi i) int_{-k0}^{k0} L(s)/(s-k) ds]
inline cd delta_eval(const ReflectionFunctional& rf, double k0, cd k) {
    rf.require(k0);
    if (k.imag() == 0.0 && std::abs(k.real()) <= k0)
        throw Error(ErrorKind::OnCut, "k lies on [-k0, k0]");
    const cd I = rf.integrate_pieces([&](double s) { return cd(rf.L(s)) / (s - k); }, -k0, k0, {k.real()});
    return std::exp(I / cd(0.0, 2.0 * pi));
}

struct SmallKDelta {
    cd delta0{1.0};
    cd delta1{};
    double I0 = 0.0; ///< int L(s)/s ds
};

inline SmallKDelta delta_small_k(const ReflectionFunctional& rf, double k0) {
    rf.require(k0);
    const double I0 = rf.integrate_pieces([&](double s) { return s == 0.0 ? 0.0 : rf.L(s) / s; }, -k0, k0, {0.0});
    const double I1 =
        rf.integrate_pieces([&](double s) { return s == 0.0 ? 0.0 : rf.L(s) / (s * s); }, -k0, k0, {0.0});
    return {std::exp(cd(0.0, -I0 / (2.0 * pi))), cd(0.0, -I1 / (2.0 * pi)), I0};
}

struct PhaseIntegrals {
    double I_plus = 0.0;  ///< int ln(s + k0) dL
    double I_minus = 0.0; ///< int ln(k0 - s) dL
};

inline PhaseIntegrals phase_integrals(const ReflectionFunctional& rf, double k0) {
    rf.require(k0);
    const double eps = 1e-6 * 2.0 * k0;
    // int_0^eps ln(tau) (g0 + g1 tau) dtau
    auto patch = [eps](double g0, double g1) {
        const double le = std::log(eps);
        return g0 * (eps * le - eps) + g1 * (0.5 * eps * eps * le - 0.25 * eps * eps);
    };
    PhaseIntegrals out;
    {
        const double g0 = rf.dL(-k0), g1 = (rf.dL(-k0 + eps) - g0) / eps;
        out.I_plus = patch(g0, g1) +
                     rf.integrate_pieces([&](double s) { return std::log(s + k0) * rf.dL(s); }, -k0 + eps, k0);
    }
    {
        const double g0 = rf.dL(k0), g1 = (g0 - rf.dL(k0 - eps)) / eps;
        // tau = k0 - s, dL(s) ~ g0 - g1 tau
        out.I_minus = patch(g0, -g1) +
                      rf.integrate_pieces([&](double s) { return std::log(k0 - s) * rf.dL(s); }, -k0, k0 - eps);
    }
    return out;
}

struct AsymptoticInputs {
    double kappa0 = 0.0;
    double nu_plus = 0.0;
    double nu_minus = 0.0;
    cd delta0{1.0};
    cd delta1{};
    double I_plus = 0.0;
    double I_minus = 0.0;
    double I0 = 0.0;
    double arg_r_minus = 0.0;
    double arg_r_plus = 0.0;
    double gamma_arg_plus = 0.0;  ///< arg Gamma(-i nu(kappa0))
    double gamma_arg_minus = 0.0; ///< arg Gamma(i nu(-kappa0))
    cd d{};
};

inline AsymptoticInputs asymptotic_inputs(const ReflectionFunctional& rf, cd d, double kappa0) {
    rf.require(kappa0);
    AsymptoticInputs in;
    in.kappa0 = kappa0;
    in.nu_plus = rf.nu(kappa0);
    in.nu_minus = rf.nu(-kappa0);
    const auto sk = delta_small_k(rf, kappa0);
    in.delta0 = sk.delta0;
    in.delta1 = sk.delta1;
    in.I0 = sk.I0;
    const auto pi_ = phase_integrals(rf, kappa0);
    in.I_plus = pi_.I_plus;
    in.I_minus = pi_.I_minus;
    in.arg_r_minus = rf.arg_r(-kappa0);
    in.arg_r_plus = rf.arg_r(kappa0);
    in.gamma_arg_plus = in.nu_plus == 0.0 ? 0.0 : -gamma_arg(in.nu_plus).arg;
    in.gamma_arg_minus = in.nu_minus == 0.0 ? 0.0 : gamma_arg(in.nu_minus).arg;
    in.d = d;
    return in;
}

enum class PhaseConvention { as_printed, real_phase };

constexpr std::string_view to_string(PhaseConvention c) noexcept {
    return c == PhaseConvention::as_printed ? "as_printed" : "real_phase";
}

struct LeadingOrder {
    double kappa0 = 0.0;
    double A1 = 0.0;
    double A2 = 0.0;
    cd u{};            ///< prediction under the requested convention
    cd phi1{};         ///< phase of the first term as printed (may be complex)
    cd phi2{};         ///< phase of the second term as printed, with arg r(-kappa0)
    cd phi2_alt{};     ///< same with arg r(kappa0)
    cd u_phi2_alt{};   ///< prediction using phi2_alt
    double amplitude_correction1 = 1.0; ///< exp(-Im phi1), dropped by real_phase
    double amplitude_correction2 = 1.0; ///< exp(Im phi2), dropped by real_phase
    cd u_alt_form{};   ///< -i e^{2d} delta0^2 t^{-1/2}[A1 e^{i phi1'} - A2 e^{-i phi2'}] with the y-scale phases
    double cplus_estimate = 0.0; ///< i delta1
    AsymptoticInputs inputs;
};

inline LeadingOrder leading_order_u(const ReflectionFunctional& rf, cd d, double x, double t,
                                    PhaseConvention convention = PhaseConvention::real_phase) {
    if (!(x > 0.0)) throw Error(ErrorKind::WrongSector, "leading-order formula needs x > 0");
    if (!(t > 0.0)) throw Error(ErrorKind::InvalidData, "t must be positive");
    const double k0 = 0.5 * std::sqrt(t / x);
    const auto in = asymptotic_inputs(rf, d, k0);
    LeadingOrder out;
    out.inputs = in;
    out.kappa0 = k0;
    out.A1 = std::sqrt(-in.nu_minus / k0);
    out.A2 = std::sqrt(-in.nu_plus / k0);
    const cd I(0.0, 1.0);
    const double lt = std::log(k0 * k0 * k0 / t), l4 = std::log(4.0 * k0 * k0);

    const cd common1 = in.arg_r_minus + in.gamma_arg_minus + in.nu_minus * lt - in.nu_plus * l4 -
                       in.I_plus / pi - t / k0;
    const cd common2 = -in.gamma_arg_plus + in.nu_plus * lt - in.nu_minus * l4 + in.I_minus / pi - t / k0;
    out.phi1 = -I * pi / 4.0 + common1 - in.I0 / pi - 2.0 * I * d - 2.0 * k0 * in.delta1;
    out.phi2 = 3.0 * I * pi / 4.0 - in.arg_r_minus + common2 - in.I0 / pi + 2.0 * I * d + 2.0 * k0 * in.delta1;
    out.phi2_alt = out.phi2 + in.arg_r_minus - in.arg_r_plus;
    out.amplitude_correction1 = std::exp(-out.phi1.imag());
    out.amplitude_correction2 = std::exp(out.phi2.imag());

    const double st = std::sqrt(t);
    auto assemble = [&](cd p1, cd p2) {
        if (convention == PhaseConvention::real_phase) {
            p1 = p1.real();
            p2 = p2.real();
        }
        const cd e1 = out.A1 == 0.0 ? cd{} : out.A1 * std::exp(I * p1);
        const cd e2 = out.A2 == 0.0 ? cd{} : out.A2 * std::exp(-I * p2);
        return (e1 - e2) / st;
    };
    out.u = assemble(out.phi1, out.phi2);
    out.u_phi2_alt = assemble(out.phi1, out.phi2_alt);

    const cd y1 = I * pi / 4.0 + common1;
    const cd y2 = I * pi / 4.0 - in.arg_r_minus + common2;
    const cd e1 = out.A1 == 0.0 ? cd{} : out.A1 * std::exp(I * y1);
    const cd e2 = out.A2 == 0.0 ? cd{} : out.A2 * std::exp(-I * y2);
    out.u_alt_form = -I * std::exp(2.0 * d) * in.delta0 * in.delta0 * (e1 - e2) / st;
    out.cplus_estimate = (I * in.delta1).real();
    return out;
}

struct DecayVerdict {
    std::string verdict = "rapid decay";
    double xi = 0.0;
    double max_im_theta = 0.0; ///< largest probe value; negative confirms the one-sign structure
    std::size_t probes = 0;
};

/// Im theta(xi, k) = k2 [xi - 1/(4 (k1^2 + k2^2))]
inline double im_theta(double xi, cd k) {
    return k.imag() * (xi - 1.0 / (4.0 * std::norm(k)));
}

inline DecayVerdict decay_sector_bound(double x, double t) {
    if (!(t > 0.0)) throw Error(ErrorKind::InvalidData, "t must be positive");
    const double xi = x / t;
    if (!(xi < 0.0)) throw Error(ErrorKind::WrongSector, "decay sector needs x/t < 0");
    DecayVerdict v;
    v.xi = xi;
    v.max_im_theta = -INFINITY;
    for (int i = -40; i <= 40; ++i)
        for (int j = 1; j <= 40; ++j) {
            const cd k(0.1 * i, 0.05 * j * j * 0.1 + 0.01 * j);
            v.max_im_theta = std::max(v.max_im_theta, im_theta(xi, k));
            ++v.probes;
        }
    if (!(v.max_im_theta < 0.0)) v.verdict = "inconclusive";
    return v;
}

inline DecayVerdict decay_sector_bound(const ReflectionFunctional&, double x, double t) {
    return decay_sector_bound(x, t);
}

} // namespace csp
