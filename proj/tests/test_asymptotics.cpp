#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "csp/asymptotics.hpp"

using namespace csp;

namespace {

ReflectionFunctional synthetic(std::function<double(double)> L, std::function<double(double)> dL, double lo = -1,
                               double hi = 1) {
    return ReflectionFunctional(std::move(L), std::move(dL), [](double) { return 0.0; }, lo, hi);
}

ReflectionFunctional zero_r(double k = 10) {
    return synthetic([](double) { return 0.0; }, [](double) { return 0.0; }, -k, k);
}

// smooth reflection density with an asymmetric profile and a varying phase
ReflectionFunctional bump() {
    auto r2 = [](double s) { return 0.6 * std::pow(s, 6) * std::exp(-s * s) * (1 + 0.3 * std::tanh(s)); };
    auto dr2 = [](double s) {
        const double e = std::exp(-s * s), g = 1 + 0.3 * std::tanh(s);
        const double ch = std::cosh(s);
        return 0.6 * ((6 * std::pow(s, 5) - 2 * std::pow(s, 7)) * e * g + std::pow(s, 6) * e * 0.3 / (ch * ch));
    };
    return ReflectionFunctional([=](double s) { return std::log1p(r2(s)); },
                                [=](double s) { return dr2(s) / (1 + r2(s)); }, [](double s) { return 0.4 * s; },
                                -12, 12);
}

// Im ln Gamma(i nu) from the Weierstrass product
double weierstrass_arg(double v) {
    const double gamma_e = 0.57721566490153286060651209;
    const long N = 2000000;
    double s = 0;
    for (long n = N; n >= 1; --n) s += v / n - std::atan(v / n);
    s += v * v * v / (6.0 * N * N);
    return -gamma_e * v - pi / 2 + s;
}

} // namespace

TEST(Nu, Values) {
    EXPECT_EQ(nu(0.0), 0.0);
    EXPECT_NEAR(nu(1.0), -0.1103178, 1e-7);
    EXPECT_NEAR(nu(std::sqrt(std::exp(2 * pi) - 1)), -1.0, 1e-13);
    EXPECT_LE(nu(cd(0.3, -2.0)), 0.0);
}

TEST(Gamma, ConjugacyAndReal) {
    EXPECT_NEAR(log_gamma(cd(0, -0.25)).imag(), -log_gamma(cd(0, 0.25)).imag(), 1e-15);
    EXPECT_NEAR(gamma_arg(-0.25).arg, -gamma_arg(0.25).arg, 1e-15);
    for (double x : {0.3, 1.0, 2.5, 7.0, 30.0}) EXPECT_NEAR(log_gamma(x).real(), std::lgamma(x), 1e-13);
}

TEST(Gamma, ModulusIdentity) {
    for (int i = 0; i <= 200; ++i) {
        const double v = 0.01 + (5.0 - 0.01) * i / 200;
        const double lhs = std::exp(2 * log_gamma(cd(0, v)).real());
        const double rhs = pi / (v * std::sinh(pi * v));
        EXPECT_NEAR(lhs / rhs, 1.0, 1e-12) << v;
    }
}

TEST(Gamma, ArgAgainstProduct) {
    for (double v : {1.0, 0.25, 3.7}) {
        const double cont = log_gamma(cd(0, v)).imag();
        EXPECT_NEAR(cont, weierstrass_arg(v), 1e-10) << v;
        const auto g = gamma_arg(v);
        EXPECT_GT(g.arg, -pi);
        EXPECT_LE(g.arg, pi);
        EXPECT_NEAR(g.branch(), cont, 1e-14);
    }
}

TEST(Gamma, PoleAtZero) {
    try {
        gamma_arg(0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::PoleAtZero);
    }
}

TEST(Delta, ZeroReflection) {
    auto rf = zero_r();
    EXPECT_EQ(delta_eval(rf, 1.0, cd(0.3, 0.2)), cd(1.0));
    auto s = delta_small_k(rf, 1.0);
    EXPECT_EQ(s.delta0, cd(1.0));
    EXPECT_EQ(s.delta1, cd(0.0));
}

TEST(Delta, ReflectionIdentity) {
    auto rf = bump();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> re(-3, 3), im(0.01, 2);
    for (int i = 0; i < 20; ++i) {
        const cd k(re(rng), (i % 2 ? 1 : -1) * im(rng));
        const cd prod = delta_eval(rf, 2.0, k) * std::conj(delta_eval(rf, 2.0, std::conj(k)));
        EXPECT_LT(std::abs(prod - 1.0), 1e-10);
    }
    const cd k(0.3, 0.7);
    EXPECT_LT(std::abs(delta_eval(rf, 2.0, k) * std::conj(delta_eval(rf, 2.0, std::conj(k))) - 1.0), 1e-10);
}

TEST(Delta, OnCut) {
    try {
        delta_eval(bump(), 1.0, cd(0.5, 0.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OnCut);
    }
}

TEST(Delta, DenseSumOracle) {
    const double k0 = 0.8;
    auto rf = synthetic([](double s) { return std::pow(s, 4); }, [](double s) { return 4 * std::pow(s, 3); });
    const cd k = 2 * k0;
    const long M = 1000000;
    const double h = 2 * k0 / M;
    cd sum{};
    for (long j = 0; j < M; ++j) {
        const double s = -k0 + (j + 0.5) * h;
        sum += std::pow(s, 4) / (s - k);
    }
    const cd oracle = std::exp(sum * h / cd(0, 2 * pi));
    EXPECT_LT(std::abs(delta_eval(rf, k0, k) - oracle), 1e-9);
}

TEST(Delta, InsufficientTable) {
    try {
        delta_small_k(bump(), 20.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientTable);
    }
}

TEST(SmallKDelta, EvenDensityHasUnitDelta0) {
    auto rf = synthetic([](double s) { return s * s * s * s * s * s; }, [](double s) { return 6 * std::pow(s, 5); });
    EXPECT_LT(std::abs(delta_small_k(rf, 1.0).delta0 - 1.0), 1e-15);
}

TEST(SmallKDelta, QuarticDensity) {
    auto rf = synthetic([](double s) { return std::pow(s, 4); }, [](double s) { return 4 * std::pow(s, 3); });
    auto s = delta_small_k(rf, 1.0);
    EXPECT_LT(std::abs(s.delta1 - (2.0 / 3.0) / cd(0, 2 * pi)), 1e-14);
}

TEST(SmallKDelta, UnitModulusAndImaginaryDelta1) {
    auto rf = bump();
    for (double k0 : {0.3, 1.0, 4.0}) {
        auto s = delta_small_k(rf, k0);
        EXPECT_NEAR(std::abs(s.delta0), 1.0, 1e-12);
        EXPECT_EQ(s.delta1.real(), 0.0);
    }
}

TEST(PhaseIntegrals, ConstantDensity) {
    auto rf = synthetic([](double) { return 0.3; }, [](double) { return 0.0; });
    auto p = phase_integrals(rf, 1.0);
    EXPECT_EQ(p.I_plus, 0.0);
    EXPECT_EQ(p.I_minus, 0.0);
}

TEST(PhaseIntegrals, LinearDensity) {
    auto rf = synthetic([](double s) { return s; }, [](double) { return 1.0; });
    auto p = phase_integrals(rf, 1.0);
    EXPECT_NEAR(p.I_plus, 2 * std::log(2.0) - 2, 1e-9);
    EXPECT_NEAR(p.I_minus, 2 * std::log(2.0) - 2, 1e-9);
}

TEST(PhaseIntegrals, EvenDensitySymmetry) {
    auto rf = synthetic([](double s) { return std::exp(-s * s); }, [](double s) { return -2 * s * std::exp(-s * s); });
    auto p = phase_integrals(rf, 0.7);
    EXPECT_NEAR(p.I_plus, -p.I_minus, 1e-10);
    EXPECT_GT(std::abs(p.I_plus), 1e-3);
}

TEST(PhaseIntegrals, OddDensitySymmetry) {
    auto rf = synthetic([](double s) { return s * s * s; }, [](double s) { return 3 * s * s; });
    auto p = phase_integrals(rf, 0.7);
    EXPECT_NEAR(p.I_plus, p.I_minus, 1e-10);
}

TEST(PhaseIntegrals, AgainstSubstitution) {
    // tau = log(s + k0) substitution removes the singularity: independent oracle
    auto rf = bump();
    const double k0 = 1.3;
    auto p = phase_integrals(rf, k0);
    const double oracle = integrate(
        [&](double tau) {
            const double s = std::exp(tau) - k0;
            return tau * rf.dL(s) * std::exp(tau);
        },
        -60.0, std::log(2 * k0), 1e-15);
    EXPECT_NEAR(p.I_plus, oracle, 1e-9);
}

TEST(LeadingOrder, ZeroReflection) {
    auto lo = leading_order_u(zero_r(), 0.0, 10.0, 40.0);
    EXPECT_EQ(lo.u, cd(0.0));
    EXPECT_EQ(lo.A1, 0.0);
    EXPECT_EQ(lo.A2, 0.0);
}

TEST(LeadingOrder, RayInvariantEnvelope) {
    auto rf = bump();
    auto a = leading_order_u(rf, cd(0, 0.2), 50.0, 50.0);
    auto b = leading_order_u(rf, cd(0, 0.2), 200.0, 200.0);
    EXPECT_DOUBLE_EQ(a.kappa0, b.kappa0);
    EXPECT_DOUBLE_EQ(a.A1 + a.A2, b.A1 + b.A2);
    // only nu ln(k0^3/t) and t/k0 change between the two points
    const double k0 = a.kappa0;
    const double dphi1 = a.inputs.nu_minus * (std::log(1 / 200.0) - std::log(1 / 50.0)) - (200.0 - 50.0) / k0;
    const double dphi2 = a.inputs.nu_plus * (std::log(1 / 200.0) - std::log(1 / 50.0)) - (200.0 - 50.0) / k0;
    EXPECT_NEAR((b.phi1 - a.phi1).real(), dphi1, 1e-9);
    EXPECT_NEAR((b.phi2 - a.phi2).real(), dphi2, 1e-9);
    EXPECT_NEAR((b.phi1 - a.phi1).imag(), 0.0, 1e-12);
}

TEST(LeadingOrder, AmplitudesVanishAtLargeKappa) {
    auto rf = bump();
    auto lo = leading_order_u(rf, 0.0, 1.0, 400.0); // kappa0 = 10
    EXPECT_LT(lo.A1 + lo.A2, 1e-10);
}

TEST(LeadingOrder, ConventionsShareEnvelope) {
    auto rf = bump();
    auto a = leading_order_u(rf, cd(0, 0.3), 30.0, 100.0, PhaseConvention::as_printed);
    auto b = leading_order_u(rf, cd(0, 0.3), 30.0, 100.0, PhaseConvention::real_phase);
    EXPECT_EQ(a.A1, b.A1);
    EXPECT_EQ(a.A2, b.A2);
    EXPECT_LE(std::abs(b.u), (a.A1 + a.A2) / 10.0 + 1e-15);
    EXPECT_NEAR(std::abs(a.u_alt_form), std::abs(b.u), (a.A1 + a.A2) / 10.0 * 2 + 1e-15);
    EXPECT_NE(a.amplitude_correction1, 1.0);
}

TEST(LeadingOrder, Preconditions) {
    auto rf = bump();
    EXPECT_THROW(leading_order_u(rf, 0.0, -1.0, 10.0), Error);
    try {
        leading_order_u(rf, 0.0, 0.001, 10.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientTable);
    }
}

TEST(DecaySector, NegativeImTheta) {
    auto v = decay_sector_bound(-100.0, 100.0);
    EXPECT_EQ(v.verdict, "rapid decay");
    EXPECT_LT(v.max_im_theta, 0.0);
    EXPECT_NEAR(im_theta(-1.0, cd(0, 1)), -1.25, 1e-15);
    try {
        decay_sector_bound(5.0, 10.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::WrongSector);
    }
}

TEST(ReflectionFunctional, FromMeasuredTable) {
    auto p = build_profile(GaussianSpec{0.15, 1.0, 0.0, 1.0, true}, Grid::spanning(-30, 30, 1024));
    auto t = reflection_table(p, geometry(p), make_k_grid({.k_max = 4, .n_linear = 60, .n_log = 10}));
    auto rf = ReflectionFunctional::from_table(t);
    for (double s = -4; s <= 4; s += 0.001) EXPECT_GE(rf.L(s), 0.0);
    for (const auto& e : t.entries) EXPECT_NEAR(rf.abs_r(e.k), std::abs(e.r), 1e-12);
    EXPECT_EQ(rf.L(0.0), 0.0);
    auto s = delta_small_k(rf, 2.0);
    EXPECT_NEAR(std::abs(s.delta0), 1.0, 1e-12);
}
