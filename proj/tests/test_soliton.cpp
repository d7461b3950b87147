#include <gtest/gtest.h>

#include <cmath>

#include "csp/soliton.hpp"

using namespace csp;

namespace {

DiscreteSpectrum one(cd k, double cph = 0.0, double y0 = 0.0, cd d = 0.0) {
    return {{{k, one_soliton_constant(k, cph, y0)}}, d};
}

double golden_min(auto f, double a, double b) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    for (int i = 0; i < 200 && b - a > 1e-12; ++i) {
        if (f(c) < f(d)) b = d; else a = c;
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    return f(0.5 * (a + b));
}

Lattice lattice_of(const DiscreteSpectrum& s, double L, std::size_t n, std::size_t nt, double t0) {
    const Grid g = Grid::spanning(-L, L, n);
    Lattice lat{g.x0, g.dx, t0, g.dx, n, nt, {}};
    for (std::size_t j = 0; j < nt; ++j) {
        auto f = soliton_field(s, t0 + j * lat.dt, g);
        lat.values.insert(lat.values.end(), f.u.begin(), f.u.end());
    }
    return lat;
}

} // namespace

TEST(OneSoliton, PeakAmplitude) {
    const cd k(1.0, 0.5);
    double peak = 0;
    for (double y = -5; y <= 5; y += 1e-3) peak = std::max(peak, std::abs(one_soliton(k, 0, 0, 0, y, 0).u));
    EXPECT_NEAR(peak, 0.4, 1e-6);
    EXPECT_NEAR(std::abs(one_soliton(k, 0.3, 0.0, 0.0, 0.0, 0.0).u), 0.4, 1e-15);
}

TEST(OneSoliton, SlopeTendsToOne) {
    for (double y : {-40.0, 40.0}) EXPECT_NEAR(one_soliton({1.0, 0.5}, 0, 0, 0, y, 0).dxdy, 1.0, 1e-12);
}

TEST(OneSoliton, MinimumSlope) {
    for (cd k : {cd(1, 1), cd(1, 0.4), cd(0.3, 1), cd(-0.7, 0.2)}) {
        const double a = k.real(), b = k.imag();
        const double m = golden_min([&](double y) { return one_soliton(k, 0, 0.1, 0, y, 0).dxdy; }, -10, 10);
        EXPECT_NEAR(m, (a * a - b * b) / (a * a + b * b), 1e-10);
    }
}

TEST(OneSoliton, RejectsLowerHalfPlane) {
    try {
        one_soliton({1.0, -0.1}, 0, 0, 0, 0, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidSpectrum);
    }
}

TEST(Classify, CanonicalValues) {
    EXPECT_EQ(classify({1.0, 0.5}), SolitonClass::smooth);
    EXPECT_EQ(classify({0.5, 0.5}), SolitonClass::cuspon);
    EXPECT_EQ(classify({0.3, 1.0}), SolitonClass::loop);
}

TEST(Classify, SlopeSignsMatchClass) {
    auto min_slope = [](cd k) {
        return golden_min([&](double y) { return one_soliton(k, 0, 0, 0, y, 0).dxdy; }, -10, 10);
    };
    EXPECT_GT(min_slope({1.0, 0.5}), 0.0);
    EXPECT_NEAR(min_slope({0.5, 0.5}), 0.0, 1e-12);
    EXPECT_LT(min_slope({0.3, 1.0}), 0.0);
}

TEST(NSoliton, OnePointMatchesClosedForm) {
    const cd k(1.0, 0.5), d(0.0, 0.3);
    const double cph = 0.4, y0 = 0.25;
    auto spec = one(k, cph, y0, d);
    double worst = 0;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            const double y = -10 + 20.0 * i / 19, t = 10.0 * j / 19;
            auto e = nsoliton_eval(spec, y, t);
            auto r = reconstruct_u(e.M0, e.M1, d);
            auto s = one_soliton(k, cph, y0, d, y, t);
            worst = std::max({worst, std::abs(r.u - s.u), std::abs(r.x_minus_y - (s.x - y))});
            EXPECT_LT(std::abs(e.M0.determinant() - 1.0), 1e-10);
        }
    EXPECT_LT(worst, 1e-10);
}

TEST(NSoliton, VanishingConstant) {
    DiscreteSpectrum s{{{cd(1.0, 0.5), cd(1e-14, 0)}}, 0.0};
    auto e = nsoliton_eval(s, 0.3, 0.0);
    EXPECT_LT((e.M0 - Mat2::Identity()).norm(), 1e-13);
    EXPECT_LT(std::abs(reconstruct_u(e.M0, e.M1, 0.0).u), 1e-13);
}

TEST(NSoliton, InvalidSpectrum) {
    EXPECT_THROW(nsoliton_eval({{{cd(1.0, -0.5), 1.0}}, 0.0}, 0, 0), Error);
    EXPECT_THROW(nsoliton_eval({{}, 0.0}, 0, 0), Error);
    EXPECT_THROW(nsoliton_eval({{{cd(1.0, 0.5), 1.0}, {cd(1.0, 0.5), 2.0}}, 0.0}, 0, 0), Error);
}

TEST(Reconstruct, TrivialExpansion) {
    auto r = reconstruct_u(Mat2::Identity(), Mat2::Zero(), 0.0);
    EXPECT_EQ(r.u, cd(0.0));
    EXPECT_EQ(r.x_minus_y, 0.0);
}

TEST(Reconstruct, OffsetAtOrigin) {
    auto e = nsoliton_eval(one({1.0, 0.5}), 0.0, 0.0);
    EXPECT_NEAR(reconstruct_u(e.M0, e.M1, 0.0).x_minus_y, 0.4, 1e-14);
}

TEST(Reconstruct, PhaseEquivariance) {
    const double alpha = 0.7;
    auto s1 = one({0.8, 0.6}, 0.1, -0.2);
    auto s2 = s1;
    s2.points[0].C *= std::polar(1.0, 2 * alpha);
    for (double y : {-1.0, 0.0, 2.0}) {
        auto e1 = nsoliton_eval(s1, y, 1.5), e2 = nsoliton_eval(s2, y, 1.5);
        auto r1 = reconstruct_u(e1.M0, e1.M1, 0.0), r2 = reconstruct_u(e2.M0, e2.M1, 0.0);
        EXPECT_LT(std::abs(r2.u - std::polar(1.0, 2 * alpha) * r1.u), 1e-13);
        EXPECT_NEAR(r1.x_minus_y, r2.x_minus_y, 1e-13);
    }
}

TEST(Reconstruct, SingularM0) {
    EXPECT_THROW(reconstruct_u(Mat2::Zero(), Mat2::Zero(), 0.0), Error);
}

TEST(OneSoliton, EnvelopeMovesRigidly) {
    const cd k(1.0, 0.4);
    const double K = std::norm(k);
    for (double y : {-1.0, 0.3}) {
        const double t = 7.0;
        const double a1 = std::abs(one_soliton(k, 0, 0, 0, y, 0).u);
        const double a2 = std::abs(one_soliton(k, 0, 0, 0, y + t / (4 * K), t).u);
        EXPECT_NEAR(a1, a2, 1e-14);
    }
}

TEST(SolitonField, RoundTrip) {
    auto spec = one({1.0, 0.5}, 0.2, 0.3);
    const Grid g = Grid::spanning(-10, 10, 256);
    auto f = soliton_field(spec, 1.0, g);
    auto [cph, y0] = one_soliton_parameters(spec.points[0].k, spec.points[0].C);
    EXPECT_NEAR(cph, 0.2, 1e-15);
    EXPECT_NEAR(y0, 0.3, 1e-15);
    for (std::size_t i = 0; i < g.n; i += 7) {
        // y(x) via bisection, then x(y(x)) must return x
        double lo = g.x(i) - 2, hi = g.x(i) + 2;
        for (int it = 0; it < 100; ++it) {
            const double m = 0.5 * (lo + hi);
            (one_soliton(spec.points[0].k, cph, y0, 0, m, 1.0).x < g.x(i) ? lo : hi) = m;
        }
        auto s = one_soliton(spec.points[0].k, cph, y0, 0, lo, 1.0);
        EXPECT_NEAR(s.x, g.x(i), 1e-10);
        EXPECT_LT(std::abs(s.u - f.u[i]), 1e-10);
    }
}

TEST(SolitonField, LoopRejected) {
    try {
        soliton_field(one({0.3, 1.0}), 0.0, Grid::spanning(-5, 5, 64));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotSingleValued);
    }
}

TEST(SolitonField, GeometryOffsetEqualsC) {
    auto f = soliton_field(one({1.0, 0.5}), 0.0, Grid::spanning(-40, 40, 4096));
    EXPECT_NEAR(geometry(f).c, 0.8, 1e-10);
}

TEST(SolitonField, SmallResidual) {
    auto lat = lattice_of(one({1.0, 0.4}), 15, 2048, 5, 0.5);
    EXPECT_LT(pde_residual(lat), 1e-3);
}

TEST(SolitonField, TwoSolitonSolvesEquation) {
    // generic residue path; the residual must shrink at second order
    DiscreteSpectrum s{{{cd(1.0, 0.4), one_soliton_constant({1.0, 0.4}, 0.0, -2.0)},
                        {cd(-0.8, 0.3), one_soliton_constant({-0.8, 0.3}, 0.5, 2.0)}},
                       0.0};
    auto e = nsoliton_eval(s, 0.5, 1.0);
    EXPECT_LT(std::abs(e.M0.determinant() - 1.0), 1e-10);
    EXPECT_GT(e.rcond, 1e-6);
    const double r1 = pde_residual(lattice_of(s, 15, 512, 5, 1.0));
    const double r2 = pde_residual(lattice_of(s, 15, 1024, 5, 1.0));
    EXPECT_GT(r1 / r2, 3.5);
    EXPECT_LT(r1 / r2, 4.5);
    EXPECT_LT(r2, 1e-3);
}
