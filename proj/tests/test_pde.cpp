#include <gtest/gtest.h>

#include <cmath>

#include "csp/pde.hpp"
#include "csp/soliton.hpp"

using namespace csp;

namespace {

ComplexProfile pulse(const EvolutionConfig& cfg, double A = 0.3) {
    return build_profile(GaussianSpec{A, 1.0, 0.0, 1.0, true}, cfg.grid());
}

DiscreteSpectrum soliton(double a = 1.0, double b = 0.4) {
    return {{{cd(a, b), one_soliton_constant({a, b}, 0.0, 0.0)}}, 0.0};
}

double linf(const std::vector<cd>& a, const std::vector<cd>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST(Evolve, ZeroField) {
    EvolutionConfig cfg{.L = 20, .n = 256, .dt = 0.05, .T = 1.0};
    auto traj = evolve(build_profile(GaussianSpec{0.0, 1.0}, cfg.grid()), cfg);
    for (const auto& s : traj.states) EXPECT_EQ(s.max_abs(), 0.0);
    auto rep = conservation_report(traj);
    EXPECT_EQ(rep.max_c_drift, 0.0);
    EXPECT_EQ(rep.max_d_drift, 0.0);
}

TEST(Evolve, PhaseEquivariance) {
    EvolutionConfig cfg{.L = 40, .n = 512, .dt = 0.02, .T = 2.0, .snapshot_stride = 100};
    auto u0 = pulse(cfg);
    auto v0 = u0;
    const cd rot = std::polar(1.0, 0.9);
    for (auto& z : v0.u) z *= rot;
    auto a = evolve(u0, cfg), b = evolve(v0, cfg);
    auto ua = a.states.back().u;
    for (auto& z : ua) z *= rot;
    EXPECT_LT(linf(ua, b.states.back().u), 1e-10);
}

TEST(Evolve, RejectsNonzeroMean) {
    EvolutionConfig cfg{.L = 20, .n = 256, .dt = 0.05, .T = 1.0};
    try {
        evolve(build_profile(GaussianSpec{0.3, 1.0}, cfg.grid()), cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MeanNotZero);
    }
}

TEST(Evolve, RejectsMismatchedBox) {
    EvolutionConfig cfg{.L = 20, .n = 256, .dt = 0.05, .T = 1.0};
    auto u0 = build_profile(GaussianSpec{0.3, 1.0, 0.0, 0.0, true}, Grid::spanning(-10, 10, 256));
    EXPECT_THROW(evolve(u0, cfg), Error);
    EvolutionConfig bad = cfg;
    bad.n = 200;
    EXPECT_THROW(evolve(u0, bad), Error);
}

TEST(Evolve, SolitonTracksExactSolution) {
    EvolutionConfig cfg{.L = 50, .n = 4096, .dt = 0.005, .T = 4.0, .snapshot_stride = 200};
    auto spec = soliton();
    auto traj = evolve(soliton_field(spec, 0.0, cfg.grid()), cfg);
    double worst = 0;
    for (std::size_t s = 0; s < traj.states.size(); ++s)
        worst = std::max(worst, linf(traj.states[s].u, soliton_field(spec, traj.times[s], cfg.grid()).u));
    EXPECT_LT(worst, 1e-4);
    auto rep = conservation_report(traj);
    EXPECT_LT(rep.max_c_drift, 1e-6);
    EXPECT_LT(rep.max_d_drift, 1e-6);
    EXPECT_LT(rep.max_mean, 1e-10 * traj.states[0].max_abs());
}

TEST(Evolve, IntegratingFactorAgreesWithPlainRk4) {
    EvolutionConfig cfg{.L = 20, .n = 512, .dt = 0.005, .T = 1.0, .snapshot_stride = 1000};
    auto u0 = pulse(cfg);
    auto a = evolve(u0, cfg);
    cfg.integrating_factor = true;
    auto b = evolve(u0, cfg);
    EXPECT_LT(linf(a.states.back().u, b.states.back().u), 1e-9);
}

TEST(Evolve, TimeReversal) {
    EvolutionConfig cfg{.L = 20, .n = 512};
    auto u0 = pulse(cfg, 0.5);
    for (bool ifac : {false, true}) {
        SpectralStepper st(u0, 2.0 / 3.0, ifac);
        for (int i = 0; i < 20; ++i) st.step(0.01);
        for (int i = 0; i < 20; ++i) st.step(-0.01);
        // dealiasing removes the top third of the spectrum once; compare against the filtered start
        SpectralStepper ref(u0, 2.0 / 3.0, ifac);
        ref.step(0.0);
        EXPECT_LT(linf(st.state().u, ref.state().u), 1e-9);
    }
}

TEST(Conservation, UnderResolvedRunDriftsMore) {
    auto spec = soliton();
    auto run = [&](std::size_t n) {
        EvolutionConfig cfg{.L = 50, .n = n, .dt = 0.01, .T = 4.0, .snapshot_stride = 100};
        return conservation_report(evolve(remove_mean(soliton_field(spec, 0.0, cfg.grid())), cfg));
    };
    auto fine = run(2048), coarse = run(128);
    EXPECT_GT(coarse.max_c_drift, fine.max_c_drift);
    EXPECT_GT(coarse.max_d_drift, fine.max_d_drift);
}

TEST(Conservation, NeedsTwoSnapshots) {
    Trajectory t;
    t.drift_log.resize(1);
    EXPECT_THROW(conservation_report(t), Error);
}

TEST(SectorScan, ZeroField) {
    EvolutionConfig cfg{.L = 20, .n = 256, .dt = 0.1, .T = 10.0, .snapshot_stride = 50};
    auto traj = evolve(build_profile(GaussianSpec{0.0, 1.0}, cfg.grid()), cfg);
    auto left = sector_scan(traj, Sector::left, 0.2);
    ASSERT_FALSE(left.suprema.empty());
    for (const auto& s : left.suprema) EXPECT_EQ(s.sup, 0.0);
    auto right = sector_scan(traj, Sector::right, 0.2);
    EXPECT_TRUE(right.peaks.empty());
}

TEST(SectorScan, EmptyWindow) {
    EvolutionConfig cfg{.L = 20, .n = 256, .dt = 0.1, .T = 1.0};
    auto traj = evolve(build_profile(GaussianSpec{0.0, 1.0}, cfg.grid()), cfg);
    try {
        sector_scan(traj, Sector::right, 0.2, {.t_min = 5.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::WindowEmpty);
    }
}

TEST(SectorScan, PeakRefinement) {
    // parabolic refinement recovers an off-grid Gaussian peak
    ComplexProfile p{0.0, 0.1, 64, std::vector<cd>(64), 0.0, {}};
    for (std::size_t i = 0; i < 64; ++i) p.u[i] = 2.0 * std::exp(-std::pow(p.x(i) - 3.03, 2));
    auto m = local_maxima(p, 0, 63);
    ASSERT_EQ(m.size(), 1u);
    EXPECT_NEAR(m[0].first, 3.03, 2e-3);
    EXPECT_NEAR(m[0].second, 2.0, 1e-3);
}
