#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "fft.hpp"
#include "numerics.hpp"
#include "profile.hpp"

namespace csp {

using Mat2 = Eigen::Matrix2cd;

struct JostOptions {
    std::size_t refine = 16;    ///< coefficient refinement factor; RK4 step = 2 * dx / refine
    long matching_offset = 0;   ///< shift of the matching point from the grid midpoint, in grid cells
    double tolerance = 1e-6;    ///< unitarity defect above which scattering_entry fails
    unsigned threads = 0;       ///< 0: hardware concurrency
};

struct JostPair {
    Mat2 mu1;  ///< normalised to identity at the left edge
    Mat2 mu2;  ///< normalised to identity at the right edge
    double xm = 0.0;
    double p_xm = 0.0;
};

struct ScatteringEntry {
    double k = 0.0;
    cd a{1.0, 0.0};
    cd b{};
    cd r{};

    double unitarity_defect() const { return std::abs(std::norm(a) + std::norm(b) - 1.0); }
    double identity_defect() const { return std::abs(1.0 + std::norm(r) - 1.0 / std::norm(a)); }
};

struct ScatteringTable {
    std::vector<ScatteringEntry> entries;
    double c = 0.0;
    cd d{};
    double k_min = 0.0;
    double k_max = 0.0;
    std::string spacing_rule;
    double unitarity_defect = 0.0;
};

/// Symmetric k grid without 0: log-spaced on [k_log_min, k_split), linear on [k_split, k_max], mirrored.
struct KGridSpec {
    double k_max = 8.0;
    std::size_t n_linear = 70;
    std::size_t n_log = 30;
    double k_split = 0.05;
    double k_log_min = 1e-3;

    std::string describe() const {
        return "log[" + std::to_string(k_log_min) + "," + std::to_string(k_split) + ")x" + std::to_string(n_log) +
               " + linear[" + std::to_string(k_split) + "," + std::to_string(k_max) + "]x" +
               std::to_string(n_linear) + ", mirrored";
    }
};

inline std::vector<double> make_k_grid(const KGridSpec& s) {
    if (!(s.k_log_min > 0.0 && s.k_split > s.k_log_min && s.k_max > s.k_split) || s.n_linear < 2)
        throw Error(ErrorKind::InvalidData, "bad k grid specification");
    std::vector<double> pos;
    for (std::size_t i = 0; i < s.n_log; ++i)
        pos.push_back(s.k_log_min * std::pow(s.k_split / s.k_log_min, static_cast<double>(i) / s.n_log));
    for (std::size_t i = 0; i < s.n_linear; ++i)
        pos.push_back(s.k_split + (s.k_max - s.k_split) * static_cast<double>(i) / (s.n_linear - 1));
    std::vector<double> k;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) k.push_back(-*it);
    k.insert(k.end(), pos.begin(), pos.end());
    return k;
}

/// Small-k form of a(k) for data with vanishing momentum.
inline cd a_small_k(double c, cd d, double k) {
    return std::exp(d) * cd(1.0 - 0.5 * c * c * k * k, k * c);
}

/// Small-k form of a(k) including the momentum term; P = int u conj(u_x) dx.
inline cd a_small_k(double c, cd d, cd P, double k) {
    return std::exp(d + cd(0.0, k * c)) * (1.0 - k * k * P);
}

/// P = int u conj(u_x) dx (purely imaginary for decaying data).
inline cd momentum(const ComplexProfile& p) {
    const auto ux = differentiate(p, 1).u;
    std::vector<cd> f(p.n);
    for (std::size_t i = 0; i < p.n; ++i) f[i] = p.u[i] * std::conj(ux[i]);
    return simpson(f, p.dx);
}

/// Coefficients of the x-part on a refined grid, prepared once per profile.
class ScatteringProblem {
public:
    ScatteringProblem(const ComplexProfile& p, const GeometryFields& g, JostOptions opts = {})
        : opts_(opts), c_(g.c), d_(g.d) {
        check_decay(p);
        if (opts_.refine < 1) throw Error(ErrorKind::InvalidData, "refinement factor must be >= 1");
        const std::size_t R = opts_.refine, N = p.n * R;
        h_ = p.dx / static_cast<double>(R);
        x0_ = p.x0;
        const auto uf = refine(p.u, R);
        const auto ux = detail::spectral_derivative(uf, h_, 1);
        const auto uxx = detail::spectral_derivative(uf, h_, 2);

        std::vector<double> excess(N), dens(N);
        U12_.resize(N);
        double umax = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double m = 1.0 + std::norm(ux[i]), s = std::sqrt(m);
            excess[i] = s - 1.0;
            dens[i] = phase_density(ux[i], uxx[i]);
            U12_[i] = ((s + 1.0) * uxx[i] - ux[i] * ux[i] * std::conj(uxx[i]) / (s + 1.0)) / (4.0 * m);
            umax = std::max(umax, std::abs(U12_[i]));
        }
        const auto run = cumulative_integral(excess, h_);
        dminus_ = cumulative_integral(dens, h_);
        p_.resize(N);
        for (std::size_t i = 0; i < N; ++i) p_[i] = x0_ + static_cast<double>(i) * h_ - (run.back() - run[i]);

        const long mid = static_cast<long>(R) * (static_cast<long>(p.n / 2) + opts_.matching_offset);
        if (mid < 2 || mid > static_cast<long>(N) - 3)
            throw Error(ErrorKind::InvalidData, "matching point outside the grid");
        mid_ = static_cast<std::size_t>(mid);

        const double floor = 1e-17 * umax;
        std::size_t lo = 0, hi = N - 1;
        if (umax == 0.0) {
            lo = hi = mid_;
        } else {
            while (lo < N && std::abs(U12_[lo]) <= floor) ++lo;
            while (hi > 0 && std::abs(U12_[hi]) <= floor) --hi;
            lo = lo > 0 ? lo - 1 : 0;
            hi = std::min(hi + 1, N - 1);
        }
        lo = std::min(lo, mid_);
        hi = std::max(hi, mid_);
        if ((mid_ - lo) % 2) lo = lo > 0 ? lo - 1 : lo + 1;
        if ((hi - mid_) % 2) hi = hi + 1 < N ? hi + 1 : hi - 1;
        lo_ = lo;
        hi_ = hi;
    }

    double c() const { return c_; }
    cd d() const { return d_; }
    double matching_point() const { return x0_ + static_cast<double>(mid_) * h_; }
    const JostOptions& options() const { return opts_; }

    /// Jost solutions in the integrating-factor frame at the matching point.
    std::pair<Mat2, Mat2> frame_pair(double k) const {
        if (k == 0.0) throw Error(ErrorKind::SingularSpectralPoint, "k = 0 is not solved directly");
        Mat2 nu1 = run(k, lo_, mid_, +1);
        Mat2 nu2 = run(k, hi_, mid_, -1);
        if (!nu1.allFinite() || !nu2.allFinite())
            throw Error(ErrorKind::IntegrationBlowup, "non-finite Jost state at k = " + std::to_string(k), k);
        return {nu1, nu2};
    }

    JostPair jost(double k) const {
        auto [nu1, nu2] = frame_pair(k);
        const double pm = p_[mid_];
        const cd e = std::polar(1.0, 2.0 * k * pm);
        auto lift = [&](Mat2 v) {
            v(0, 1) *= e;
            v(1, 0) /= e;
            return v;
        };
        return {lift(nu1), lift(nu2), matching_point(), pm};
    }

    ScatteringEntry entry(double k) const {
        auto [nu1, nu2] = frame_pair(k);
        const cd det2 = nu2.determinant();
        Mat2 inv2;
        inv2 << nu2(1, 1), -nu2(0, 1), -nu2(1, 0), nu2(0, 0);
        inv2 /= det2;
        const Mat2 S = inv2 * nu1;
        ScatteringEntry e{k, S(1, 1), S(0, 1), {}};
        if (std::abs(e.a) < 1e-8)
            throw Error(ErrorKind::SpectralSingularity, "|a(k)| < 1e-8 at k = " + std::to_string(k), k);
        e.r = e.b / e.a;
        const double defect = e.unitarity_defect();
        if (!(defect <= opts_.tolerance))
            throw Error(ErrorKind::ToleranceExceeded,
                        "unitarity defect " + std::to_string(defect) + " at k = " + std::to_string(k), defect);
        return e;
    }

private:
    cd coupling(double k, std::size_t i) const {
        return U12_[i] * std::polar(1.0, -2.0 * (k * p_[i] + dminus_[i]));
    }

    Mat2 run(double k, std::size_t from, std::size_t to, int dir) const {
        cd v11 = 1.0, v12 = 0.0, v21 = 0.0, v22 = 1.0;
        const double H = 2.0 * h_ * dir;
        std::size_t i = from;
        cd Ai = coupling(k, i);
        while (i != to) {
            const std::size_t j = dir > 0 ? i + 1 : i - 1;
            const std::size_t l = dir > 0 ? i + 2 : i - 2;
            const cd Aj = coupling(k, j), Al = coupling(k, l);
            const cd Bi = -std::conj(Ai), Bj = -std::conj(Aj), Bl = -std::conj(Al);
            // v' = [[0, A], [B, 0]] v
            const cd k1a = Ai * v21, k1b = Ai * v22, k1c = Bi * v11, k1d = Bi * v12;
            const cd k2a = Aj * (v21 + 0.5 * H * k1c), k2b = Aj * (v22 + 0.5 * H * k1d);
            const cd k2c = Bj * (v11 + 0.5 * H * k1a), k2d = Bj * (v12 + 0.5 * H * k1b);
            const cd k3a = Aj * (v21 + 0.5 * H * k2c), k3b = Aj * (v22 + 0.5 * H * k2d);
            const cd k3c = Bj * (v11 + 0.5 * H * k2a), k3d = Bj * (v12 + 0.5 * H * k2b);
            const cd k4a = Al * (v21 + H * k3c), k4b = Al * (v22 + H * k3d);
            const cd k4c = Bl * (v11 + H * k3a), k4d = Bl * (v12 + H * k3b);
            v11 += H / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
            v12 += H / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
            v21 += H / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c);
            v22 += H / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
            i = l;
            Ai = Al;
        }
        Mat2 out;
        out << v11, v12, v21, v22;
        return out;
    }

    JostOptions opts_;
    double c_;
    cd d_;
    double h_ = 0.0, x0_ = 0.0;
    std::vector<cd> U12_;
    std::vector<double> p_, dminus_;
    std::size_t mid_ = 0, lo_ = 0, hi_ = 0;
};

inline JostPair jost_pair(const ComplexProfile& p, const GeometryFields& g, double k, JostOptions opts = {}) {
    if (k == 0.0) throw Error(ErrorKind::SingularSpectralPoint, "k = 0 is not solved directly");
    return ScatteringProblem(p, g, opts).jost(k);
}

inline ScatteringEntry scattering_entry(const ComplexProfile& p, const GeometryFields& g, double k,
                                        JostOptions opts = {}) {
    if (k == 0.0) throw Error(ErrorKind::SingularSpectralPoint, "k = 0 is not solved directly");
    return ScatteringProblem(p, g, opts).entry(k);
}

inline ScatteringTable reflection_table(const ScatteringProblem& prob, std::vector<double> k_grid,
                                        std::string spacing_rule = "explicit") {
    if (k_grid.empty()) throw Error(ErrorKind::InvalidData, "empty k grid");
    std::sort(k_grid.begin(), k_grid.end());
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        if (k_grid[i] == 0.0) throw Error(ErrorKind::SingularSpectralPoint, "k grid contains 0");
        if (i > 0 && k_grid[i] == k_grid[i - 1]) throw Error(ErrorKind::InvalidData, "duplicate k in grid");
    }
    const std::size_t n = k_grid.size();
    std::vector<ScatteringEntry> entries(n);
    std::vector<std::exception_ptr> failures(n);
    unsigned workers = prob.options().threads ? prob.options().threads : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    auto task = [&](unsigned w) {
        for (std::size_t i = w; i < n; i += workers) {
            try {
                entries[i] = prob.entry(k_grid[i]);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        task(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(task, w);
    }
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);

    ScatteringTable t;
    t.entries = std::move(entries);
    t.c = prob.c();
    t.d = prob.d();
    t.k_min = k_grid.front();
    t.k_max = k_grid.back();
    t.spacing_rule = std::move(spacing_rule);
    for (const auto& e : t.entries) t.unitarity_defect = std::max(t.unitarity_defect, e.unitarity_defect());
    return t;
}

inline ScatteringTable reflection_table(const ComplexProfile& p, const GeometryFields& g, std::vector<double> k_grid,
                                        JostOptions opts = {}, std::string spacing_rule = "explicit") {
    return reflection_table(ScatteringProblem(p, g, opts), std::move(k_grid), std::move(spacing_rule));
}

} // namespace csp
