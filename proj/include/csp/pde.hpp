#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "fft.hpp"
#include "numerics.hpp"
#include "profile.hpp"

namespace csp {

struct EvolutionConfig {
    double L = 100.0;              ///< box is [-L, L)
    std::size_t n = 1024;          ///< power of two
    double dt = 0.01;
    double T = 1.0;
    double dealias_fraction = 2.0 / 3.0;
    std::size_t snapshot_stride = 1;
    bool integrating_factor = false; ///< exact exponential for the linear part (Lawson RK4)

    Grid grid() const { return Grid::spanning(-L, L, n); }

    void validate() const {
        if (!(L > 0.0) || !(dt > 0.0) || !(T >= 0.0))
            throw Error(ErrorKind::InvalidData, "L, dt must be positive and T non-negative");
        if (n < 8 || (n & (n - 1)) != 0) throw Error(ErrorKind::InvalidData, "n must be a power of two >= 8");
        if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
            throw Error(ErrorKind::InvalidData, "dealias_fraction must lie in (0, 1]");
        if (snapshot_stride < 1) throw Error(ErrorKind::InvalidData, "snapshot_stride must be >= 1");
    }
};

struct DriftRecord {
    double t = 0.0;
    double c = 0.0;
    double d_imag = 0.0;
    double mean_abs = 0.0;
    double c_drift = 0.0;
    double d_drift = 0.0;
    double mean_drift = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ComplexProfile> states;
    std::vector<DriftRecord> drift_log;
    double cfl = 0.0; ///< dt * max|q| * max|u0|^2, advisory
};

/// u_t = -dx^{-1} u - |u|^2 u_x / 2 on zero-mean periodic fields, in Fourier space.
class SpectralStepper {
public:
    SpectralStepper(const ComplexProfile& u0, double dealias_fraction = 2.0 / 3.0, bool integrating_factor = false)
        : grid_(u0.grid()), if_(integrating_factor) {
        const std::size_t n = u0.n;
        q_ = wavenumbers(n, u0.dx);
        lin_.assign(n, cd{});
        keep_.assign(n, 1.0);
        const double qmax = pi / u0.dx;
        for (std::size_t j = 0; j < n; ++j) {
            if (q_[j] != 0.0) lin_[j] = cd(0.0, 1.0 / q_[j]);
            if (std::abs(q_[j]) > dealias_fraction * qmax) keep_[j] = 0.0;
        }
        keep_[0] = 0.0;
        v_ = fft(u0.u);
        v_[0] = 0.0;
    }

    void step(double dt) {
        const std::size_t n = v_.size();
        if (if_) {
            if (dt != cached_dt_) {
                E_.resize(n);
                E2_.resize(n);
                for (std::size_t j = 0; j < n; ++j) {
                    E_[j] = std::exp(lin_[j] * (0.5 * dt));
                    E2_[j] = E_[j] * E_[j];
                }
                cached_dt_ = dt;
            }
            std::vector<cd> tmp(n);
            const auto k1 = rhs_nonlinear(v_);
            for (std::size_t j = 0; j < n; ++j) tmp[j] = E_[j] * (v_[j] + 0.5 * dt * k1[j]);
            const auto k2 = rhs_nonlinear(tmp);
            for (std::size_t j = 0; j < n; ++j) tmp[j] = E_[j] * v_[j] + 0.5 * dt * k2[j];
            const auto k3 = rhs_nonlinear(tmp);
            for (std::size_t j = 0; j < n; ++j) tmp[j] = E2_[j] * v_[j] + dt * E_[j] * k3[j];
            const auto k4 = rhs_nonlinear(tmp);
            for (std::size_t j = 0; j < n; ++j)
                v_[j] = E2_[j] * v_[j] + dt / 6.0 * (E2_[j] * k1[j] + 2.0 * E_[j] * (k2[j] + k3[j]) + k4[j]);
        } else {
            std::vector<cd> tmp(n);
            const auto k1 = rhs(v_);
            for (std::size_t j = 0; j < n; ++j) tmp[j] = v_[j] + 0.5 * dt * k1[j];
            const auto k2 = rhs(tmp);
            for (std::size_t j = 0; j < n; ++j) tmp[j] = v_[j] + 0.5 * dt * k2[j];
            const auto k3 = rhs(tmp);
            for (std::size_t j = 0; j < n; ++j) tmp[j] = v_[j] + dt * k3[j];
            const auto k4 = rhs(tmp);
            for (std::size_t j = 0; j < n; ++j) v_[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        v_[0] = 0.0;
    }

    bool finite() const {
        for (auto z : v_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    ComplexProfile state() const {
        ComplexProfile p{grid_.x0, grid_.dx, grid_.n, ifft(v_), 0.0, {}};
        p.tail_bound = std::max(std::abs(p.u.front()), std::abs(p.u.back()));
        return p;
    }

    double max_wavenumber() const { return pi / grid_.dx; }

private:
    std::vector<cd> rhs_nonlinear(const std::vector<cd>& v) const {
        const std::size_t n = v.size();
        const auto u = ifft(v);
        std::vector<cd> dv(n);
        for (std::size_t j = 0; j < n; ++j) dv[j] = cd(0.0, q_[j]) * v[j];
        const auto ux = ifft(dv);
        std::vector<cd> w(n);
        for (std::size_t j = 0; j < n; ++j) w[j] = -0.5 * std::norm(u[j]) * ux[j];
        auto W = fft(w);
        for (std::size_t j = 0; j < n; ++j) W[j] *= keep_[j];
        return W;
    }

    std::vector<cd> rhs(const std::vector<cd>& v) const {
        auto W = rhs_nonlinear(v);
        for (std::size_t j = 0; j < v.size(); ++j) W[j] += lin_[j] * v[j];
        return W;
    }

    Grid grid_;
    bool if_;
    std::vector<double> q_, keep_;
    std::vector<cd> lin_, v_, E_, E2_;
    double cached_dt_ = std::nan("");
};

namespace detail {

inline cd box_mean(const ComplexProfile& p) {
    cd s{};
    for (auto v : p.u) s += v;
    return s / static_cast<double>(p.n);
}

inline DriftRecord drift_of(const ComplexProfile& p, double t, const DriftRecord* ref) {
    const auto g = geometry(p, DerivativeMethod::spectral, false);
    DriftRecord r{t, g.c, g.d.imag(), std::abs(box_mean(p)), 0.0, 0.0, 0.0};
    if (ref) {
        r.c_drift = std::abs(r.c - ref->c);
        r.d_drift = std::abs(r.d_imag - ref->d_imag);
        r.mean_drift = std::abs(r.mean_abs - ref->mean_abs);
    }
    return r;
}

} // namespace detail

/// Copy of p with the box mean subtracted (for coarse samplings of zero-mean data).
inline ComplexProfile remove_mean(ComplexProfile p) {
    const cd m = detail::box_mean(p);
    for (auto& v : p.u) v -= m;
    return p;
}

inline Trajectory evolve(const ComplexProfile& u0, const EvolutionConfig& cfg) {
    cfg.validate();
    const Grid g = cfg.grid();
    if (u0.n != cfg.n || std::abs(u0.dx - g.dx) > 1e-12 * g.dx || std::abs(u0.x0 - g.x0) > 1e-9 * cfg.L)
        throw Error(ErrorKind::InvalidData, "initial profile does not live on the configured box");
    const double umax = u0.max_abs();
    const double mean = std::abs(detail::box_mean(u0));
    if (mean > 1e-12 * umax)
        throw Error(ErrorKind::MeanNotZero, "spatial mean " + std::to_string(mean) + " exceeds 1e-12 max|u0|",
                    mean / umax);

    SpectralStepper stepper(u0, cfg.dealias_fraction, cfg.integrating_factor);
    Trajectory traj;
    traj.cfl = cfg.dt * stepper.max_wavenumber() * umax * umax;
    auto record = [&](double t) {
        auto s = stepper.state();
        traj.drift_log.push_back(detail::drift_of(s, t, traj.drift_log.empty() ? nullptr : &traj.drift_log.front()));
        traj.times.push_back(t);
        traj.states.push_back(std::move(s));
    };
    record(0.0);
    const auto steps = static_cast<std::size_t>(std::llround(cfg.T / cfg.dt));
    for (std::size_t s = 1; s <= steps; ++s) {
        stepper.step(cfg.dt);
        const double t = static_cast<double>(s) * cfg.dt;
        if (!stepper.finite()) throw Error(ErrorKind::Blowup, "non-finite state at t = " + std::to_string(t), t);
        if (s % cfg.snapshot_stride == 0 || s == steps) record(t);
    }
    return traj;
}

struct ConservationReport {
    double max_c_drift = 0.0;
    double max_d_drift = 0.0;
    double max_mean = 0.0;
};

inline ConservationReport conservation_report(const Trajectory& traj) {
    if (traj.drift_log.size() < 2) throw Error(ErrorKind::InvalidData, "need at least two snapshots");
    ConservationReport r;
    for (const auto& d : traj.drift_log) {
        r.max_c_drift = std::max(r.max_c_drift, d.c_drift);
        r.max_d_drift = std::max(r.max_d_drift, d.d_drift);
        r.max_mean = std::max(r.max_mean, d.mean_abs);
    }
    return r;
}

enum class Sector { left, right };

struct SectorSupremum {
    double t = 0.0;
    double sup = 0.0;
};

struct EnvelopePeak {
    double t = 0.0;
    double x = 0.0;
    double scaled = 0.0;     ///< sqrt(t) |u| at the refined maximum
    double predicted = 0.0;  ///< A1 + A2 at (x, t), when an envelope is supplied
    double ratio = 0.0;
};

struct SectorScan {
    Sector sector = Sector::left;
    double eps = 0.0;
    std::vector<SectorSupremum> suprema;
    std::vector<EnvelopePeak> peaks;
    std::optional<double> decay_exponent; ///< slope of log sup against log t (left sector)
};

struct SectorOptions {
    double xi_max = 1.0;   ///< right window is eps <= x/t <= xi_max
    double t_min = 0.0;    ///< snapshots before t_min are ignored
    std::function<double(double x, double t)> envelope; ///< A1 + A2 prediction, optional
};

/// Local maxima of |u| on indices [lo, hi], refined by a parabola through |u|^2.
inline std::vector<std::pair<double, double>> local_maxima(const ComplexProfile& p, std::size_t lo, std::size_t hi) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = std::max<std::size_t>(lo, 1); i + 1 <= hi && i + 1 < p.n; ++i) {
        const double a = std::norm(p.u[i - 1]), b = std::norm(p.u[i]), c = std::norm(p.u[i + 1]);
        if (!(b > a && b >= c)) continue;
        const double den = a - 2 * b + c;
        const double off = den < 0.0 ? 0.5 * (a - c) / den : 0.0;
        const double peak = b - 0.25 * (a - c) * off;
        out.emplace_back(p.x(i) + off * p.dx, std::sqrt(std::max(peak, b)));
    }
    return out;
}

inline SectorScan sector_scan(const Trajectory& traj, Sector sector, double eps, const SectorOptions& opts = {}) {
    if (!(eps > 0.0)) throw Error(ErrorKind::InvalidData, "eps must be positive");
    SectorScan scan{sector, eps, {}, {}, std::nullopt};
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        const double t = traj.times[s];
        if (t <= 0.0 || t < opts.t_min) continue;
        const auto& p = traj.states[s];
        if (sector == Sector::left) {
            const double edge = -eps * t;
            double sup = -1.0;
            for (std::size_t i = 0; i < p.n && p.x(i) < edge; ++i) sup = std::max(sup, std::abs(p.u[i]));
            if (sup >= 0.0) scan.suprema.push_back({t, sup});
        } else {
            const double a = eps * t, b = opts.xi_max * t;
            std::size_t lo = p.n, hi = 0;
            for (std::size_t i = 0; i < p.n; ++i)
                if (p.x(i) >= a && p.x(i) <= b) {
                    lo = std::min(lo, i);
                    hi = i;
                }
            if (lo > hi) continue;
            double sup = 0.0;
            for (std::size_t i = lo; i <= hi; ++i) sup = std::max(sup, std::abs(p.u[i]));
            scan.suprema.push_back({t, sup});
            for (auto [x, m] : local_maxima(p, lo, hi)) {
                EnvelopePeak pk{t, x, std::sqrt(t) * m, 0.0, 0.0};
                if (opts.envelope) {
                    pk.predicted = opts.envelope(x, t);
                    pk.ratio = pk.predicted > 0.0 ? pk.scaled / pk.predicted : 0.0;
                }
                scan.peaks.push_back(pk);
            }
        }
    }
    if (scan.suprema.empty()) throw Error(ErrorKind::WindowEmpty, "no snapshot has grid points in the sector window");
    if (sector == Sector::left) {
        std::vector<double> lt, ls;
        for (const auto& s : scan.suprema)
            if (s.sup > 0.0) {
                lt.push_back(std::log(s.t));
                ls.push_back(std::log(s.sup));
            }
        if (lt.size() >= 2) scan.decay_exponent = fit_slope(lt, ls);
    }
    return scan;
}

} // namespace csp
