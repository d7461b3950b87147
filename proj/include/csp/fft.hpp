#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace csp {

using cd = std::complex<double>;

namespace detail {

// Planner calls are not thread-safe in FFTW; execution on new arrays is.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::vector<cd> a(n), b(n);
        auto plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(a.data()),
                                     reinterpret_cast<fftw_complex*>(b.data()), sign,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

inline void execute(std::span<const cd> in, std::span<cd> out, int sign) {
    auto plan = PlanCache::instance().get(static_cast<int>(in.size()), sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cd*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

} // namespace detail

/// Unnormalised forward DFT.
inline std::vector<cd> fft(std::span<const cd> in) {
    std::vector<cd> out(in.size());
    detail::execute(in, out, FFTW_FORWARD);
    return out;
}

/// Normalised inverse DFT.
inline std::vector<cd> ifft(std::span<const cd> in) {
    std::vector<cd> out(in.size());
    detail::execute(in, out, FFTW_BACKWARD);
    const double s = 1.0 / static_cast<double>(in.size());
    for (auto& v : out) v *= s;
    return out;
}

/// Angular wavenumbers in FFT order for n samples of spacing dx.
inline std::vector<double> wavenumbers(std::size_t n, double dx) {
    std::vector<double> q(n);
    const double base = 2.0 * 3.14159265358979323846 / (static_cast<double>(n) * dx);
    for (std::size_t j = 0; j < n; ++j) {
        auto s = static_cast<long>(j);
        if (j > n / 2) s -= static_cast<long>(n);
        q[j] = base * static_cast<double>(s);
    }
    return q;
}

/// Spectral interpolation of periodic samples onto a grid refined by `factor`.
inline std::vector<cd> refine(std::span<const cd> u, std::size_t factor) {
    const std::size_t n = u.size(), N = n * factor;
    auto U = fft(u);
    std::vector<cd> V(N, cd{});
    const std::size_t half = n / 2;
    for (std::size_t j = 0; j < half; ++j) V[j] = U[j];
    for (std::size_t j = half + 1; j < n; ++j) V[N - n + j] = U[j];
    if (n % 2 == 0) {
        // split the Nyquist mode symmetrically
        V[half] = 0.5 * U[half];
        V[N - half] = 0.5 * U[half];
    } else {
        V[half] = U[half];
    }
    auto v = ifft(V);
    for (auto& z : v) z *= static_cast<double>(factor);
    return v;
}

} // namespace csp
