#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace slowdyn::detail {

// Plans are cached per grid size and created with FFTW_ESTIMATE so the chosen
// algorithm is deterministic. FFTW_UNALIGNED lets the cached plans run on any
// caller buffer through the new-array execute interface, which is thread-safe
// once the plan exists; plan creation itself is serialized here.
struct FftPlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

inline const FftPlanPair& plans_for(int nx, int ny) {
    static std::map<std::pair<int, int>, FftPlanPair> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(nx, ny);
    auto it = cache.find(key);
    if (it == cache.end()) {
        std::vector<std::complex<double>> a(static_cast<size_t>(nx) * ny);
        std::vector<std::complex<double>> b(a.size());
        auto* pa = reinterpret_cast<fftw_complex*>(a.data());
        auto* pb = reinterpret_cast<fftw_complex*>(b.data());
        FftPlanPair p;
        p.fwd = fftw_plan_dft_2d(nx, ny, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        p.bwd = fftw_plan_dft_2d(nx, ny, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        it = cache.emplace(key, p).first;
    }
    return it->second;
}

/// Unnormalized forward 2D DFT (sign -1 exponent), out-of-place; in != out.
inline void fft2_forward(int nx, int ny, const std::complex<double>* in, std::complex<double>* out) {
    const FftPlanPair& p = plans_for(nx, ny);
    fftw_execute_dft(p.fwd,
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

/// Unnormalized backward 2D DFT (sign +1 exponent), out-of-place; in != out.
inline void fft2_backward(int nx, int ny, const std::complex<double>* in, std::complex<double>* out) {
    const FftPlanPair& p = plans_for(nx, ny);
    fftw_execute_dft(p.bwd,
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

} // namespace slowdyn::detail
