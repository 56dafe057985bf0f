#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include <fftw3.h>

#include "fermi/errors.hpp"

namespace fermi {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

namespace detail {

// The FFTW planner is not re-entrant; execution through the new-array
// interface is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace detail

/// Owns a forward/backward FFTW plan pair for one transform length.
/// Plans are created with FFTW_ESTIMATE | FFTW_UNALIGNED so results do not
/// depend on buffer alignment or timing, which keeps runs bit-reproducible.
class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n) {
        require(n > 0, ErrorCode::invalid_argument, "FFT length must be positive");
        CVec scratch(n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        std::lock_guard lock(detail::fftw_planner_mutex());
        forward_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
        backward_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    }

    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    ~FftPlan() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    std::size_t size() const noexcept { return n_; }

    /// Unnormalized forward transform, in place: X_k = sum_j x_j e^{-2 pi i jk/n}.
    void forward(std::span<cplx> data) const { execute(forward_, data); }

    /// Inverse transform including the 1/n factor.
    void inverse(std::span<cplx> data) const {
        execute(backward_, data);
        const double scale = 1.0 / static_cast<double>(n_);
        for (auto& v : data) v *= scale;
    }

private:
    void execute(fftw_plan plan, std::span<cplx> data) const {
        require(data.size() == n_, ErrorCode::invalid_argument, "FFT buffer length mismatch");
        auto* buf = reinterpret_cast<fftw_complex*>(data.data());
        fftw_execute_dft(plan, buf, buf);
    }

    std::size_t n_;
    fftw_plan forward_{};
    fftw_plan backward_{};
};

/// Angular wavenumbers in FFT order for n samples spaced dq apart.
/// The Nyquist bin (n/2) is reported with a negative sign.
inline std::vector<double> wavenumbers(std::size_t n, double dq) {
    std::vector<double> k(n);
    const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * dq);
    for (std::size_t j = 0; j < n; ++j) {
        const auto signed_j = j < n / 2 ? static_cast<double>(j)
                                        : static_cast<double>(j) - static_cast<double>(n);
        k[j] = signed_j * dk;
    }
    return k;
}

struct SpectralDerivatives {
    CVec first;
    CVec second;
};

/// First and second derivatives of a periodic, band-limited sample vector.
/// The Nyquist mode is dropped from the odd derivative so that real input
/// gives real output.
inline SpectralDerivatives spectral_derivatives(std::span<const cplx> f, double dq) {
    const std::size_t n = f.size();
    FftPlan plan(n);
    CVec spectrum(f.begin(), f.end());
    plan.forward(spectrum);
    const auto k = wavenumbers(n, dq);
    SpectralDerivatives out{CVec(n), CVec(n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.first[j] = (j == n / 2) ? cplx{} : cplx(0.0, k[j]) * spectrum[j];
        out.second[j] = -k[j] * k[j] * spectrum[j];
    }
    plan.inverse(out.first);
    plan.inverse(out.second);
    return out;
}

}  // namespace fermi
