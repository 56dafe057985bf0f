#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fermi/errors.hpp"
#include "fermi/fft.hpp"
#include "fermi/grid.hpp"

namespace fermi {

/// Complex amplitudes of a pure state on a Grid, normalized so that
/// sum |psi_i|^2 dq = 1 and required to vanish (below 1e-8 of the peak
/// magnitude) at both grid edges.
class WaveFunction {
public:
    static constexpr double edge_tolerance = 1e-8;

    WaveFunction(Grid grid, PhysicalConstants constants, CVec amplitudes)
        : grid_(grid), constants_(constants), psi_(std::move(amplitudes)) {
        constants_.validate();
        require(psi_.size() == grid_.size(), ErrorCode::grid_mismatch,
                "amplitude count does not match grid size");
        double norm2 = 0.0;
        for (const auto& a : psi_) norm2 += std::norm(a);
        norm2 *= grid_.spacing();
        require(std::isfinite(norm2), ErrorCode::numerical, "non-finite amplitudes");
        require(std::sqrt(norm2) >= 1e-12, ErrorCode::zero_vector, "wave function has zero norm");
        const double scale = 1.0 / std::sqrt(norm2);
        for (auto& a : psi_) a *= scale;
        check_edges();
    }

    const Grid& grid() const noexcept { return grid_; }
    const PhysicalConstants& constants() const noexcept { return constants_; }
    std::span<const cplx> amplitudes() const noexcept { return psi_; }
    std::size_t size() const noexcept { return psi_.size(); }
    const cplx& operator[](std::size_t i) const { return psi_[i]; }

    double norm() const {
        double s = 0.0;
        for (const auto& a : psi_) s += std::norm(a);
        return std::sqrt(s * grid_.spacing());
    }

    double peak_magnitude() const {
        double peak = 0.0;
        for (const auto& a : psi_) peak = std::max(peak, std::abs(a));
        return peak;
    }

private:
    void check_edges() const {
        const double peak = peak_magnitude();
        const double edge = std::max(std::abs(psi_.front()), std::abs(psi_.back()));
        require(edge < edge_tolerance * peak, ErrorCode::packet_out_of_box,
                "wave function does not vanish at the grid edges (edge/peak = " +
                    std::to_string(edge / peak) + ")");
    }

    Grid grid_;
    PhysicalConstants constants_;
    CVec psi_;
};

struct GaussianParams {
    double q0 = 0.0;
    double p0 = 0.0;
    double delta = 1.0;

    void validate() const {
        require(delta > 0.0 && std::isfinite(delta) && std::isfinite(q0) && std::isfinite(p0),
                ErrorCode::invalid_argument, "Gaussian width delta must be > 0");
    }
};

struct Moments {
    double mean_q = 0.0;
    double mean_p = 0.0;
    double var_q = 0.0;
    double var_p = 0.0;
    double correlation_k = 0.0;

    /// var_q * var_p - K^2; equals hbar^2/4 for every pure Gaussian.
    double uncertainty_product() const { return var_q * var_p - correlation_k * correlation_k; }
};

struct PolarFields {
    std::vector<double> rho;
    std::vector<double> theta;
    std::vector<bool> valid;
};

inline void require_same_space(const WaveFunction& a, const WaveFunction& b) {
    require(a.grid() == b.grid() && a.constants() == b.constants(), ErrorCode::grid_mismatch,
            "wave functions live on different grids or use different constants");
}

/// Inner product <a|b> by grid quadrature.
inline cplx inner_product(const WaveFunction& a, const WaveFunction& b) {
    require_same_space(a, b);
    cplx s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s * a.grid().spacing();
}

/// L2 distance ||a - e^{i gamma} b||. With align_phase the global phase gamma
/// is chosen to minimize the distance, otherwise gamma = 0.
inline double l2_distance(const WaveFunction& a, const WaveFunction& b, bool align_phase = false) {
    require_same_space(a, b);
    cplx phase{1.0, 0.0};
    if (align_phase) {
        const cplx overlap = inner_product(b, a);
        if (std::abs(overlap) > 0.0) phase = overlap / std::abs(overlap);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - phase * b[i]);
    return std::sqrt(s * a.grid().spacing());
}

/// Minimum-uncertainty packet
///   psi(q) = (sqrt(pi) delta)^{-1/2} exp(-(q-q0)^2/(2 delta^2) + i p0 (q-q0)/hbar).
inline WaveFunction gaussian_packet(const GaussianParams& params, const Grid& grid,
                                    const PhysicalConstants& constants) {
    params.validate();
    constants.validate();
    require(params.q0 - 8.0 * params.delta >= grid.q_min() &&
                params.q0 + 8.0 * params.delta <= grid.q_max(),
            ErrorCode::packet_out_of_box, "q0 +/- 8 delta must lie inside the grid");
    const double norm = 1.0 / std::sqrt(std::sqrt(std::numbers::pi) * params.delta);
    CVec psi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.position(i) - params.q0;
        const double envelope = std::exp(-x * x / (2.0 * params.delta * params.delta));
        psi[i] = norm * envelope * std::polar(1.0, params.p0 * x / constants.hbar);
    }
    return WaveFunction(grid, constants, std::move(psi));
}

/// Normalized w1*psi1 + w2*psi2.
inline WaveFunction superpose(const WaveFunction& psi1, const WaveFunction& psi2, cplx w1, cplx w2) {
    require_same_space(psi1, psi2);
    CVec out(psi1.size());
    double norm2 = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = w1 * psi1[i] + w2 * psi2[i];
        norm2 += std::norm(out[i]);
    }
    require(std::sqrt(norm2 * psi1.grid().spacing()) >= 1e-12, ErrorCode::zero_vector,
            "superposition cancels to zero");
    return WaveFunction(psi1.grid(), psi1.constants(), std::move(out));
}

inline double wrap_to_pi(double angle) {
    // maps into (-pi, pi]
    angle = std::remainder(angle, 2.0 * std::numbers::pi);
    if (angle <= -std::numbers::pi) angle += 2.0 * std::numbers::pi;
    return angle;
}

/// psi = rho e^{i theta}. Points with rho below rho_floor_fraction * max(rho)
/// are masked out; theta is unwrapped along each valid run independently and
/// set to 0 on masked points.
inline PolarFields polar_decompose(const WaveFunction& psi, double rho_floor_fraction = 1e-6) {
    require(rho_floor_fraction > 0.0 && rho_floor_fraction <= 0.1, ErrorCode::invalid_argument,
            "rho_floor_fraction must lie in (0, 0.1]");
    const std::size_t n = psi.size();
    PolarFields out{std::vector<double>(n), std::vector<double>(n, 0.0), std::vector<bool>(n)};
    for (std::size_t i = 0; i < n; ++i) out.rho[i] = std::abs(psi[i]);
    const double floor = rho_floor_fraction * *std::max_element(out.rho.begin(), out.rho.end());
    bool previous_valid = false;
    for (std::size_t i = 0; i < n; ++i) {
        out.valid[i] = out.rho[i] >= floor;
        if (!out.valid[i]) {
            previous_valid = false;
            continue;
        }
        const double raw = std::arg(psi[i]);
        out.theta[i] = previous_valid ? out.theta[i - 1] + wrap_to_pi(raw - std::arg(psi[i - 1])) : raw;
        previous_valid = true;
    }
    return out;
}

/// Momentum-space probability density |phi(p)|^2 on the FFT-conjugate grid,
/// sorted by increasing p and normalized so that sum density * dp = 1.
struct MomentumDensity {
    std::vector<double> p;
    std::vector<double> density;
    double dp = 0.0;
};

inline MomentumDensity momentum_density(const WaveFunction& psi) {
    const std::size_t n = psi.size();
    const double dq = psi.grid().spacing();
    const double hbar = psi.constants().hbar;
    FftPlan plan(n);
    CVec spectrum(psi.amplitudes().begin(), psi.amplitudes().end());
    plan.forward(spectrum);
    const auto k = wavenumbers(n, dq);
    MomentumDensity out;
    out.dp = hbar * 2.0 * std::numbers::pi / (static_cast<double>(n) * dq);
    out.p.resize(n);
    out.density.resize(n);
    // fftshift so p ascends: index n/2 is the most negative (Nyquist) bin
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = (j + n / 2) % n;
        out.p[j] = hbar * k[src];
        out.density[j] = std::norm(spectrum[src]);
        total += out.density[j];
    }
    for (auto& d : out.density) d /= total * out.dp;
    return out;
}

/// Probability mass carried by the outer quarter of the momentum grid
/// (|p| > 3/4 of the Nyquist momentum). Large values mean the grid is too coarse.
inline double momentum_tail_mass(const WaveFunction& psi) {
    const auto md = momentum_density(psi);
    const double cutoff = 0.75 * std::abs(md.p.front());
    double tail = 0.0;
    for (std::size_t j = 0; j < md.p.size(); ++j)
        if (std::abs(md.p[j]) > cutoff) tail += md.density[j] * md.dp;
    return tail;
}

/// Mean momentum from the phase-gradient integral  hbar * int rho^2 d_q theta dq,
/// evaluated as hbar * int Im(psi^* d_q psi) dq with a spectral derivative.
inline double mean_momentum_phase_gradient(const WaveFunction& psi) {
    const auto d = spectral_derivatives(psi.amplitudes(), psi.grid().spacing());
    double s = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) s += std::imag(std::conj(psi[i]) * d.first[i]);
    return psi.constants().hbar * s * psi.grid().spacing();
}

inline Moments moments(const WaveFunction& psi) {
    const Grid& g = psi.grid();
    const double dq = g.spacing();
    const double hbar = psi.constants().hbar;
    const double norm2 = psi.norm() * psi.norm();

    Moments m;
    for (std::size_t i = 0; i < psi.size(); ++i) m.mean_q += g.position(i) * std::norm(psi[i]);
    m.mean_q *= dq / norm2;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double x = g.position(i) - m.mean_q;
        m.var_q += x * x * std::norm(psi[i]);
    }
    m.var_q *= dq / norm2;

    // rho^2 d_q theta = Im(psi^* psi')
    const auto d = spectral_derivatives(psi.amplitudes(), dq);
    double flux = 0.0;
    double q_flux = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double j = std::imag(std::conj(psi[i]) * d.first[i]);
        flux += j;
        q_flux += g.position(i) * j;
    }
    m.mean_p = hbar * flux * dq / norm2;
    m.correlation_k = hbar * q_flux * dq / norm2 - m.mean_q * m.mean_p;

    const auto md = momentum_density(psi);
    double p1 = 0.0;
    double p2 = 0.0;
    for (std::size_t j = 0; j < md.p.size(); ++j) {
        p1 += md.p[j] * md.density[j];
        p2 += md.p[j] * md.p[j] * md.density[j];
    }
    p1 *= md.dp;
    p2 *= md.dp;
    m.var_p = p2 - p1 * p1;
    return m;
}

}  // namespace fermi
