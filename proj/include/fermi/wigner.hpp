#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "fermi/errors.hpp"
#include "fermi/fft.hpp"
#include "fermi/wavefunction.hpp"

namespace fermi {

/// Real field sampled on a (q, p) lattice, stored row-major with q as the
/// slow index: values[iq * p.size() + ip].
struct PhaseSpaceField {
    std::vector<double> q;
    std::vector<double> p;
    std::vector<double> values;

    std::size_t n_q() const noexcept { return q.size(); }
    std::size_t n_p() const noexcept { return p.size(); }
    double dq() const { return q[1] - q[0]; }
    double dp() const { return p[1] - p[0]; }
    double cell_diagonal() const { return std::hypot(dq(), dp()); }
    double at(std::size_t iq, std::size_t ip) const { return values[iq * n_p() + ip]; }

    double max_value() const { return *std::max_element(values.begin(), values.end()); }
    double min_value() const { return *std::min_element(values.begin(), values.end()); }

    double integral() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * dq() * dp();
    }

    /// int W dp at each q.
    std::vector<double> q_marginal() const {
        std::vector<double> out(n_q(), 0.0);
        for (std::size_t i = 0; i < n_q(); ++i)
            for (std::size_t j = 0; j < n_p(); ++j) out[i] += at(i, j);
        for (auto& v : out) v *= dp();
        return out;
    }

    /// int W dq at each p.
    std::vector<double> p_marginal() const {
        std::vector<double> out(n_p(), 0.0);
        for (std::size_t i = 0; i < n_q(); ++i)
            for (std::size_t j = 0; j < n_p(); ++j) out[j] += at(i, j);
        for (auto& v : out) v *= dq();
        return out;
    }
};

namespace detail {

/// Band-limited interpolation onto a grid twice as fine (exact for
/// periodic band-limited samples). Output index 2i coincides with input i.
inline CVec upsample_twice(std::span<const cplx> psi) {
    const std::size_t n = psi.size();
    FftPlan small(n);
    FftPlan large(2 * n);
    CVec spectrum(psi.begin(), psi.end());
    small.forward(spectrum);
    CVec padded(2 * n);
    for (std::size_t j = 0; j < n / 2; ++j) padded[j] = spectrum[j];
    for (std::size_t j = n / 2 + 1; j < n; ++j) padded[j + n] = spectrum[j];
    // split the Nyquist bin between +k and -k
    padded[n / 2] = 0.5 * spectrum[n / 2];
    padded[n / 2 + n] = 0.5 * spectrum[n / 2];
    large.inverse(padded);
    for (auto& v : padded) v *= 2.0;
    return padded;
}

}  // namespace detail

/// rho_W(q, p) = (1 / pi hbar) int psi^*(q + y) psi(q - y) e^{2 i p y / hbar} dy
/// on the wave function's q grid and n_p momenta spanning [-pi hbar/dq, pi hbar/dq).
/// The offsets y run over half-grid steps; psi at the half points comes from
/// spectral interpolation and is taken as zero beyond the grid.
inline PhaseSpaceField wigner_transform(const WaveFunction& psi, std::size_t n_p,
                                        std::vector<std::string>* warnings = nullptr) {
    require(n_p >= 4 && (n_p & (n_p - 1)) == 0, ErrorCode::invalid_argument, "n_p must be a power of two");
    const std::size_t n = psi.size();
    const double dq = psi.grid().spacing();
    const double hbar = psi.constants().hbar;
    if (warnings != nullptr) {
        const double tail = momentum_tail_mass(psi);
        if (tail > 1e-8) warnings->push_back("aliasing: momentum tail mass " + std::to_string(tail));
    }

    const CVec fine = detail::upsample_twice(psi.amplitudes());
    const auto fine_n = static_cast<long>(fine.size());
    auto sample = [&](long idx) { return (idx >= 0 && idx < fine_n) ? fine[static_cast<std::size_t>(idx)] : cplx{}; };

    PhaseSpaceField field;
    field.q.resize(n);
    field.p.resize(n_p);
    field.values.resize(n * n_p);
    const double dp = 2.0 * std::numbers::pi * hbar / (static_cast<double>(n_p) * dq);
    const auto half = static_cast<long>(n_p / 2);
    for (std::size_t l = 0; l < n_p; ++l) field.p[l] = (static_cast<double>(l) - static_cast<double>(half)) * dp;

    FftPlan plan(n_p);
    CVec row(n_p);
    const double prefactor = dq / (2.0 * std::numbers::pi * hbar) * static_cast<double>(n_p);
    double max_abs = 0.0;
    double max_imag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        field.q[i] = psi.grid().position(i);
        const long centre = 2 * static_cast<long>(i);
        for (long m = -half; m < half; ++m) {
            cplx c = std::conj(sample(centre + m)) * sample(centre - m);
            // m = -n_p/2 and its missing partner +n_p/2 alias onto one bin
            if (m == -half) c = cplx(std::real(c), 0.0);
            row[static_cast<std::size_t>((m + static_cast<long>(n_p)) % static_cast<long>(n_p))] = c;
        }
        plan.inverse(row);
        for (std::size_t l = 0; l < n_p; ++l) {
            const cplx w = prefactor * row[(l + n_p / 2) % n_p];
            field.values[i * n_p + l] = std::real(w);
            max_abs = std::max(max_abs, std::abs(std::real(w)));
            max_imag = std::max(max_imag, std::abs(std::imag(w)));
        }
    }
    require(max_imag <= 1e-10 * std::max(max_abs, 1.0), ErrorCode::numerical,
            "Wigner transform left an imaginary residue of " + std::to_string(max_imag));
    return field;
}

}  // namespace fermi
