#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "fermi/errors.hpp"
#include "fermi/fft.hpp"
#include "fermi/gaussian_dynamics.hpp"
#include "fermi/wavefunction.hpp"

namespace fermi {

struct PropagationPlan {
    SystemSpec system;
    double dt = 1e-3;
    std::size_t n_steps = 0;
};

struct PropagationDiagnostics {
    double norm_drift = 0.0;  // | ||psi(t)|| - 1 | before renormalization
    std::vector<std::string> warnings;
};

/// <H> = <p^2>/2m + <V>, kinetic part evaluated in momentum space.
inline double energy(const WaveFunction& psi, const SystemSpec& system) {
    const auto& k = psi.constants();
    const auto md = momentum_density(psi);
    double kinetic = 0.0;
    for (std::size_t j = 0; j < md.p.size(); ++j) kinetic += md.p[j] * md.p[j] * md.density[j];
    kinetic *= md.dp / (2.0 * k.mass);
    double pot = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i)
        pot += potential(system, psi.grid().position(i), k) * std::norm(psi[i]);
    return kinetic + pot * psi.grid().spacing();
}

namespace detail {

inline void propagation_warnings(const WaveFunction& psi, double dt, PropagationDiagnostics* diag) {
    if (diag == nullptr) return;
    const auto& k = psi.constants();
    const double dq = psi.grid().spacing();
    if (std::abs(dt) > 0.01 * k.mass * dq * dq / k.hbar)
        diag->warnings.push_back("time step " + std::to_string(dt) + " exceeds 0.01 m dq^2 / hbar");
    const double tail = momentum_tail_mass(psi);
    if (tail > 1e-8) diag->warnings.push_back("aliasing: momentum tail mass " + std::to_string(tail));
}

}  // namespace detail

/// Strang-split spectral propagation: each step applies exp(-i V dt / 2hbar),
/// the exact kinetic factor exp(-i hbar k^2 dt / 2m) in Fourier space, and the
/// second potential half step. Adjacent potential half steps are fused.
inline WaveFunction propagate(const WaveFunction& psi0, const PropagationPlan& plan,
                              PropagationDiagnostics* diag = nullptr) {
    validate(plan.system);
    require(plan.dt != 0.0 && std::isfinite(plan.dt), ErrorCode::invalid_argument, "dt must be non-zero");
    if (plan.n_steps == 0) return psi0;

    const Grid& grid = psi0.grid();
    const auto& k = psi0.constants();
    const std::size_t n = grid.size();
    detail::propagation_warnings(psi0, plan.dt, diag);

    CVec half_kick(n);
    CVec full_kick(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = potential(plan.system, grid.position(i), k);
        half_kick[i] = std::polar(1.0, -v * plan.dt / (2.0 * k.hbar));
        full_kick[i] = std::polar(1.0, -v * plan.dt / k.hbar);
    }
    const auto kk = wavenumbers(n, grid.spacing());
    CVec drift(n);
    for (std::size_t j = 0; j < n; ++j)
        drift[j] = std::polar(1.0, -k.hbar * kk[j] * kk[j] * plan.dt / (2.0 * k.mass));

    FftPlan fft(n);
    CVec psi(psi0.amplitudes().begin(), psi0.amplitudes().end());
    for (std::size_t i = 0; i < n; ++i) psi[i] *= half_kick[i];
    for (std::size_t step = 0; step < plan.n_steps; ++step) {
        fft.forward(psi);
        for (std::size_t j = 0; j < n; ++j) psi[j] *= drift[j];
        fft.inverse(psi);
        const CVec& kick = (step + 1 == plan.n_steps) ? half_kick : full_kick;
        for (std::size_t i = 0; i < n; ++i) psi[i] *= kick[i];
    }

    double norm2 = 0.0;
    for (const auto& a : psi) norm2 += std::norm(a);
    WaveFunction out(grid, k, std::move(psi));
    if (diag != nullptr) {
        diag->norm_drift = std::abs(std::sqrt(norm2 * grid.spacing()) - 1.0);
        const double tail = momentum_tail_mass(out);
        if (tail > 1e-8) diag->warnings.push_back("aliasing at end: momentum tail mass " + std::to_string(tail));
    }
    return out;
}

/// States at each requested time, obtained by propagating psi0 (taken to be
/// the state at t = 0) forward or backward. Each leg between consecutive
/// targets uses the smallest number of equal steps no longer than max_dt.
inline std::vector<WaveFunction> propagate_to_times(const WaveFunction& psi0, const SystemSpec& system,
                                                    const std::vector<double>& times, double max_dt,
                                                    PropagationDiagnostics* diag = nullptr) {
    require(max_dt > 0.0, ErrorCode::invalid_argument, "max_dt must be positive");
    std::vector<WaveFunction> out;
    out.reserve(times.size());
    WaveFunction current = psi0;
    double t_current = 0.0;
    for (double target : times) {
        // restart from psi0 when the target is t = 0 or lies on the other side of it
        if (t_current != 0.0 && (target == 0.0 || (target > 0.0) != (t_current > 0.0))) {
            current = psi0;
            t_current = 0.0;
        }
        const double leg = target - t_current;
        if (leg != 0.0) {
            const auto steps = static_cast<std::size_t>(std::ceil(std::abs(leg) / max_dt - 1e-9));
            PropagationPlan plan{system, leg / static_cast<double>(steps), steps};
            PropagationDiagnostics leg_diag;
            current = propagate(current, plan, diag ? &leg_diag : nullptr);
            if (diag) {
                diag->norm_drift = std::max(diag->norm_drift, leg_diag.norm_drift);
                diag->warnings.insert(diag->warnings.end(), leg_diag.warnings.begin(), leg_diag.warnings.end());
            }
            t_current = target;
        }
        out.push_back(current);
    }
    return out;
}

}  // namespace fermi
