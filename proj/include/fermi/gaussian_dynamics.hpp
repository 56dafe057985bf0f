#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <variant>
#include <vector>

#include "fermi/ellipse.hpp"
#include "fermi/errors.hpp"
#include "fermi/grid.hpp"
#include "fermi/wavefunction.hpp"

namespace fermi {

struct FreeParticle {};

/// V(q) = -force * q
struct UniformForce {
    double force = 0.0;
};

/// V(q) = m omega0^2 q^2 / 2
struct HarmonicOscillator {
    double omega0 = 1.0;
};

using SystemSpec = std::variant<FreeParticle, UniformForce, HarmonicOscillator>;

inline void validate(const SystemSpec& system) {
    if (const auto* h = std::get_if<HarmonicOscillator>(&system))
        require(h->omega0 > 0.0 && std::isfinite(h->omega0), ErrorCode::invalid_argument,
                "omega0 must be positive");
    if (const auto* u = std::get_if<UniformForce>(&system))
        require(std::isfinite(u->force), ErrorCode::invalid_argument, "force must be finite");
}

inline double potential(const SystemSpec& system, double q, const PhysicalConstants& constants) {
    if (const auto* u = std::get_if<UniformForce>(&system)) return -u->force * q;
    if (const auto* h = std::get_if<HarmonicOscillator>(&system))
        return 0.5 * constants.mass * h->omega0 * h->omega0 * q * q;
    return 0.0;
}

/// Harmonic-oscillator Gaussian family
///   psi = N(t) exp(-A(t)/2 (q - Q(t))^2 + i chi(q, t)),  Q(t) = Q0 cos(omega0 t + phi).
struct HarmonicGaussianParams {
    double alpha = 1.0;
    double q_amplitude = 0.0;  // Q0
    double phase = 0.0;        // phi

    /// B = hbar^2 alpha^4 / (m^2 omega0^2); B = 1 is the coherent state.
    double squeeze(double omega0, const PhysicalConstants& c) const {
        const double a2 = alpha * alpha;
        return c.hbar * c.hbar * a2 * a2 / (c.mass * c.mass * omega0 * omega0);
    }

    static HarmonicGaussianParams from_squeeze(double squeeze_b, double q_amplitude, double phase,
                                               double omega0, const PhysicalConstants& c) {
        require(squeeze_b > 0.0, ErrorCode::invalid_argument, "B must be positive");
        const double alpha = std::pow(squeeze_b * c.mass * c.mass * omega0 * omega0 / (c.hbar * c.hbar), 0.25);
        return {alpha, q_amplitude, phase};
    }

    void validate() const {
        require(alpha > 0.0 && std::isfinite(alpha) && std::isfinite(q_amplitude) && std::isfinite(phase),
                ErrorCode::invalid_argument, "alpha must be positive");
    }
};

using PacketParams = std::variant<GaussianParams, HarmonicGaussianParams>;

namespace detail {

struct HarmonicShape {
    double c;       // C(t)
    double s;       // S(t)
    double b;       // B
    double a_re;    // A_r
    double a_im;    // A_i
    double angle;   // omega0 t + phi
};

inline HarmonicShape harmonic_shape(const HarmonicGaussianParams& p, double omega0, double t,
                                    const PhysicalConstants& k) {
    HarmonicShape h{};
    h.angle = omega0 * t + p.phase;
    h.c = std::cos(h.angle);
    h.s = std::sin(h.angle);
    h.b = p.squeeze(omega0, k);
    const double denom = k.hbar * (h.c * h.c + h.b * h.s * h.s);
    h.a_re = k.mass * omega0 * std::sqrt(h.b) / denom;
    h.a_im = k.mass * omega0 * (1.0 - h.b) * h.c * h.s / denom;
    return h;
}

inline void check_box(double center, double half_extent, const Grid& grid) {
    require(center - half_extent >= grid.q_min() && center + half_extent <= grid.q_max(),
            ErrorCode::packet_out_of_box, "evolved packet (center " + std::to_string(center) +
                                              ", 8-width " + std::to_string(half_extent) +
                                              ") does not fit in the grid");
}

}  // namespace detail

/// Closed-form uniformly accelerated packet; force = 0 reduces to free flight.
inline WaveFunction evolve_uniform_force(const GaussianParams& params, double force, double t,
                                         const Grid& grid, const PhysicalConstants& k) {
    params.validate();
    k.validate();
    const double m = k.mass;
    const double hbar = k.hbar;
    const double delta = params.delta;
    const double tau = hbar * t / (m * delta * delta);
    const double center = params.q0 + params.p0 * t / m + force * t * t / (2.0 * m);
    detail::check_box(center, 8.0 * delta * std::sqrt(1.0 + tau * tau), grid);

    const cplx spread{1.0, tau};
    const cplx norm = 1.0 / std::sqrt(std::sqrt(std::numbers::pi) * spread * delta);
    CVec psi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double q = grid.position(i);
        const double x = q - center;
        const double extra_phase =
            force * q * t - force * params.p0 * t * t / (2.0 * m) - force * force * t * t * t / (6.0 * m);
        const double phase =
            (params.p0 * (q - params.q0) - params.p0 * params.p0 * t / (2.0 * m) + extra_phase) / hbar;
        psi[i] = norm * std::exp(-x * x / (2.0 * delta * delta * spread) + cplx(0.0, phase));
    }
    return WaveFunction(grid, k, std::move(psi));
}

inline WaveFunction evolve_free(const GaussianParams& params, double t, const Grid& grid,
                                const PhysicalConstants& k) {
    return evolve_uniform_force(params, 0.0, t, grid, k);
}

/// Harmonic Gaussian at time t. The square root in N(t) follows the continuous
/// branch of arg(C + i sqrt(B) S), which winds once per period, so the state
/// picks up the physical -1 after each full period.
inline WaveFunction harmonic_state(const HarmonicGaussianParams& params, double omega0, double t,
                                   const Grid& grid, const PhysicalConstants& k) {
    params.validate();
    k.validate();
    require(omega0 > 0.0, ErrorCode::invalid_argument, "omega0 must be positive");
    const auto h = detail::harmonic_shape(params, omega0, t, k);
    const double m = k.mass;
    const double hbar = k.hbar;

    // widest |psi| over all phases: A_r is smallest at C^2 + B S^2 = max(1, B)
    const double min_a_re = m * omega0 * std::sqrt(h.b) / (hbar * std::max(1.0, h.b));
    const double extent = 8.0 / std::sqrt(min_a_re);
    detail::check_box(0.0, std::abs(params.q_amplitude) + extent, grid);

    const double turns = std::floor((h.angle + std::numbers::pi) / (2.0 * std::numbers::pi));
    const double reduced = h.angle - 2.0 * std::numbers::pi * turns;
    const double winding = std::atan2(std::sqrt(h.b) * std::sin(reduced), std::cos(reduced)) +
                           2.0 * std::numbers::pi * turns;
    const double modulus = std::hypot(h.c, std::sqrt(h.b) * h.s);
    const cplx norm = std::sqrt(params.alpha / std::sqrt(std::numbers::pi)) / std::sqrt(modulus) *
                      std::polar(1.0, -0.5 * winding);

    const cplx a{h.a_re, h.a_im};
    const double center = params.q_amplitude * h.c;
    const double q0 = params.q_amplitude;
    CVec psi(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double q = grid.position(i);
        const double x = q - center;
        const double chi = -(omega0 * m / hbar) * q0 * q * h.s + (m * omega0 / (2.0 * hbar)) * q0 * q0 * h.c * h.s;
        psi[i] = norm * std::exp(-0.5 * a * x * x + cplx(0.0, chi));
    }
    return WaveFunction(grid, k, std::move(psi));
}

/// Closed-form state for any (system, params) pair the module knows.
inline WaveFunction closed_form_state(const SystemSpec& system, const PacketParams& params, double t,
                                      const Grid& grid, const PhysicalConstants& k) {
    validate(system);
    if (const auto* h = std::get_if<HarmonicOscillator>(&system)) {
        const auto* hp = std::get_if<HarmonicGaussianParams>(&params);
        require(hp != nullptr, ErrorCode::invalid_argument, "harmonic system needs harmonic parameters");
        return harmonic_state(*hp, h->omega0, t, grid, k);
    }
    const auto* gp = std::get_if<GaussianParams>(&params);
    require(gp != nullptr, ErrorCode::invalid_argument, "free/uniform systems need Gaussian parameters");
    const double force = std::holds_alternative<UniformForce>(system) ? std::get<UniformForce>(system).force : 0.0;
    return evolve_uniform_force(*gp, force, t, grid, k);
}

inline EllipseCoeffs analytic_ellipse(const SystemSpec& system, const PacketParams& params, double t,
                                      const PhysicalConstants& k) {
    validate(system);
    k.validate();
    const double m = k.mass;
    const double hbar = k.hbar;
    if (const auto* osc = std::get_if<HarmonicOscillator>(&system)) {
        const auto* hp = std::get_if<HarmonicGaussianParams>(&params);
        require(hp != nullptr, ErrorCode::invalid_argument, "harmonic system needs harmonic parameters");
        const auto h = detail::harmonic_shape(*hp, osc->omega0, t, k);
        return EllipseCoeffs{(h.a_re * h.a_re + h.a_im * h.a_im) / h.a_re, 1.0 / (hbar * hbar * h.a_re),
                             h.a_im / (hbar * h.a_re), hp->q_amplitude * h.c,
                             -m * osc->omega0 * hp->q_amplitude * h.s};
    }
    const auto* gp = std::get_if<GaussianParams>(&params);
    require(gp != nullptr, ErrorCode::invalid_argument, "free/uniform systems need Gaussian parameters");
    gp->validate();
    const double d2 = gp->delta * gp->delta;
    const double tau = hbar * t / (m * d2);
    const double force = std::holds_alternative<UniformForce>(system) ? std::get<UniformForce>(system).force : 0.0;
    return EllipseCoeffs{1.0 / d2, d2 / (hbar * hbar) * (1.0 + tau * tau), -t / (m * d2),
                         gp->q0 + gp->p0 * t / m + force * t * t / (2.0 * m), gp->p0 + force * t};
}

inline Moments analytic_moments(const SystemSpec& system, const PacketParams& params, double t,
                                const PhysicalConstants& k) {
    validate(system);
    k.validate();
    const double m = k.mass;
    const double hbar = k.hbar;
    if (const auto* osc = std::get_if<HarmonicOscillator>(&system)) {
        const auto* hp = std::get_if<HarmonicGaussianParams>(&params);
        require(hp != nullptr, ErrorCode::invalid_argument, "harmonic system needs harmonic parameters");
        const auto h = detail::harmonic_shape(*hp, osc->omega0, t, k);
        return Moments{hp->q_amplitude * h.c, -m * osc->omega0 * hp->q_amplitude * h.s, 1.0 / (2.0 * h.a_re),
                       hbar * hbar * (h.a_re * h.a_re + h.a_im * h.a_im) / (2.0 * h.a_re),
                       -hbar * (1.0 - h.b) * h.c * h.s / (2.0 * std::sqrt(h.b))};
    }
    const auto* gp = std::get_if<GaussianParams>(&params);
    require(gp != nullptr, ErrorCode::invalid_argument, "free/uniform systems need Gaussian parameters");
    gp->validate();
    const double d2 = gp->delta * gp->delta;
    const double tau = hbar * t / (m * d2);
    const double force = std::holds_alternative<UniformForce>(system) ? std::get<UniformForce>(system).force : 0.0;
    return Moments{gp->q0 + gp->p0 * t / m + force * t * t / (2.0 * m), gp->p0 + force * t,
                   0.5 * d2 * (1.0 + tau * tau), hbar * hbar / (2.0 * d2), hbar * hbar * t / (2.0 * m * d2)};
}

/// Locus of the ellipse center under a uniform force:
///   q = q0 + p0 (p - p0)/(m F0) + (p - p0)^2 / (2 m F0).
inline std::vector<PhasePoint> center_parabola(const GaussianParams& params, double force,
                                               const PhysicalConstants& k, const std::vector<double>& p_samples) {
    require(force != 0.0, ErrorCode::zero_force, "center parabola needs a non-zero force");
    k.validate();
    std::vector<PhasePoint> out;
    out.reserve(p_samples.size());
    for (double p : p_samples) {
        const double dp = p - params.p0;
        out.push_back({params.q0 + params.p0 * dp / (k.mass * force) + dp * dp / (2.0 * k.mass * force), p});
    }
    return out;
}

}  // namespace fermi
