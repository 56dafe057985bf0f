#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "fermi/ellipse.hpp"
#include "fermi/errors.hpp"
#include "fermi/wavefunction.hpp"

namespace fermi {

// ---------------------------------------------------------------------------
// Compton kinematics (non-relativistic particle, photon probe)
//
//   h nu0 + m c^2 beta0^2 / 2       = h nu + m c^2 beta^2 / 2
//   h nu0 - m c^2 beta0             = h nu cos(theta) + m c^2 beta cos(phi)
//   h nu sin(theta) - m c^2 beta sin(phi) = 0
//
// With phi fixed, eliminating beta and theta leaves one equation F(nu, beta0) = 0.
// ---------------------------------------------------------------------------

struct ComptonConfig {
    double nu0 = 1.0;
    double phi = std::numbers::pi / 4.0;
    double mass = 1.0;
    double speed_of_light = 1.0;
    double planck_h = 1.0;

    void validate() const {
        require(nu0 > 0.0 && mass > 0.0 && speed_of_light > 0.0 && planck_h > 0.0, ErrorCode::invalid_argument,
                "Compton constants must be positive");
        require(phi > 0.0 && phi < std::numbers::pi, ErrorCode::invalid_argument, "phi must lie in (0, pi)");
    }

    /// h nu0 / (m c^2)
    double photon_fraction() const { return planck_h * nu0 / (mass * speed_of_light * speed_of_light); }
};

struct ComptonSolution {
    double nu = 0.0;
    double beta = 0.0;
    double theta = 0.0;
};

inline constexpr double max_nonrelativistic_beta = 0.05;

/// Relative residual of each conservation law: |lhs - rhs| over the largest
/// term magnitude in that equation.
inline std::array<double, 3> compton_residuals(const ComptonConfig& cfg, double beta0, const ComptonSolution& s) {
    const double mc2 = cfg.mass * cfg.speed_of_light * cfg.speed_of_light;
    const double e0 = cfg.planck_h * cfg.nu0;
    const double e = cfg.planck_h * s.nu;
    auto rel = [](double diff, std::initializer_list<double> terms) {
        double scale = 0.0;
        for (double t : terms) scale = std::max(scale, std::abs(t));
        return scale > 0.0 ? std::abs(diff) / scale : std::abs(diff);
    };
    const double k0 = 0.5 * mc2 * beta0 * beta0;
    const double k1 = 0.5 * mc2 * s.beta * s.beta;
    const double px_photon = e * std::cos(s.theta);
    const double px_particle = mc2 * s.beta * std::cos(cfg.phi);
    const double py_photon = e * std::sin(s.theta);
    const double py_particle = mc2 * s.beta * std::sin(cfg.phi);
    return {rel(e0 + k0 - e - k1, {e0, k0, e, k1}),
            rel(e0 - mc2 * beta0 - px_photon - px_particle, {e0, mc2 * beta0, px_photon, px_particle}),
            rel(py_photon - py_particle, {py_photon, py_particle})};
}

namespace detail {

// F in units of (m c^2)^2 as a function of the fractional energy loss u = 1 - nu/nu0.
inline double compton_function(double eps0, double cos_phi, double beta0, double u) {
    const double beta_sq = beta0 * beta0 + 2.0 * eps0 * u;
    const double beta = std::sqrt(std::max(beta_sq, 0.0));
    const double x = eps0 - beta0;
    const double e = eps0 * (1.0 - u);
    return e * e - x * x + 2.0 * x * beta * cos_phi - beta_sq;
}

/// Every non-trivial root u of F on the bracket nu in (0, nu0 (1 + 10|beta0|)].
inline std::vector<double> compton_roots(const ComptonConfig& cfg, double beta0) {
    const double eps0 = cfg.photon_fraction();
    const double cos_phi = std::cos(cfg.phi);
    double u_lo = -10.0 * std::abs(beta0) - 1e-12;
    u_lo = std::max(u_lo, -beta0 * beta0 / (2.0 * eps0));  // keeps beta^2 >= 0
    const double u_hi = 1.0 - 1e-15;                       // nu > 0

    std::vector<double> samples;
    constexpr int uniform = 2048;
    for (int k = 0; k <= uniform; ++k) samples.push_back(u_lo + (u_hi - u_lo) * k / uniform);
    for (int e = 1; e <= 15; ++e) {
        const double v = std::pow(10.0, -e);
        if (v > u_lo && v < u_hi) samples.push_back(v);
        if (-v > u_lo && -v < u_hi) samples.push_back(-v);
    }
    std::sort(samples.begin(), samples.end());

    auto f = [&](double u) { return compton_function(eps0, cos_phi, beta0, u); };
    std::vector<double> roots;
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
        double a = samples[k];
        double b = samples[k + 1];
        double fa = f(a);
        const double fb = f(b);
        if (fa == 0.0) {
            roots.push_back(a);
            continue;
        }
        if ((fa < 0.0) == (fb < 0.0) || fb == 0.0) continue;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            const double fm = f(mid);
            if (fm == 0.0) {
                a = b = mid;
                break;
            }
            if ((fm < 0.0) == (fa < 0.0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        roots.push_back(0.5 * (a + b));
    }
    if (f(samples.back()) == 0.0) roots.push_back(samples.back());
    // drop the no-interaction branch (nu = nu0, beta = beta0 = 0)
    if (beta0 == 0.0) std::erase_if(roots, [](double u) { return std::abs(u) <= 1e-12; });
    return roots;
}

}  // namespace detail

/// Scattered-photon frequency, particle speed and photon angle for an incoming
/// particle speed beta0 * c. At beta0 = 0 the unique non-trivial root is taken;
/// for beta0 != 0 that root is followed continuously in 16 steps of beta0.
inline ComptonSolution compton_solve(const ComptonConfig& cfg, double beta0) {
    cfg.validate();
    require(std::abs(beta0) < max_nonrelativistic_beta, ErrorCode::regime,
            "|beta0| must stay below 0.05 for the non-relativistic treatment");
    auto pick_nearest = [](const std::vector<double>& roots, double target) {
        return *std::min_element(roots.begin(), roots.end(),
                                 [&](double a, double b) { return std::abs(a - target) < std::abs(b - target); });
    };
    auto at_rest = detail::compton_roots(cfg, 0.0);
    require(!at_rest.empty(), ErrorCode::no_root, "no scattered root at beta0 = 0 for this angle");
    double u = pick_nearest(at_rest, 0.0);
    if (beta0 != 0.0) {
        constexpr int steps = 16;
        for (int k = 1; k <= steps; ++k) {
            const auto roots = detail::compton_roots(cfg, beta0 * k / steps);
            require(!roots.empty(), ErrorCode::no_root, "scattered root disappears while tracking beta0");
            u = pick_nearest(roots, u);
        }
    }
    const double mc2 = cfg.mass * cfg.speed_of_light * cfg.speed_of_light;
    const double eps0 = cfg.photon_fraction();
    ComptonSolution s;
    s.nu = cfg.nu0 * (1.0 - u);
    s.beta = std::sqrt(std::max(beta0 * beta0 + 2.0 * eps0 * u, 0.0));
    s.theta = std::atan2(mc2 * s.beta * std::sin(cfg.phi),
                         cfg.planck_h * cfg.nu0 - mc2 * beta0 - mc2 * s.beta * std::cos(cfg.phi));
    return s;
}

struct ComptonLinearization {
    double intercept = 0.0;       // A = nu(<beta0>)
    double slope = 0.0;           // B = d nu / d beta0
    double max_residual = 0.0;    // max |nu - (A + B (beta0 - <beta0>))| over the window
};

/// nu ~ A + B (beta0 - <beta0>) around beta0_mean. B is a central difference
/// with step halfwidth/10.
inline ComptonLinearization compton_linearize(const ComptonConfig& cfg, double beta0_mean, double beta0_halfwidth) {
    require(beta0_halfwidth > 0.0, ErrorCode::invalid_argument, "halfwidth must be positive");
    require(std::abs(beta0_mean) + beta0_halfwidth < max_nonrelativistic_beta, ErrorCode::regime,
            "linearization window leaves the non-relativistic regime");
    ComptonLinearization lin;
    lin.intercept = compton_solve(cfg, beta0_mean).nu;
    const double step = beta0_halfwidth / 10.0;
    lin.slope = (compton_solve(cfg, beta0_mean + step).nu - compton_solve(cfg, beta0_mean - step).nu) / (2.0 * step);
    constexpr int scan = 40;
    for (int k = 0; k <= scan; ++k) {
        const double offset = beta0_halfwidth * (2.0 * k / scan - 1.0);
        const double nu = compton_solve(cfg, beta0_mean + offset).nu;
        lin.max_residual = std::max(lin.max_residual, std::abs(nu - (lin.intercept + lin.slope * offset)));
    }
    return lin;
}

// ---------------------------------------------------------------------------
// Prism microscope and the three-experiment reconstruction
// ---------------------------------------------------------------------------

struct PrismConstants {
    double c_lin = 0.0;   // C
    double d_quad = 0.0;  // D
};

/// xi = q + C p + D (qp + pq); for commuting sample values qp + pq = 2qp.
inline double screen_position(double q, double p, const PrismConstants& prism) {
    return q + prism.c_lin * p + 2.0 * prism.d_quad * q * p;
}

/// splitmix64 finalizer; derives independent stream seeds from one seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// n draws of (q, p) from the normal law with mean (<q>, <p>) and covariance
/// [[var_q, K], [K, var_p]], using its Cholesky factor.
inline std::vector<PhasePoint> sample_gaussian_state(const Moments& m, std::size_t n, std::uint64_t seed) {
    require(n >= 1, ErrorCode::invalid_argument, "sample count must be at least 1");
    const double det = m.var_q * m.var_p - m.correlation_k * m.correlation_k;
    require(m.var_q > 0.0 && det > 0.0, ErrorCode::non_positive_definite, "covariance is not positive definite");
    const double l11 = std::sqrt(m.var_q);
    const double l21 = m.correlation_k / l11;
    const double l22 = std::sqrt(det / m.var_q);
    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal;
    std::vector<PhasePoint> out(n);
    for (auto& s : out) {
        const double z1 = normal(engine);
        const double z2 = normal(engine);
        s = {m.mean_q + l11 * z1, m.mean_p + l21 * z1 + l22 * z2};
    }
    return out;
}

struct MeasurementRecord {
    std::size_t n = 0;
    Moments estimate;
    Moments standard_error;  // one standard error per moment component
};

/// Raw records of the three experiments.
struct MeasurementSamples {
    std::vector<double> positions;  // (i) microscope
    std::vector<double> momenta;    // (ii) velocimeter
    std::vector<double> screen;     // (iii) prism microscope
};

struct MeasurementData {
    MeasurementRecord record;
    MeasurementSamples samples;  // empty unless requested
};

struct MeasurementRun {
    EllipseCoeffs ellipse;
    MeasurementRecord record;
    MeasurementSamples samples;
};

namespace detail {

struct SampleStats {
    double mean;
    double variance;  // unbiased
    double se_mean;
    double se_variance;
};

inline SampleStats sample_stats(const std::vector<double>& x) {
    const auto n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : x) {
        const double d2 = (v - mean) * (v - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    const double variance = m2 / (n - 1.0);
    const double pop_var = m2 / n;
    m4 /= n;
    return {mean, variance, std::sqrt(variance / n), std::sqrt(std::max(m4 - pop_var * pop_var, 0.0) / n)};
}

}  // namespace detail

/// Simulates three independent runs on identically prepared Gaussian states:
/// (i) position records give <q> and var_q, (ii) momentum records give <p>
/// and var_p, (iii) prism screen records xi give
///   K = (mean(xi) - <q> - C <p>) / (2D) - <q><p>.
/// Each run draws its own sample set from a seed derived from `seed`.
inline MeasurementData simulate_measurements(const Moments& true_state, const PrismConstants& prism, std::size_t n,
                                             std::uint64_t seed, bool keep_samples = false) {
    require(n >= 2, ErrorCode::invalid_argument, "need at least two samples per experiment");
    require(prism.d_quad != 0.0 && std::isfinite(prism.d_quad) && std::isfinite(prism.c_lin),
            ErrorCode::invalid_argument, "prism constant D must be non-zero to extract K");

    MeasurementSamples raw;
    raw.positions.resize(n);
    raw.momenta.resize(n);
    raw.screen.resize(n);
    {
        const auto s = sample_gaussian_state(true_state, n, derive_seed(seed, 0));
        for (std::size_t i = 0; i < n; ++i) raw.positions[i] = s[i].q;
    }
    {
        const auto s = sample_gaussian_state(true_state, n, derive_seed(seed, 1));
        for (std::size_t i = 0; i < n; ++i) raw.momenta[i] = s[i].p;
    }
    {
        const auto s = sample_gaussian_state(true_state, n, derive_seed(seed, 2));
        for (std::size_t i = 0; i < n; ++i) raw.screen[i] = screen_position(s[i].q, s[i].p, prism);
    }

    const auto sq = detail::sample_stats(raw.positions);
    const auto sp = detail::sample_stats(raw.momenta);
    const auto sx = detail::sample_stats(raw.screen);
    const double two_d = 2.0 * prism.d_quad;

    MeasurementData data;
    data.record.n = n;
    auto& est = data.record.estimate;
    est.mean_q = sq.mean;
    est.var_q = sq.variance;
    est.mean_p = sp.mean;
    est.var_p = sp.variance;
    est.correlation_k = (sx.mean - sq.mean - prism.c_lin * sp.mean) / two_d - sq.mean * sp.mean;

    auto& se = data.record.standard_error;
    se.mean_q = sq.se_mean;
    se.var_q = sq.se_variance;
    se.mean_p = sp.se_mean;
    se.var_p = sp.se_variance;
    const double dq_coef = 1.0 / two_d + sp.mean;
    const double dp_coef = prism.c_lin / two_d + sq.mean;
    se.correlation_k = std::sqrt(sx.se_mean * sx.se_mean / (two_d * two_d) + dq_coef * dq_coef * sq.se_mean * sq.se_mean +
                                 dp_coef * dp_coef * sp.se_mean * sp.se_mean);
    if (keep_samples) data.samples = std::move(raw);
    return data;
}

/// simulate_measurements followed by ellipse_from_moments on the estimates.
/// Estimates that break the uncertainty relation raise uncertainty_violation.
inline MeasurementRun reconstruct_ellipse_experiment(const Moments& true_state, const PrismConstants& prism,
                                                     std::size_t n, std::uint64_t seed,
                                                     const PhysicalConstants& constants = {},
                                                     bool keep_samples = false) {
    auto data = simulate_measurements(true_state, prism, n, seed, keep_samples);
    MeasurementRun run;
    run.ellipse = ellipse_from_moments(data.record.estimate, constants);
    run.record = data.record;
    run.samples = std::move(data.samples);
    return run;
}

}  // namespace fermi
