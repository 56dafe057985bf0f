#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fermi/ellipse.hpp"
#include "fermi/errors.hpp"
#include "fermi/fft.hpp"
#include "fermi/grid.hpp"
#include "fermi/wavefunction.hpp"

namespace fermi {

enum class DerivativeScheme { spectral, finite_difference_4th };

/// The g_F = 0 locus sampled at grid resolution. For each grid point:
///   phase_gradient  = hbar d_q theta
///   curvature_term  = hbar^2 rho''/rho
///   p_plus/minus    = phase_gradient +/- sqrt(-curvature_term)
/// The branches are real where curvature_term <= 0 and complex conjugate
/// otherwise. Fields are only meaningful where `valid` is set.
struct FermiCurve {
    Grid grid;
    PhysicalConstants constants;
    std::vector<double> q;
    std::vector<double> phase_gradient;
    std::vector<double> curvature_term;
    std::vector<cplx> p_plus;
    std::vector<cplx> p_minus;
    std::vector<bool> real_branch;
    std::vector<bool> valid;

    std::size_t size() const noexcept { return q.size(); }
    bool in_band(std::size_t i) const { return valid[i] && real_branch[i]; }
};

/// Inclusive index range of a maximal run of valid, real-branch points.
struct Band {
    std::size_t first = 0;
    std::size_t last = 0;
    std::size_t count() const noexcept { return last - first + 1; }
};

namespace detail {

inline cplx fd4_first(std::span<const cplx> f, std::size_t i, double h) {
    return (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * h);
}

inline cplx fd4_second(std::span<const cplx> f, std::size_t i, double h) {
    return (-f[i + 2] + 16.0 * f[i + 1] - 30.0 * f[i] + 16.0 * f[i - 1] - f[i - 2]) / (12.0 * h * h);
}

inline cplx fd6_first(std::span<const cplx> f, std::size_t i, double h) {
    return (f[i + 3] - 9.0 * f[i + 2] + 45.0 * f[i + 1] - 45.0 * f[i - 1] + 9.0 * f[i - 2] - f[i - 3]) / (60.0 * h);
}

/// Contiguous run of `valid` containing index i.
inline Band valid_run(const std::vector<bool>& valid, std::size_t i) {
    Band run{i, i};
    while (run.first > 0 && valid[run.first - 1]) --run.first;
    while (run.last + 1 < valid.size() && valid[run.last + 1]) ++run.last;
    return run;
}

/// Lagrange interpolation of samples at fractional index x using up to four
/// neighbouring points restricted to [run.first, run.last].
inline double interpolate_cubic(const std::vector<double>& values, Band run, double x) {
    const auto lo_bound = static_cast<long>(run.first);
    const auto hi_bound = static_cast<long>(run.last);
    if (hi_bound == lo_bound) return values[run.first];
    const long span = std::min<long>(4, hi_bound - lo_bound + 1);
    long start = static_cast<long>(std::floor(x)) - (span == 4 ? 1 : 0);
    start = std::clamp(start, lo_bound, hi_bound - span + 1);
    double result = 0.0;
    for (long j = start; j < start + span; ++j) {
        double weight = 1.0;
        for (long k = start; k < start + span; ++k)
            if (k != j) weight *= (x - static_cast<double>(k)) / static_cast<double>(j - k);
        result += weight * values[static_cast<std::size_t>(j)];
    }
    return result;
}

}  // namespace detail

inline FermiCurve fermi_branches(const WaveFunction& psi, double rho_floor_fraction = 1e-6,
                                 DerivativeScheme scheme = DerivativeScheme::spectral) {
    const Grid& grid = psi.grid();
    const std::size_t n = grid.size();
    const double dq = grid.spacing();
    const double hbar = psi.constants().hbar;
    const auto polar = polar_decompose(psi, rho_floor_fraction);

    FermiCurve curve{grid,
                     psi.constants(),
                     std::vector<double>(n),
                     std::vector<double>(n, 0.0),
                     std::vector<double>(n, 0.0),
                     std::vector<cplx>(n),
                     std::vector<cplx>(n),
                     std::vector<bool>(n, false),
                     polar.valid};
    // the 5-point stencils need two neighbours on each side
    for (std::size_t i = 0; i < n; ++i)
        if (i < 2 || i + 2 >= n) curve.valid[i] = false;
    require(std::find(curve.valid.begin(), curve.valid.end(), true) != curve.valid.end(),
            ErrorCode::all_masked, "no grid point passes the rho floor");

    const auto amps = psi.amplitudes();
    std::optional<SpectralDerivatives> spectral;
    if (scheme == DerivativeScheme::spectral) spectral = spectral_derivatives(amps, dq);

    auto near_mask_boundary = [&](std::size_t i) {
        for (std::size_t j = (i >= 3 ? i - 3 : 0); j <= std::min(n - 1, i + 3); ++j)
            if (!curve.valid[j]) return true;
        return i < 3 || i + 3 >= n;
    };

    for (std::size_t i = 0; i < n; ++i) {
        curve.q[i] = grid.position(i);
        if (!curve.valid[i]) continue;
        cplx d1;
        cplx d2;
        if (spectral && !near_mask_boundary(i)) {
            d1 = spectral->first[i];
            d2 = spectral->second[i];
        } else {
            d1 = detail::fd4_first(amps, i, dq);
            d2 = detail::fd4_second(amps, i, dq);
        }
        // psi'/psi = rho'/rho + i theta',  Re(psi''/psi) = rho''/rho - theta'^2
        const cplx r1 = d1 / amps[i];
        const cplx r2 = d2 / amps[i];
        const double theta_prime = std::imag(r1);
        const double curvature = std::real(r2) + theta_prime * theta_prime;
        const double g = hbar * theta_prime;
        const double kappa = hbar * hbar * curvature;
        curve.phase_gradient[i] = g;
        curve.curvature_term[i] = kappa;
        if (kappa <= 0.0) {
            const double half_width = std::sqrt(-kappa);
            curve.real_branch[i] = true;
            curve.p_plus[i] = {g + half_width, 0.0};
            curve.p_minus[i] = {g - half_width, 0.0};
        } else {
            const double half_width = std::sqrt(kappa);
            curve.p_plus[i] = {g, half_width};
            curve.p_minus[i] = {g, -half_width};
        }
    }
    return curve;
}

inline std::vector<Band> real_bands(const FermiCurve& curve) {
    std::vector<Band> bands;
    std::size_t i = 0;
    while (i < curve.size()) {
        if (!curve.in_band(i)) {
            ++i;
            continue;
        }
        Band b{i, i};
        while (b.last + 1 < curve.size() && curve.in_band(b.last + 1)) ++b.last;
        bands.push_back(b);
        i = b.last + 1;
    }
    return bands;
}

/// g_F(q, p) = [p - hbar d_q theta]^2 + hbar^2 rho''/rho, with the two
/// fields interpolated linearly between grid points.
inline double fermi_value(const FermiCurve& curve, double q, double p) {
    const double x = curve.grid.index_of(q);
    require(x >= 0.0 && x <= static_cast<double>(curve.size() - 1), ErrorCode::masked_point,
            "q lies outside the grid");
    const auto i = static_cast<std::size_t>(std::floor(x));
    const double t = x - static_cast<double>(i);
    const bool on_node = t == 0.0 || i + 1 >= curve.size();
    require(curve.valid[i] && (on_node || curve.valid[i + 1]), ErrorCode::masked_point,
            "q lies outside the valid region of the curve");
    double g = curve.phase_gradient[i];
    double kappa = curve.curvature_term[i];
    if (!on_node) {
        g += t * (curve.phase_gradient[i + 1] - g);
        kappa += t * (curve.curvature_term[i + 1] - kappa);
    }
    return (p - g) * (p - g) + kappa;
}

inline double fermi_value(const WaveFunction& psi, double q, double p) {
    return fermi_value(fermi_branches(psi), q, p);
}

/// Total phase-space area between the real branches, summed over every real
/// band. Each band is integrated between the zeros of f = -curvature_term,
/// located on a local cubic interpolant of f; the substitution
/// q = mid + half * sin(phi) absorbs the square-root behaviour at the band
/// edges so the trapezoidal rule in phi stays accurate.
inline double enclosed_area(const FermiCurve& curve) {
    const auto bands = real_bands(curve);
    require(std::any_of(bands.begin(), bands.end(), [](const Band& b) { return b.count() >= 4; }),
            ErrorCode::no_real_band, "no real band with at least 4 points");

    const double dq = curve.grid.spacing();
    std::vector<double> f(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) f[i] = -curve.curvature_term[i];

    double total = 0.0;
    for (const Band& band : bands) {
        const Band run = detail::valid_run(curve.valid, band.first);
        auto f_at = [&](double x) { return detail::interpolate_cubic(f, run, x); };
        auto edge_root = [&](double inside, double outside) {
            double lo = inside;
            double hi = outside;
            for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                (f_at(mid) >= 0.0 ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        };
        double left = static_cast<double>(band.first);
        double right = static_cast<double>(band.last);
        if (band.first > run.first) left = edge_root(left, left - 1.0);
        if (band.last < run.last) right = edge_root(right, right + 1.0);
        if (right <= left) continue;

        const double mid = 0.5 * (left + right);
        const double half = 0.5 * (right - left);
        const std::size_t m = std::max<std::size_t>(256, 16 * (band.count() + 2));
        double sum = 0.0;
        for (std::size_t k = 1; k < m; ++k) {
            const double phi = -0.5 * std::numbers::pi + std::numbers::pi * static_cast<double>(k) /
                                                             static_cast<double>(m);
            const double x = mid + half * std::sin(phi);
            sum += 2.0 * std::sqrt(std::max(f_at(x), 0.0)) * std::cos(phi);
        }
        total += sum * (std::numbers::pi / static_cast<double>(m)) * half * dq;
    }
    return total;
}

struct EllipseFit {
    EllipseCoeffs coeffs;
    double residual_rms = 0.0;
    Band band;
};

/// Least-squares fit of a q~^2 + b p~^2 + 2c q~ p~ = 1 to the branch points of
/// the single real band. The center is estimated first: center_q is the
/// vertex of a quadratic fit to ((p+ - p-)/2)^2 and center_p the value of the
/// linear fit to the branch midpoint (p+ + p-)/2 at center_q.
inline EllipseFit fit_ellipse(const FermiCurve& curve) {
    std::vector<Band> bands = real_bands(curve);
    std::erase_if(bands, [](const Band& b) { return b.count() < 8; });
    require(!bands.empty(), ErrorCode::no_real_band, "no real band with at least 8 points");
    require(bands.size() == 1, ErrorCode::multiple_bands,
            "ellipse fit needs a single real band, found " + std::to_string(bands.size()));
    const Band band = bands.front();
    const auto n = static_cast<Eigen::Index>(band.count());

    double q_ref = 0.0;
    for (std::size_t i = band.first; i <= band.last; ++i) q_ref += curve.q[i];
    q_ref /= static_cast<double>(n);

    Eigen::MatrixXd quad(n, 3);
    Eigen::MatrixXd lin(n, 2);
    Eigen::VectorXd half_width_sq(n);
    Eigen::VectorXd midpoint(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const std::size_t i = band.first + static_cast<std::size_t>(r);
        const double x = curve.q[i] - q_ref;
        quad.row(r) << 1.0, x, x * x;
        lin.row(r) << 1.0, x;
        half_width_sq(r) = -curve.curvature_term[i];
        midpoint(r) = 0.5 * std::real(curve.p_plus[i] + curve.p_minus[i]);
    }
    const Eigen::Vector3d qc = quad.colPivHouseholderQr().solve(half_width_sq);
    require(qc(2) < 0.0, ErrorCode::degenerate_fit, "branch separation is not concave");
    const double center_x = -qc(1) / (2.0 * qc(2));
    const Eigen::Vector2d lc = lin.colPivHouseholderQr().solve(midpoint);

    EllipseFit fit;
    fit.band = band;
    fit.coeffs.center_q = q_ref + center_x;
    fit.coeffs.center_p = lc(0) + lc(1) * center_x;

    Eigen::MatrixXd design(2 * n, 3);
    for (Eigen::Index r = 0; r < n; ++r) {
        const std::size_t i = band.first + static_cast<std::size_t>(r);
        const double x = curve.q[i] - fit.coeffs.center_q;
        const double yp = std::real(curve.p_plus[i]) - fit.coeffs.center_p;
        const double ym = std::real(curve.p_minus[i]) - fit.coeffs.center_p;
        design.row(2 * r) << x * x, yp * yp, 2.0 * x * yp;
        design.row(2 * r + 1) << x * x, ym * ym, 2.0 * x * ym;
    }
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(2 * n);
    const Eigen::Vector3d abc = design.colPivHouseholderQr().solve(ones);
    fit.coeffs.a = abc(0);
    fit.coeffs.b = abc(1);
    fit.coeffs.c = abc(2);
    fit.residual_rms = std::sqrt((design * abc - ones).squaredNorm() / static_cast<double>(2 * n));
    require(fit.coeffs.is_real(), ErrorCode::degenerate_fit, "fitted conic is not a real ellipse");
    return fit;
}

/// Real branch points (q, p+) and (q, p-) of every band.
inline std::vector<PhasePoint> curve_points(const FermiCurve& curve) {
    std::vector<PhasePoint> pts;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (!curve.in_band(i)) continue;
        pts.push_back({curve.q[i], std::real(curve.p_plus[i])});
        pts.push_back({curve.q[i], std::real(curve.p_minus[i])});
    }
    return pts;
}

/// One closed polyline per real band (upper branch left to right, lower branch
/// back), with extra points inserted so no segment is longer than max_spacing.
inline std::vector<std::vector<PhasePoint>> curve_polylines(const FermiCurve& curve,
                                                            double max_spacing) {
    require(max_spacing > 0.0, ErrorCode::invalid_argument, "max_spacing must be positive");
    std::vector<std::vector<PhasePoint>> loops;
    for (const Band& band : real_bands(curve)) {
        std::vector<PhasePoint> vertices;
        for (std::size_t i = band.first; i <= band.last; ++i)
            vertices.push_back({curve.q[i], std::real(curve.p_plus[i])});
        for (std::size_t i = band.last + 1; i-- > band.first;)
            vertices.push_back({curve.q[i], std::real(curve.p_minus[i])});
        std::vector<PhasePoint> loop;
        for (std::size_t k = 0; k < vertices.size(); ++k) {
            const PhasePoint& a = vertices[k];
            const PhasePoint& b = vertices[(k + 1) % vertices.size()];
            const double len = std::hypot(b.q - a.q, b.p - a.p);
            const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / max_spacing)));
            for (std::size_t s = 0; s < pieces; ++s) {
                const double t = static_cast<double>(s) / static_cast<double>(pieces);
                loop.push_back({a.q + t * (b.q - a.q), a.p + t * (b.p - a.p)});
            }
        }
        loops.push_back(std::move(loop));
    }
    return loops;
}

/// Relative L2 residual ||(g_F operator) psi|| / ||psi|| over the interior of the
/// valid region, with the operator
///   [-i hbar d_q - hbar d_q theta]^2 + hbar^2 rho''/rho
/// applied by differentiating numerically (spectral for psi, 6th-order
/// differences for the intermediate field).
inline double fermi_operator_residual(const WaveFunction& psi, double rho_floor_fraction = 1e-6) {
    const FermiCurve curve = fermi_branches(psi, rho_floor_fraction);
    const double hbar = psi.constants().hbar;
    const double dq = psi.grid().spacing();
    const auto amps = psi.amplitudes();
    const auto d = spectral_derivatives(amps, dq);
    const std::size_t n = psi.size();

    CVec first_pass(n);
    for (std::size_t i = 0; i < n; ++i)
        if (curve.valid[i]) first_pass[i] = cplx(0.0, -hbar) * d.first[i] - curve.phase_gradient[i] * amps[i];

    double residual = 0.0;
    double reference = 0.0;
    for (std::size_t i = 3; i + 3 < n; ++i) {
        bool interior = true;
        for (std::size_t j = i - 3; j <= i + 3; ++j) interior = interior && curve.valid[j];
        if (!interior) continue;
        const cplx derivative = detail::fd6_first(first_pass, i, dq);
        const cplx second_pass = cplx(0.0, -hbar) * derivative - curve.phase_gradient[i] * first_pass[i];
        residual += std::norm(second_pass + curve.curvature_term[i] * amps[i]);
        reference += std::norm(amps[i]);
    }
    require(reference > 0.0, ErrorCode::all_masked, "no interior points for the operator residual");
    return std::sqrt(residual / reference);
}

/// Rebuild psi from the branch pair alone. With s = -((p+ - p-)/2)^2 / hbar^2
/// (= rho''/rho) and theta' = (p+ + p-)/(2 hbar), rho'' = s rho and theta are
/// integrated outward from the anchor by classical RK4 on the valid interval
/// that contains it; the result is zero outside that interval and renormalized.
inline WaveFunction reconstruct_wavefunction(const FermiCurve& curve, double anchor_q, double anchor_rho,
                                             double anchor_drho, double anchor_theta) {
    const double hbar = curve.constants.hbar;
    const double dq = curve.grid.spacing();
    const std::size_t n = curve.size();
    const double x0 = curve.grid.index_of(anchor_q);
    require(x0 >= 0.0 && x0 <= static_cast<double>(n - 1), ErrorCode::masked_point,
            "anchor lies outside the grid");
    const auto i0 = static_cast<std::size_t>(std::floor(x0));
    require(curve.valid[i0] && (x0 == static_cast<double>(i0) || curve.valid[i0 + 1]),
            ErrorCode::masked_point, "anchor lies outside the valid region");
    require(anchor_rho > 0.0, ErrorCode::invalid_argument, "anchor_rho must be positive");
    const Band run = detail::valid_run(curve.valid, i0);

    std::vector<double> s(n, 0.0);
    std::vector<double> theta_prime(n, 0.0);
    for (std::size_t i = run.first; i <= run.last; ++i) {
        const cplx half_diff = 0.5 * (curve.p_plus[i] - curve.p_minus[i]);
        s[i] = -std::real(half_diff * half_diff) / (hbar * hbar);
        theta_prime[i] = std::real(curve.p_plus[i] + curve.p_minus[i]) / (2.0 * hbar);
    }

    struct State {
        double rho;
        double drho;
        double theta;
    };
    auto rhs = [&](double x, const State& y) {
        return State{y.drho, detail::interpolate_cubic(s, run, x) * y.rho,
                     detail::interpolate_cubic(theta_prime, run, x)};
    };
    auto rk4 = [&](double x, const State& y, double dx) {
        const double h = dx * dq;  // physical step
        auto axpy = [](const State& a, double c, const State& k) {
            return State{a.rho + c * k.rho, a.drho + c * k.drho, a.theta + c * k.theta};
        };
        const State k1 = rhs(x, y);
        const State k2 = rhs(x + 0.5 * dx, axpy(y, 0.5 * h, k1));
        const State k3 = rhs(x + 0.5 * dx, axpy(y, 0.5 * h, k2));
        const State k4 = rhs(x + dx, axpy(y, h, k3));
        return State{y.rho + h / 6.0 * (k1.rho + 2.0 * k2.rho + 2.0 * k3.rho + k4.rho),
                     y.drho + h / 6.0 * (k1.drho + 2.0 * k2.drho + 2.0 * k3.drho + k4.drho),
                     y.theta + h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta)};
    };

    CVec amps(n);
    const double limit = 1e6 * anchor_rho;
    auto store = [&](std::size_t i, const State& y) {
        require(std::abs(y.rho) <= limit && std::isfinite(y.rho), ErrorCode::divergence,
                "reconstructed amplitude diverged; anchor data selects the growing solution");
        amps[i] = std::polar(1.0, y.theta) * y.rho;
    };

    const State anchor{anchor_rho, anchor_drho, anchor_theta};
    for (int direction : {+1, -1}) {
        double x = x0;
        State y = anchor;
        const double end = direction > 0 ? static_cast<double>(run.last) : static_cast<double>(run.first);
        double next = direction > 0 ? std::ceil(x0) : std::floor(x0);
        if (next == x0) {
            store(static_cast<std::size_t>(x0), y);
            next += direction;
        }
        while (direction > 0 ? next <= end : next >= end) {
            y = rk4(x, y, next - x);
            x = next;
            store(static_cast<std::size_t>(x), y);
            next += direction;
        }
    }
    return WaveFunction(curve.grid, curve.constants, std::move(amps));
}

}  // namespace fermi
