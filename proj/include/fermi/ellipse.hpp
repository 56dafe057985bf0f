#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "fermi/errors.hpp"
#include "fermi/grid.hpp"
#include "fermi/wavefunction.hpp"

namespace fermi {

struct PhasePoint {
    double q = 0.0;
    double p = 0.0;
};

/// Phase-space ellipse  a q~^2 + b p~^2 + 2c q~ p~ = 1  with
/// q~ = q - center_q and p~ = p - center_p.
struct EllipseCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double center_q = 0.0;
    double center_p = 0.0;

    double determinant() const { return a * b - c * c; }
    bool is_real() const { return a > 0.0 && b > 0.0 && determinant() > 0.0; }

    double evaluate(double q, double p) const {
        const double x = q - center_q;
        const double y = p - center_p;
        return a * x * x + b * y * y + 2.0 * c * x * y;
    }
};

inline double ellipse_area(const EllipseCoeffs& e) {
    require(e.determinant() > 0.0, ErrorCode::degenerate_fit, "ab - c^2 must be positive");
    return std::numbers::pi / std::sqrt(e.determinant());
}

/// a = 2 var_p / hbar^2, b = 2 var_q / hbar^2, c = -2 K / hbar^2, centered on the means.
/// The minus sign on c holds for the free, uniformly accelerated and harmonic
/// cases alike (checked against the closed-form coefficients in the tests).
inline EllipseCoeffs ellipse_from_moments(const Moments& m, const PhysicalConstants& constants) {
    constants.validate();
    const double h2 = constants.hbar * constants.hbar;
    require(m.var_q > 0.0 && m.var_p > 0.0, ErrorCode::uncertainty_violation,
            "variances must be positive");
    require(m.uncertainty_product() >= 0.25 * h2 * (1.0 - 1e-6), ErrorCode::uncertainty_violation,
            "var_q var_p - K^2 = " + std::to_string(m.uncertainty_product()) + " is below hbar^2/4");
    return EllipseCoeffs{2.0 * m.var_p / h2, 2.0 * m.var_q / h2, -2.0 * m.correlation_k / h2,
                         m.mean_q, m.mean_p};
}

/// n points evenly spaced in the angle parameter along the ellipse boundary.
inline std::vector<PhasePoint> ellipse_boundary(const EllipseCoeffs& e, std::size_t n) {
    require(e.is_real(), ErrorCode::degenerate_fit, "not a real ellipse");
    const double rot = 0.5 * std::atan2(2.0 * e.c, e.a - e.b);
    const double cs = std::cos(rot);
    const double sn = std::sin(rot);
    const double lam_u = e.a * cs * cs + 2.0 * e.c * sn * cs + e.b * sn * sn;
    const double lam_v = e.a * sn * sn - 2.0 * e.c * sn * cs + e.b * cs * cs;
    std::vector<PhasePoint> pts(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        const double u = std::cos(t) / std::sqrt(lam_u);
        const double v = std::sin(t) / std::sqrt(lam_v);
        pts[k] = {e.center_q + cs * u - sn * v, e.center_p + sn * u + cs * v};
    }
    return pts;
}

}  // namespace fermi
