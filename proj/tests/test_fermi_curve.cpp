#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fermi/fermi_curve.hpp"
#include "fermi/gaussian_dynamics.hpp"

using namespace fermi;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Grid grid(-20.0, 20.0, 2048);
const Grid wide(-40.0, 40.0, 2048);
const PhysicalConstants unit{};
constexpr double pi = std::numbers::pi;

bool throws_code(ErrorCode code, auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

WaveFunction free_at(double tau, double p0 = 0.0) { return evolve_free({0.0, p0, 1.0}, tau, wide, unit); }

bool near_mask_edge(const FermiCurve& curve, std::size_t i) {
    for (std::size_t j = i - 4; j <= i + 4; ++j)
        if (!curve.valid[j]) return true;
    return false;
}

}  // namespace

TEST_CASE("branches of the minimum packet") {
    const auto psi = gaussian_packet({0.0, 2.0, 1.0}, grid, unit);
    const auto curve = fermi_branches(psi);
    const auto mid = grid.size() / 2;
    CHECK_THAT(std::real(curve.p_plus[mid]), WithinAbs(3.0, 1e-9));
    CHECK_THAT(std::real(curve.p_minus[mid]), WithinAbs(1.0, 1e-9));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!curve.valid[i]) continue;
        const double q = curve.q[i];
        // finite-difference fallback next to the mask edge is less accurate
        const double tol = near_mask_edge(curve, i) ? 1e-3 : 1e-7;
        CHECK_THAT(std::real(curve.p_plus[i] + curve.p_minus[i]), WithinAbs(4.0, tol));
        CHECK_THAT(curve.curvature_term[i], WithinAbs(q * q - 1.0, tol * (1.0 + q * q)));
        if (std::abs(std::abs(q) - 1.0) > 1e-6) CHECK(curve.real_branch[i] == (std::abs(q) < 1.0));
        if (curve.real_branch[i]) {
            CHECK(std::real(curve.p_plus[i]) >= std::real(curve.p_minus[i]));
        } else {
            CHECK(curve.p_plus[i] == std::conj(curve.p_minus[i]));
            CHECK(std::imag(curve.p_plus[i]) > 0.0);
        }
    }
}

TEST_CASE("finite-difference scheme agrees with spectral") {
    const auto psi = free_at(1.0, 1.0);
    const auto spectral = fermi_branches(psi);
    const auto fd = fermi_branches(psi, 1e-6, DerivativeScheme::finite_difference_4th);
    const auto mid = wide.size() / 2;
    for (std::size_t i = mid - 60; i <= mid + 60; ++i) {
        CHECK_THAT(fd.phase_gradient[i], WithinAbs(spectral.phase_gradient[i], 1e-5));
        CHECK_THAT(fd.curvature_term[i], WithinAbs(spectral.curvature_term[i], 1e-4));
    }
}

TEST_CASE("branch points lie on the zero set") {
    const auto psi = free_at(1.0);
    const auto curve = fermi_branches(psi);
    for (std::size_t i = 0; i < wide.size(); ++i) {
        if (!curve.in_band(i)) continue;
        CHECK_THAT(fermi_value(curve, curve.q[i], std::real(curve.p_plus[i])), WithinAbs(0.0, 1e-8));
        CHECK_THAT(fermi_value(curve, curve.q[i], std::real(curve.p_minus[i])), WithinAbs(0.0, 1e-8));
    }
}

TEST_CASE("fermi_value at fixed points") {
    const auto psi = gaussian_packet({0.0, 2.0, 1.0}, grid, unit);
    CHECK_THAT(fermi_value(psi, 0.0, 2.0), WithinAbs(-1.0, 1e-9));
    CHECK_THAT(fermi_value(psi, 0.0, 12.0), WithinAbs(99.0, 1e-8));
    CHECK(throws_code(ErrorCode::masked_point, [&] { fermi_value(psi, 19.9, 0.0); }));
    CHECK(throws_code(ErrorCode::masked_point, [&] { fermi_value(psi, 40.0, 0.0); }));
}

TEST_CASE("enclosed area") {
    CHECK_THAT(enclosed_area(fermi_branches(gaussian_packet({0.0, 0.0, 1.0}, grid, unit))), WithinRel(pi, 1e-4));
    CHECK_THAT(enclosed_area(fermi_branches(free_at(3.0))), WithinRel(pi, 1e-4));
    const PhysicalConstants k{0.5, 1.0};
    CHECK_THAT(enclosed_area(fermi_branches(gaussian_packet({0.0, 0.0, 1.0}, grid, k))), WithinRel(0.5 * pi, 1e-4));
}

TEST_CASE("superposition area changes in time") {
    const auto left = evolve_free({-3.0, 0.0, 1.0}, 0.0, grid, unit);
    const auto right = evolve_free({3.0, 0.0, 1.0}, 0.0, grid, unit);
    const auto left1 = evolve_free({-3.0, 0.0, 1.0}, 1.0, grid, unit);
    const auto right1 = evolve_free({3.0, 0.0, 1.0}, 1.0, grid, unit);
    const double a0 = enclosed_area(fermi_branches(superpose(left, right, 1.0, 1.0)));
    const double a1 = enclosed_area(fermi_branches(superpose(left1, right1, 1.0, 1.0)));
    CHECK(std::abs(a1 - a0) > 0.01 * a0);
}

TEST_CASE("ellipse fit reproduces closed-form coefficients") {
    const auto fit0 = fit_ellipse(fermi_branches(gaussian_packet({0.0, 2.0, 1.0}, grid, unit)));
    CHECK_THAT(fit0.coeffs.a, WithinRel(1.0, 1e-6));
    CHECK_THAT(fit0.coeffs.b, WithinRel(1.0, 1e-6));
    CHECK_THAT(fit0.coeffs.c, WithinAbs(0.0, 1e-6));
    CHECK_THAT(fit0.coeffs.center_q, WithinAbs(0.0, 1e-8));
    CHECK_THAT(fit0.coeffs.center_p, WithinAbs(2.0, 1e-8));
    CHECK(fit0.residual_rms < 1e-6);

    const auto fit1 = fit_ellipse(fermi_branches(free_at(1.0)));
    CHECK_THAT(fit1.coeffs.a, WithinRel(1.0, 1e-6));
    CHECK_THAT(fit1.coeffs.b, WithinRel(2.0, 1e-6));
    CHECK_THAT(fit1.coeffs.c, WithinRel(-1.0, 1e-6));
    CHECK(fit1.residual_rms < 1e-6);

    const auto fit = fit_ellipse(fermi_branches(free_at(2.0, 0.5)));
    CHECK_THAT(enclosed_area(fermi_branches(free_at(2.0, 0.5))), WithinRel(ellipse_area(fit.coeffs), 1e-4));
}

TEST_CASE("ellipse fit needs a single band") {
    const auto left = gaussian_packet({-3.0, 0.0, 1.0}, grid, unit);
    const auto right = gaussian_packet({3.0, 0.0, 1.0}, grid, unit);
    CHECK(throws_code(ErrorCode::multiple_bands, [&] { fit_ellipse(fermi_branches(superpose(left, right, 1.0, 1.0))); }));
}

TEST_CASE("scale covariance at t = 0") {
    for (double lambda : {0.5, 2.0}) {
        const auto fit = fit_ellipse(fermi_branches(gaussian_packet({0.0, 0.0, lambda}, grid, unit)));
        CHECK_THAT(fit.coeffs.a, WithinRel(1.0 / (lambda * lambda), 1e-5));
        CHECK_THAT(fit.coeffs.b, WithinRel(lambda * lambda, 1e-5));
        CHECK_THAT(fit.coeffs.c, WithinAbs(0.0, 1e-6));
    }
}

TEST_CASE("ellipse area and moments mapping") {
    CHECK_THAT(ellipse_area({1.0, 1.0, 0.0}), WithinRel(pi, 1e-15));
    CHECK_THAT(ellipse_area({1.0, 2.0, -1.0}), WithinRel(pi, 1e-15));
    CHECK_THAT(ellipse_area({2.0, 1.0, 1.0}), WithinRel(pi, 1e-15));
    CHECK(throws_code(ErrorCode::degenerate_fit, [] { ellipse_area({1.0, 1.0, 1.0}); }));

    const auto e0 = ellipse_from_moments({0.0, 0.0, 0.5, 0.5, 0.0}, unit);
    CHECK(e0.a == 1.0);
    CHECK(e0.b == 1.0);
    CHECK(e0.c == 0.0);
    const auto e1 = ellipse_from_moments({0.0, 0.0, 1.0, 0.5, 0.5}, unit);
    CHECK(e1.a == 1.0);
    CHECK(e1.b == 2.0);
    CHECK(e1.c == -1.0);
    CHECK(throws_code(ErrorCode::uncertainty_violation,
                      [] { ellipse_from_moments({0.0, 0.0, 0.4, 0.5, 0.0}, PhysicalConstants{}); }));

    const double omega0 = 2.0;
    const PhysicalConstants k{1.0, 1.5};
    const Moments coherent{0.0, 0.0, 1.0 / (2.0 * k.mass * omega0), k.mass * omega0 / 2.0, 0.0};
    const auto ec = ellipse_from_moments(coherent, k);
    CHECK_THAT(ec.a, WithinRel(k.mass * omega0, 1e-14));
    CHECK_THAT(ec.b, WithinRel(1.0 / (k.mass * omega0), 1e-14));
}

TEST_CASE("g_F operator annihilates Gaussians") {
    CHECK(fermi_operator_residual(gaussian_packet({0.0, 2.0, 1.0}, grid, unit)) < 1e-6);
    CHECK(fermi_operator_residual(free_at(1.0, 1.0)) < 1e-6);
}

TEST_CASE("wave function reconstruction") {
    const auto psi = gaussian_packet({0.0, 0.0, 1.0}, grid, unit);
    const auto curve = fermi_branches(psi);
    const double rho0 = std::pow(pi, -0.25);
    const auto back = reconstruct_wavefunction(curve, 0.0, rho0, 0.0, 0.0);
    CHECK(l2_distance(psi, back, true) < 1e-4);
    // real input: theta stays constant
    const auto mid = grid.size() / 2;
    for (std::size_t i = mid - 100; i <= mid + 100; ++i) CHECK_THAT(std::arg(back[i]), WithinAbs(0.0, 1e-12));

    const auto tau1 = evolve_free({0.0, 0.0, 1.0}, 1.0, grid, unit);
    const auto polar = polar_decompose(tau1);
    const auto c1 = fermi_branches(tau1);
    const auto d = spectral_derivatives(tau1.amplitudes(), grid.spacing());
    const double drho = std::real(d.first[mid] / tau1[mid]) * polar.rho[mid];
    const auto back1 = reconstruct_wavefunction(c1, 0.0, polar.rho[mid], drho, polar.theta[mid]);
    CHECK(l2_distance(tau1, back1, true) < 1e-4);

    CHECK(throws_code(ErrorCode::masked_point, [&] { reconstruct_wavefunction(curve, 19.5, 1.0, 0.0, 0.0); }));
}

TEST_CASE("wrong anchor slope diverges") {
    const auto psi = gaussian_packet({0.0, 0.0, 0.5}, grid, unit);
    const auto curve = fermi_branches(psi, 1e-12);
    CHECK(throws_code(ErrorCode::divergence, [&] { reconstruct_wavefunction(curve, 0.0, 1.0, 5.0, 0.0); }));
}
