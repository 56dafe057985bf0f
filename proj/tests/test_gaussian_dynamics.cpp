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

// Fig. 3 parameters: m omega0 Q0^2 / hbar = 20, B = 0.1
HarmonicGaussianParams squeezed(double phase) {
    return HarmonicGaussianParams::from_squeeze(0.1, std::sqrt(20.0), phase, 1.0, unit);
}

void check_coeffs(const EllipseCoeffs& got, const EllipseCoeffs& want, double rel) {
    const double scale = std::max({std::abs(want.a), std::abs(want.b), std::abs(want.c)});
    CHECK_THAT(got.a, WithinAbs(want.a, rel * scale));
    CHECK_THAT(got.b, WithinAbs(want.b, rel * scale));
    CHECK_THAT(got.c, WithinAbs(want.c, rel * scale));
}

}  // namespace

TEST_CASE("free evolution") {
    const GaussianParams p{0.0, 2.0, 1.0};
    CHECK(l2_distance(evolve_free(p, 0.0, grid, unit), gaussian_packet(p, grid, unit)) < 1e-14);
    CHECK_THAT(moments(evolve_free({0.0, 0.0, 1.0}, 1.0, grid, unit)).var_q, WithinAbs(1.0, 1e-10));
    CHECK(throws_code(ErrorCode::packet_out_of_box, [] { evolve_free({0.0, 0.0, 1.0}, 3.0, grid, PhysicalConstants{}); }));
}

TEST_CASE("uniform force") {
    const GaussianParams p{0.5, -1.0, 1.0};
    CHECK(l2_distance(evolve_uniform_force(p, 0.0, 1.3, grid, unit), evolve_free(p, 1.3, grid, unit)) == 0.0);

    const auto psi = evolve_uniform_force({0.0, 0.0, 1.0}, 1.5, 1.0, grid, unit);
    const auto m = moments(psi);
    CHECK_THAT(m.mean_q, WithinAbs(0.75, 1e-8));
    CHECK_THAT(m.mean_p, WithinAbs(1.5, 1e-8));

    for (double t : {-1.0, 0.5, 2.0}) {
        const auto mf = moments(evolve_free(p, t, wide, unit));
        const auto mu = moments(evolve_uniform_force(p, 0.7, t, wide, unit));
        CHECK_THAT(mu.var_q, WithinAbs(mf.var_q, 1e-9));
        CHECK_THAT(mu.var_p, WithinAbs(mf.var_p, 1e-9));
        CHECK_THAT(mu.correlation_k, WithinAbs(mf.correlation_k, 1e-9));
    }
}

TEST_CASE("coherent state translates rigidly") {
    const double omega0 = 1.0;
    const auto coh = HarmonicGaussianParams::from_squeeze(1.0, 3.0, 0.0, omega0, unit);
    CHECK_THAT(coh.alpha, WithinRel(1.0, 1e-15));
    for (double t : {0.0, 0.4, 1.1, 2.5}) {
        const auto m = moments(harmonic_state(coh, omega0, t, grid, unit));
        CHECK_THAT(m.var_q, WithinAbs(0.5, 1e-10));
        CHECK_THAT(m.mean_q, WithinAbs(3.0 * std::cos(t), 1e-9));
    }
}

TEST_CASE("squeezed state width at zero phase") {
    const auto m = moments(harmonic_state(squeezed(0.0), 1.0, 0.0, grid, unit));
    CHECK_THAT(m.var_q, WithinRel(1.0 / (2.0 * std::sqrt(0.1)), 1e-9));
}

TEST_CASE("harmonic state is periodic up to a global phase") {
    const double omega0 = 1.3;
    const auto params = HarmonicGaussianParams::from_squeeze(0.4, 2.0, 0.3, omega0, unit);
    const auto a = harmonic_state(params, omega0, 0.7, grid, unit);
    const auto b = harmonic_state(params, omega0, 0.7 + 2.0 * pi / omega0, grid, unit);
    CHECK(l2_distance(a, b, true) < 1e-8);
    // the continuous branch of the square root gives exactly -1 per period
    CHECK_THAT(std::real(inner_product(a, b)), WithinAbs(-1.0, 1e-10));
}

TEST_CASE("analytic ellipses") {
    for (int tau = -3; tau <= 3; ++tau) {
        const auto e = analytic_ellipse(FreeParticle{}, GaussianParams{0.0, 2.0, 1.0}, tau, unit);
        CHECK_THAT(e.determinant(), WithinAbs(1.0, 1e-12));
        const auto u = analytic_ellipse(UniformForce{1.5}, GaussianParams{0.0, 2.0, 1.0}, tau, unit);
        CHECK(u.a == e.a);
        CHECK(u.b == e.b);
        CHECK(u.c == e.c);
    }
    const auto e1 = analytic_ellipse(FreeParticle{}, GaussianParams{0.0, 0.0, 1.0}, 1.0, unit);
    CHECK(e1.a == 1.0);
    CHECK(e1.b == 2.0);
    CHECK(e1.c == -1.0);

    const auto eh = analytic_ellipse(HarmonicOscillator{1.0}, squeezed(pi / 4.0), 0.0, unit);
    const double cs = std::sqrt(0.5);
    const double denom = cs * cs + 0.1 * cs * cs;
    const double ar = std::sqrt(0.1) / denom;
    const double ai = 0.9 * cs * cs / denom;
    CHECK_THAT(eh.a, WithinRel((ar * ar + ai * ai) / ar, 1e-14));
    CHECK_THAT(eh.b, WithinRel(1.0 / ar, 1e-14));
    CHECK_THAT(eh.c, WithinRel(ai / ar, 1e-14));

    const PhysicalConstants k{0.7, 1.3};
    for (int j = 0; j < 16; ++j) {
        const auto params = HarmonicGaussianParams::from_squeeze(0.1, 1.0, j * pi / 8.0, 2.0, k);
        const auto e = analytic_ellipse(HarmonicOscillator{2.0}, params, 0.0, k);
        CHECK_THAT(e.determinant(), WithinRel(1.0 / (k.hbar * k.hbar), 1e-12));
    }
}

TEST_CASE("center parabola") {
    const GaussianParams p{0.5, 1.0, 1.0};
    const double force = 1.5;
    const auto vertex = center_parabola(p, force, unit, {p.p0});
    CHECK(vertex[0].q == p.q0);
    for (double t : {1.0, 2.0, 3.0}) {
        const auto e = analytic_ellipse(UniformForce{force}, p, t, unit);
        const auto on = center_parabola(p, force, unit, {e.center_p});
        CHECK_THAT(on[0].q, WithinAbs(e.center_q, 1e-12));
    }
    CHECK(center_parabola({0.0, 0.0, 1.0}, 1.0, unit, {2.0})[0].q == 2.0);
    CHECK(throws_code(ErrorCode::zero_force, [&] { center_parabola(p, 0.0, unit, {1.0}); }));
}

TEST_CASE("analytic moments") {
    const auto m1 = analytic_moments(FreeParticle{}, GaussianParams{0.0, 0.0, 1.0}, 1.0, unit);
    CHECK(m1.var_q == 1.0);
    CHECK(m1.var_p == 0.5);
    CHECK(m1.correlation_k == 0.5);
    for (double t : {0.0, 0.3, 1.7}) {
        const auto coh = HarmonicGaussianParams::from_squeeze(1.0, 2.0, 0.2, 1.0, unit);
        CHECK(analytic_moments(HarmonicOscillator{1.0}, coh, t, unit).correlation_k == 0.0);
    }
    const auto mh = analytic_moments(HarmonicOscillator{1.0}, squeezed(pi / 4.0), 0.0, unit);
    CHECK_THAT(mh.correlation_k, WithinRel(-0.9 / (4.0 * std::sqrt(0.1)), 1e-13));
    CHECK_THAT(mh.correlation_k, WithinAbs(-0.7115, 1e-4));
}

TEST_CASE("grid moments match closed-form moments") {
    const GaussianParams gp{0.5, 1.0, 1.0};
    for (double t : {-2.0, 0.0, 1.5}) {
        for (const SystemSpec sys : {SystemSpec{FreeParticle{}}, SystemSpec{UniformForce{0.8}}}) {
            const auto num = moments(closed_form_state(sys, gp, t, wide, unit));
            const auto ana = analytic_moments(sys, gp, t, unit);
            CHECK_THAT(num.mean_q, WithinAbs(ana.mean_q, 1e-7));
            CHECK_THAT(num.mean_p, WithinAbs(ana.mean_p, 1e-7));
            CHECK_THAT(num.var_q, WithinAbs(ana.var_q, 1e-7));
            CHECK_THAT(num.var_p, WithinAbs(ana.var_p, 1e-7));
            CHECK_THAT(num.correlation_k, WithinAbs(ana.correlation_k, 1e-7));
        }
    }
    for (int j = 0; j < 8; ++j) {
        const auto hp = squeezed(j * pi / 4.0);
        const auto num = moments(harmonic_state(hp, 1.0, 0.0, grid, unit));
        const auto ana = analytic_moments(HarmonicOscillator{1.0}, hp, 0.0, unit);
        CHECK_THAT(num.mean_q, WithinAbs(ana.mean_q, 1e-7));
        CHECK_THAT(num.mean_p, WithinAbs(ana.mean_p, 1e-7));
        CHECK_THAT(num.var_q, WithinAbs(ana.var_q, 1e-7));
        CHECK_THAT(num.var_p, WithinAbs(ana.var_p, 1e-7));
        CHECK_THAT(num.correlation_k, WithinAbs(ana.correlation_k, 1e-7));
        CHECK_THAT(ana.uncertainty_product(), WithinAbs(0.25, 1e-12));
    }
}

TEST_CASE("fitted ellipses match closed forms") {
    const GaussianParams gp{0.0, 1.0, 1.0};
    for (int tau = -3; tau <= 3; ++tau) {
        const auto fit = fit_ellipse(fermi_branches(evolve_free(gp, tau, wide, unit)));
        check_coeffs(fit.coeffs, analytic_ellipse(FreeParticle{}, gp, tau, unit), 1e-5);
    }
    for (int j = 0; j < 8; ++j) {
        const auto hp = squeezed(j * pi / 4.0);
        const auto fit = fit_ellipse(fermi_branches(harmonic_state(hp, 1.0, 0.0, grid, unit)));
        const auto want = analytic_ellipse(HarmonicOscillator{1.0}, hp, 0.0, unit);
        check_coeffs(fit.coeffs, want, 1e-5);
        CHECK_THAT(fit.coeffs.center_q, WithinAbs(want.center_q, 1e-6));
        CHECK_THAT(fit.coeffs.center_p, WithinAbs(want.center_p, 1e-6));
    }
}
