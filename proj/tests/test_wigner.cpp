#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "fermi/contour.hpp"
#include "fermi/fermi_curve.hpp"
#include "fermi/gaussian_dynamics.hpp"
#include "fermi/wigner.hpp"

using namespace fermi;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Grid grid(-20.0, 20.0, 512);
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

std::vector<PhasePoint> circle(double cq, double cp, double r, std::size_t n) {
    std::vector<PhasePoint> pts;
    for (std::size_t k = 0; k < n; ++k) {
        const double a = 2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
        pts.push_back({cq + r * std::cos(a), cp + r * std::sin(a)});
    }
    return pts;
}

}  // namespace

TEST_CASE("Wigner function of the minimum packet") {
    const auto psi = gaussian_packet({0.0, 0.0, 1.0}, grid, unit);
    const auto w = wigner_transform(psi, 512);
    REQUIRE(w.n_q() == 512);
    REQUIRE(w.n_p() == 512);
    CHECK_THAT(w.max_value(), WithinRel(1.0 / pi, 1e-10));
    CHECK_THAT(w.at(256, 256), WithinRel(1.0 / pi, 1e-10));
    CHECK(w.min_value() >= -1e-10);
    CHECK_THAT(w.integral(), WithinAbs(1.0, 1e-6));
    const auto qm = w.q_marginal();
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK_THAT(qm[i], WithinAbs(std::norm(psi[i]), 1e-6));
    // bivariate Gaussian exp(-q^2 - p^2) / pi
    for (std::size_t i = 200; i < 320; i += 7)
        for (std::size_t j = 220; j < 290; j += 5)
            CHECK_THAT(w.at(i, j), WithinAbs(std::exp(-w.q[i] * w.q[i] - w.p[j] * w.p[j]) / pi, 1e-10));
}

TEST_CASE("Wigner marginals of a moving squeezed packet") {
    const auto hp = HarmonicGaussianParams::from_squeeze(0.3, 2.0, 0.6, 1.0, unit);
    const auto psi = harmonic_state(hp, 1.0, 0.0, grid, unit);
    const auto w = wigner_transform(psi, 512);
    CHECK(w.min_value() >= -1e-10);
    CHECK_THAT(w.integral(), WithinAbs(1.0, 1e-6));
    const auto md = momentum_density(psi);
    const auto pm = w.p_marginal();
    REQUIRE(md.p.size() == pm.size());
    for (std::size_t j = 0; j < pm.size(); ++j) {
        CHECK_THAT(md.p[j], WithinAbs(w.p[j], 1e-12));
        CHECK_THAT(pm[j], WithinAbs(md.density[j], 1e-6));
    }
}

TEST_CASE("cat state has negative regions") {
    const auto left = gaussian_packet({-3.0, 0.0, 1.0}, grid, unit);
    const auto right = gaussian_packet({3.0, 0.0, 1.0}, grid, unit);
    const auto w = wigner_transform(superpose(left, right, 1.0, 1.0), 256);
    CHECK(w.min_value() < -0.01 * w.max_value());
    CHECK_THAT(w.integral(), WithinAbs(1.0, 1e-6));
}

TEST_CASE("momentum resolution is a free parameter") {
    const auto psi = gaussian_packet({1.0, -1.0, 1.0}, grid, unit);
    CHECK(throws_code(ErrorCode::invalid_argument, [&] { wigner_transform(psi, 100); }));
    const auto w = wigner_transform(psi, 128);
    CHECK(w.n_p() == 128);
    CHECK_THAT(w.integral(), WithinAbs(1.0, 1e-6));
}

TEST_CASE("1/e contour of the minimum packet is the unit circle") {
    const auto w = wigner_transform(gaussian_packet({0.0, 0.0, 1.0}, grid, unit), 512);
    const auto contour = contour_fraction(w, 1.0 / std::numbers::e);
    REQUIRE(contour.components.size() == 1);
    const auto pts = contour.points();
    CHECK(hausdorff_distance(pts, circle(0.0, 0.0, 1.0, 2000)) < w.cell_diagonal());
    const auto loops = curve_polylines(fermi_branches(gaussian_packet({0.0, 0.0, 1.0}, grid, unit)), 0.02);
    std::vector<PhasePoint> curve;
    for (const auto& l : loops) curve.insert(curve.end(), l.begin(), l.end());
    CHECK(hausdorff_distance(pts, curve) < 2.0 * w.cell_diagonal());
}

TEST_CASE("contours shrink toward the peak") {
    const auto w = wigner_transform(gaussian_packet({0.0, 0.0, 1.0}, grid, unit), 512);
    for (const auto& p : contour_fraction(w, 0.99).points()) CHECK(std::hypot(p.q, p.p) < 0.15);
    CHECK(throws_code(ErrorCode::empty_contour, [&] { contour_level(w, 2.0 * w.max_value()); }));
    CHECK(throws_code(ErrorCode::invalid_argument, [&] { contour_fraction(w, 1.0); }));
}

TEST_CASE("free packet contour matches the analytic ellipse") {
    const Grid wide(-40.0, 40.0, 512);
    const GaussianParams gp{0.0, 0.0, 1.0};
    const auto w = wigner_transform(evolve_free(gp, 2.0, wide, unit), 512);
    const auto pts = contour_fraction(w, 1.0 / std::numbers::e).points();
    const auto boundary = ellipse_boundary(analytic_ellipse(FreeParticle{}, gp, 2.0, unit), 4000);
    CHECK(hausdorff_distance(pts, boundary) < 2.0 * w.cell_diagonal());
}

TEST_CASE("Hausdorff distance") {
    const auto c = circle(0.0, 0.0, 1.0, 4000);
    CHECK(hausdorff_distance(c, c) == 0.0);
    CHECK_THAT(hausdorff_distance(c, circle(0.1, 0.0, 1.0, 4000)), WithinAbs(0.1, 2e-3));
    CHECK(throws_code(ErrorCode::empty_set, [&] { hausdorff_distance(c, {}); }));
}
