// Extract g_F = 0 ellipses of a free Gaussian packet and compare with the closed form.

#include <cstdio>

#include "fermi/fermi.hpp"

int main() {
    const fermi::PhysicalConstants k;  // hbar = m = 1
    const fermi::Grid grid(-40.0, 40.0, 2048);
    const fermi::GaussianParams packet{0.0, 2.0, 1.0};

    std::printf("%5s %10s %10s %10s %10s %14s\n", "tau", "a", "b", "c", "center_q", "area/pi");
    for (double tau = -3.0; tau <= 3.0; tau += 1.0) {
        const auto psi = fermi::evolve_free(packet, tau, grid, k);
        const auto curve = fermi::fermi_branches(psi);
        const auto fit = fermi::fit_ellipse(curve).coeffs;
        std::printf("%5.1f %10.6f %10.6f %10.6f %10.6f %14.10f\n", tau, fit.a, fit.b, fit.c, fit.center_q,
                    fermi::enclosed_area(curve) / std::numbers::pi);
    }

    const auto exact = fermi::analytic_ellipse(fermi::FreeParticle{}, packet, 1.0, k);
    std::printf("closed form at tau = 1: a = %g, b = %g, c = %g\n", exact.a, exact.b, exact.c);
}
