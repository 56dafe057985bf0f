#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "fermi/contour.hpp"
#include "fermi/fermi_curve.hpp"
#include "fermi/gaussian_dynamics.hpp"
#include "fermi/measurement.hpp"
#include "fermi/scenario.hpp"
#include "fermi/schrodinger.hpp"
#include "fermi/wigner.hpp"

namespace fermi::verify {

struct CheckResult {
    int id = 0;  // acceptance criterion number, 0 for scenario checks
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;  // 0: no runtime budget
};

struct Options {
    bool enforce_budgets = true;
};

namespace detail {

inline constexpr double pi = std::numbers::pi;

inline std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

/// Largest coefficient difference relative to the largest coefficient magnitude.
inline double coeff_error(const EllipseCoeffs& got, const EllipseCoeffs& want) {
    const double scale = std::max({std::abs(want.a), std::abs(want.b), std::abs(want.c)});
    return std::max({std::abs(got.a - want.a), std::abs(got.b - want.b), std::abs(got.c - want.c)}) / scale;
}

/// Runs body, timing it; body returns (passed, detail). Module errors fail the check.
inline CheckResult timed(int id, std::string name, double budget, const Options& opt,
                         const std::function<std::pair<bool, std::string>()>& body) {
    CheckResult r{id, std::move(name), false, "", 0.0, budget};
    const auto start = std::chrono::steady_clock::now();
    try {
        auto [ok, detail] = body();
        r.passed = ok;
        r.detail = std::move(detail);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (opt.enforce_budgets && budget > 0.0 && r.seconds >= budget) {
        r.passed = false;
        r.detail += fmt("; runtime %.2f s over budget %.0f s", r.seconds, budget);
    }
    return r;
}

}  // namespace detail

// Reference parameter sets (hbar = m = delta = omega0 = 1).

struct GaussianCase {
    SystemSpec system;
    GaussianParams params;
    std::vector<double> taus;
    Grid grid;
};

/// Free packet, p0 = 2, tau = -3..3.
inline GaussianCase figure1_case(std::size_t n = 2048) {
    return {FreeParticle{}, {0.0, 2.0, 1.0}, {-3, -2, -1, 0, 1, 2, 3}, Grid(-40.0, 40.0, n)};
}

/// Uniform force with m delta^3 F0 / hbar^2 = 1.5, q0 = p0 = 0, tau = -3..3.
inline GaussianCase figure2_case(std::size_t n = 2048) {
    return {UniformForce{1.5}, {0.0, 0.0, 1.0}, {-3, -2, -1, 0, 1, 2, 3}, Grid(-40.0, 40.0, n)};
}

struct HarmonicCase {
    double omega0;
    HarmonicGaussianParams params;
    std::vector<double> times;
    Grid grid;
};

/// Squeezed state B = 0.1, m omega0 Q0^2 / hbar = 20, omega0 t + phi = 0, pi/4, ..., 7pi/4.
inline HarmonicCase figure3_case(std::size_t n = 2048) {
    HarmonicCase c{1.0, HarmonicGaussianParams::from_squeeze(0.1, std::sqrt(20.0), 0.0, 1.0, PhysicalConstants{}), {},
                   Grid(-20.0, 20.0, n)};
    for (int k = 0; k < 8; ++k) c.times.push_back(k * detail::pi / 4.0);
    return c;
}

inline CheckResult check_area_conservation(const Options& opt = {}) {
    return detail::timed(1, "area conservation", 5.0, opt, [] {
        const auto fc = figure1_case();
        const PhysicalConstants k;
        double worst = 0.0;
        for (double tau : fc.taus) {
            const double area = enclosed_area(fermi_branches(closed_form_state(fc.system, fc.params, tau, fc.grid, k)));
            worst = std::max(worst, std::abs(area - detail::pi) / detail::pi);
        }
        return std::pair{worst < 1e-4, detail::fmt("max relative area error %.3g over 7 times (tol 1e-4)", worst)};
    });
}

inline CheckResult check_coefficient_reproduction(const Options& opt = {}) {
    return detail::timed(2, "coefficient reproduction", 0.0, opt, [] {
        const auto fc = figure1_case();
        const PhysicalConstants k;
        double worst = 0.0;
        double at_one = 0.0;
        for (double tau : fc.taus) {
            const auto fit = fit_ellipse(fermi_branches(closed_form_state(fc.system, fc.params, tau, fc.grid, k)));
            worst = std::max(worst, detail::coeff_error(fit.coeffs, analytic_ellipse(fc.system, fc.params, tau, k)));
            if (tau == 1.0) at_one = detail::coeff_error(fit.coeffs, {1.0, 2.0, -1.0});
        }
        return std::pair{worst < 1e-5 && at_one < 1e-5,
                         detail::fmt("max relative coefficient error %.3g; (a,b,c) vs (1,2,-1) at tau=1: %.3g (tol 1e-5)",
                                     worst, at_one)};
    });
}

inline CheckResult check_force_independence(const Options& opt = {}) {
    return detail::timed(3, "force independence", 0.0, opt, [] {
        const auto f2 = figure2_case();
        const PhysicalConstants k;
        const double force = std::get<UniformForce>(f2.system).force;
        bool identical = true;
        double fit_error = 0.0;
        double analytic_offset = 0.0;
        double fitted_offset = 0.0;
        for (double tau : f2.taus) {
            const auto eu = analytic_ellipse(f2.system, f2.params, tau, k);
            const auto ef = analytic_ellipse(FreeParticle{}, f2.params, tau, k);
            identical = identical && eu.a == ef.a && eu.b == ef.b && eu.c == ef.c;
            const auto fit = fit_ellipse(fermi_branches(closed_form_state(f2.system, f2.params, tau, f2.grid, k)));
            fit_error = std::max(fit_error, detail::coeff_error(fit.coeffs, eu));
            const auto on_analytic = center_parabola(f2.params, force, k, {eu.center_p});
            analytic_offset = std::max(analytic_offset, std::abs(on_analytic[0].q - eu.center_q));
            const auto on_fitted = center_parabola(f2.params, force, k, {fit.coeffs.center_p});
            fitted_offset = std::max(fitted_offset, std::abs(on_fitted[0].q - fit.coeffs.center_q));
        }
        const bool ok = identical && fit_error < 1e-5 && analytic_offset < 1e-8 && fitted_offset < 1e-8;
        return std::pair{ok, std::string(identical ? "closed-form (a,b,c) identical to free" : "closed-form (a,b,c) differ") +
                                 detail::fmt("; fitted coefficient error %.3g (tol 1e-5); center offset from parabola "
                                             "%.3g analytic, %.3g fitted (tol 1e-8)",
                                             fit_error, analytic_offset, fitted_offset)};
    });
}

inline CheckResult check_harmonic_squeezed(const Options& opt = {}) {
    return detail::timed(4, "harmonic squeezed state", 0.0, opt, [] {
        const auto f3 = figure3_case();
        const PhysicalConstants k;
        const SystemSpec sys = HarmonicOscillator{f3.omega0};
        double det_error = 0.0;
        double fit_error = 0.0;
        for (double t : f3.times) {
            const auto e = analytic_ellipse(sys, f3.params, t, k);
            det_error = std::max(det_error, std::abs(e.determinant() - 1.0 / (k.hbar * k.hbar)));
            const auto fit = fit_ellipse(fermi_branches(harmonic_state(f3.params, f3.omega0, t, f3.grid, k)));
            fit_error = std::max(fit_error, detail::coeff_error(fit.coeffs, e));
        }
        return std::pair{det_error < 1e-10 && fit_error < 1e-5,
                         detail::fmt("|ab - c^2 - 1/hbar^2| max %.3g (tol 1e-10); fitted coefficient error %.3g (tol 1e-5)",
                                     det_error, fit_error)};
    });
}

inline CheckResult check_coherent_circle(const Options& opt = {}) {
    return detail::timed(5, "coherent-state circle", 0.0, opt, [] {
        const PhysicalConstants k;
        const double omega0 = 1.0;
        const auto params = HarmonicGaussianParams::from_squeeze(1.0, 3.0, 0.0, omega0, k);
        const Grid grid(-20.0, 20.0, 2048);
        const double radius = std::sqrt(k.hbar / (k.mass * omega0));
        const double mw = k.mass * omega0;
        double worst = 0.0;
        double r_min = 1e300;
        double r_max = 0.0;
        for (int j = 0; j <= 8; ++j) {
            const double t = j * 2.0 * detail::pi / (8.0 * omega0);
            const auto fit = fit_ellipse(fermi_branches(harmonic_state(params, omega0, t, grid, k))).coeffs;
            // in (q, p / m omega0) the conic reads a q~^2 + b (m omega0)^2 p'~^2 + 2 c m omega0 q~ p'~ = 1
            const double ra = 1.0 / std::sqrt(fit.a);
            const double rb = 1.0 / std::sqrt(fit.b * mw * mw);
            const double skew = std::abs(fit.c * mw) / fit.a;
            worst = std::max({worst, std::abs(ra - radius), std::abs(rb - radius), skew * radius});
            r_min = std::min({r_min, ra, rb});
            r_max = std::max({r_max, ra, rb});
        }
        return std::pair{worst < 1e-6 && r_max - r_min < 1e-6,
                         detail::fmt("max radius deviation %.3g from sqrt(hbar/m omega0); spread over one period %.3g "
                                     "(tol 1e-6)",
                                     worst, r_max - r_min)};
    });
}

inline CheckResult check_generalized_uncertainty(const Options& opt = {}) {
    return detail::timed(6, "generalized uncertainty", 0.0, opt, [] {
        const PhysicalConstants k;
        const double target = k.hbar * k.hbar / 4.0;
        double closed = 0.0;
        double grid = 0.0;
        for (const auto& gc : {figure1_case(), figure2_case()}) {
            for (double tau : gc.taus) {
                closed = std::max(closed, std::abs(analytic_moments(gc.system, gc.params, tau, k).uncertainty_product() - target));
                const auto m = moments(closed_form_state(gc.system, gc.params, tau, gc.grid, k));
                grid = std::max(grid, std::abs(m.uncertainty_product() - target));
            }
        }
        const auto f3 = figure3_case();
        const SystemSpec sys = HarmonicOscillator{f3.omega0};
        for (double t : f3.times) {
            closed = std::max(closed, std::abs(analytic_moments(sys, f3.params, t, k).uncertainty_product() - target));
            grid = std::max(grid, std::abs(moments(harmonic_state(f3.params, f3.omega0, t, f3.grid, k)).uncertainty_product() - target));
        }
        return std::pair{closed < 1e-8 && grid < 1e-8,
                         detail::fmt("max |dq^2 dp^2 - K^2 - hbar^2/4|: closed form %.3g, grid %.3g (tol 1e-8)", closed, grid)};
    });
}

inline CheckResult check_oracle_equivalence(const Options& opt = {}) {
    return detail::timed(7, "oracle equivalence", 30.0, opt, [] {
        const PhysicalConstants k;
        double worst = 0.0;
        double drift = 0.0;
        auto run = [&](const SystemSpec& sys, const PacketParams& params, const Grid& grid,
                       const std::vector<double>& times, double dt) {
            const auto psi0 = closed_form_state(sys, params, 0.0, grid, k);
            PropagationDiagnostics diag;
            const auto states = propagate_to_times(psi0, sys, times, dt, &diag);
            for (std::size_t i = 0; i < times.size(); ++i)
                worst = std::max(worst, l2_distance(states[i], closed_form_state(sys, params, times[i], grid, k)));
            drift = std::max(drift, diag.norm_drift);
        };
        const std::vector<double> taus{0.5, 1.0, 1.5, 2.0, 2.5};
        const auto f1 = figure1_case();
        const auto f2 = figure2_case();
        run(f1.system, f1.params, f1.grid, taus, 1e-3);
        run(f2.system, f2.params, f2.grid, taus, 1e-3);
        const auto f3 = figure3_case();
        std::vector<double> phases;
        for (int j = 1; j <= 5; ++j) phases.push_back(j * detail::pi / 4.0 / f3.omega0);
        run(HarmonicOscillator{f3.omega0}, f3.params, f3.grid, phases, 1e-4);
        return std::pair{worst < 1e-6 && drift < 1e-10,
                         detail::fmt("max L2 error %.3g (tol 1e-6); max norm drift %.3g (tol 1e-10)", worst, drift)};
    });
}

/// Hausdorff distance between the Wigner contour of `sampled` at `fraction`
/// and the real g_F = 0 branches of `fine`, in units of the field's cell
/// diagonal. Both describe the same state; the curve uses the finer grid.
inline double coincidence_in_cells(const WaveFunction& fine, const WaveFunction& sampled, std::size_t n_p,
                                   double fraction) {
    const auto field = wigner_transform(sampled, n_p);
    const auto contour = contour_fraction(field, fraction).points();
    std::vector<PhasePoint> curve;
    for (const auto& loop : curve_polylines(fermi_branches(fine), 0.1 * field.cell_diagonal()))
        curve.insert(curve.end(), loop.begin(), loop.end());
    return hausdorff_distance(contour, curve) / field.cell_diagonal();
}

inline CheckResult check_wigner_coincidence(const Options& opt = {}) {
    return detail::timed(8, "Wigner coincidence", 60.0, opt, [] {
        const PhysicalConstants k;
        const double fraction = 1.0 / std::numbers::e;
        double worst = 0.0;
        int cases = 0;
        for (const auto& [fine, coarse] : {std::pair{figure1_case(), figure1_case(512)}, std::pair{figure2_case(), figure2_case(512)}}) {
            for (double tau : fine.taus) {
                worst = std::max(worst, coincidence_in_cells(closed_form_state(fine.system, fine.params, tau, fine.grid, k),
                                                             closed_form_state(coarse.system, coarse.params, tau, coarse.grid, k),
                                                             512, fraction));
                ++cases;
            }
        }
        const auto f3 = figure3_case();
        const auto f3w = figure3_case(512);
        for (double t : f3.times) {
            worst = std::max(worst, coincidence_in_cells(harmonic_state(f3.params, f3.omega0, t, f3.grid, k),
                                                         harmonic_state(f3w.params, f3w.omega0, t, f3w.grid, k), 512, fraction));
            ++cases;
        }
        return std::pair{worst < 2.0, detail::fmt("max Hausdorff distance %.3g cell diagonals over %.0f states (tol 2)",
                                                  worst, cases)};
    });
}

/// Total enclosed area of the two-packet superposition (q0 = +/-3 delta) at
/// tau = 0, 0.25, ..., 2, propagated by the split-step oracle.
inline std::vector<std::pair<double, double>> superposition_areas() {
    const PhysicalConstants k;
    const Grid grid(-40.0, 40.0, 2048);
    const auto psi0 = superpose(gaussian_packet({-3.0, 0.0, 1.0}, grid, k), gaussian_packet({3.0, 0.0, 1.0}, grid, k), 1.0, 1.0);
    std::vector<double> taus;
    for (int j = 1; j <= 8; ++j) taus.push_back(0.25 * j);
    const auto states = propagate_to_times(psi0, FreeParticle{}, taus, 1e-3);
    std::vector<std::pair<double, double>> out{{0.0, enclosed_area(fermi_branches(psi0))}};
    for (std::size_t i = 0; i < taus.size(); ++i) out.push_back({taus[i], enclosed_area(fermi_branches(states[i]))});
    return out;
}

inline CheckResult check_superposition_nonconservation(const Options& opt = {}) {
    return detail::timed(9, "superposition non-conservation", 0.0, opt, [] {
        const auto areas = superposition_areas();
        const double a0 = areas.front().second;
        double worst = 0.0;
        double at = 0.0;
        for (const auto& [tau, area] : areas) {
            const double dev = std::abs(area - a0) / a0;
            if (dev > worst) {
                worst = dev;
                at = tau;
            }
        }
        return std::pair{worst > 0.01, detail::fmt("area at t=0 %.6g; largest relative deviation %.3g at tau=%.2f (need > 0.01)",
                                                   a0, worst, at)};
    });
}

/// Round trip psi -> branches -> psi with anchors (rho, rho', theta) read off
/// psi at its peak grid point.
inline double reconstruction_error(const WaveFunction& psi) {
    std::size_t peak = 0;
    for (std::size_t i = 0; i < psi.size(); ++i)
        if (std::abs(psi[i]) > std::abs(psi[peak])) peak = i;
    const auto d = spectral_derivatives(psi.amplitudes(), psi.grid().spacing());
    const double rho = std::abs(psi[peak]);
    const double drho = std::real(d.first[peak] / psi[peak]) * rho;
    const auto back = reconstruct_wavefunction(fermi_branches(psi), psi.grid().position(peak), rho, drho, std::arg(psi[peak]));
    return l2_distance(psi, back, true);
}

inline CheckResult check_reconstruction(const Options& opt = {}) {
    return detail::timed(10, "wave-function reconstruction", 0.0, opt, [] {
        const PhysicalConstants k;
        const Grid grid(-20.0, 20.0, 2048);
        const double e0 = reconstruction_error(gaussian_packet({0.0, 0.0, 1.0}, grid, k));
        const double e1 = reconstruction_error(evolve_free({0.0, 0.0, 1.0}, 1.0, grid, k));
        return std::pair{e0 < 1e-4 && e1 < 1e-4,
                         detail::fmt("L2 round-trip error: minimum packet %.3g, tau=1 packet %.3g (tol 1e-4)", e0, e1)};
    });
}

inline CheckResult check_measurement(const Options& opt = {}) {
    return detail::timed(11, "measurement reconstruction", 20.0, opt, [] {
        const PhysicalConstants k;
        const GaussianParams gp{0.0, 0.0, 1.0};
        const auto truth = analytic_moments(FreeParticle{}, gp, 1.0, k);
        const auto want = analytic_ellipse(FreeParticle{}, gp, 1.0, k);
        const auto est = simulate_measurements(truth, {0.5, 1.0}, 1000000, 20240601).record.estimate;
        // coefficients straight from the estimates; the state sits on the bound,
        // so the uncertainty gate fires for roughly half of all seeds
        const double h2 = k.hbar * k.hbar;
        const EllipseCoeffs got{2.0 * est.var_p / h2, 2.0 * est.var_q / h2, -2.0 * est.correlation_k / h2, est.mean_q,
                                est.mean_p};
        const bool below_bound = est.uncertainty_product() < 0.25 * h2 * (1.0 - 1e-6);
        const double coeff = std::max({std::abs(got.a - want.a) / std::abs(want.a),
                                       std::abs(got.b - want.b) / std::abs(want.b),
                                       std::abs(got.c - want.c) / std::abs(want.c)});
        const double area = std::abs(ellipse_area(got) - detail::pi * k.hbar) / (detail::pi * k.hbar);
        double residual = 0.0;
        for (double nu0 : {0.05, 0.2, 0.5}) {
            for (double phi : {0.2, 0.5, 1.0}) {
                for (double beta0 : {-0.003, 0.0, 0.02}) {
                    ComptonConfig cfg;
                    cfg.nu0 = nu0;
                    cfg.phi = phi;
                    const auto s = compton_solve(cfg, beta0);
                    for (double r : compton_residuals(cfg, beta0, s)) residual = std::max(residual, r);
                }
            }
        }
        return std::pair{coeff < 0.01 && area < 0.02 && residual < 1e-10,
                         detail::fmt("coefficient error %.3g (tol 0.01); area error %.3g (tol 0.02); Compton residual %.3g "
                                     "(tol 1e-10)",
                                     coeff, area, residual) +
                             (below_bound ? "; estimated product below hbar^2/4 (within sampling error)" : "")};
    });
}

/// Fitted c against -2K/hbar^2 and +2K/hbar^2, K from grid moments.
inline CheckResult check_sign_resolution(const Options& opt = {}) {
    return detail::timed(12, "sign of c", 0.0, opt, [] {
        const PhysicalConstants k;
        const double h2 = k.hbar * k.hbar;
        struct Row {
            const char* label;
            WaveFunction psi;
        };
        const Grid wide(-40.0, 40.0, 2048);
        const auto f3 = figure3_case();
        std::vector<Row> rows{
            {"free", evolve_free({0.0, 0.0, 1.0}, 1.0, wide, k)},
            {"uniform", evolve_uniform_force({0.0, 0.0, 1.0}, 1.5, 1.0, wide, k)},
            {"harmonic", harmonic_state(f3.params, f3.omega0, detail::pi / 4.0, f3.grid, k)},
        };
        bool ok = true;
        std::string detail_text;
        for (const auto& row : rows) {
            const double c = fit_ellipse(fermi_branches(row.psi)).coeffs.c;
            const double kk = moments(row.psi).correlation_k;
            const double minus = std::abs(c + 2.0 * kk / h2) / std::abs(c);
            const double plus = std::abs(c - 2.0 * kk / h2) / std::abs(c);
            ok = ok && minus < 1e-5 && plus > 1.0;
            detail_text += std::string(detail_text.empty() ? "" : "; ") + row.label +
                           detail::fmt(": c=%.6g, -2K/hbar^2 off by %.2g, +2K/hbar^2 off by %.2g", c, minus, plus);
        }
        return std::pair{ok, detail_text + " (c = -2K/hbar^2 in all three systems)"};
    });
}

inline std::vector<CheckResult> acceptance_suite(const Options& opt = {}) {
    return {check_area_conservation(opt),       check_coefficient_reproduction(opt), check_force_independence(opt),
            check_harmonic_squeezed(opt),       check_coherent_circle(opt),          check_generalized_uncertainty(opt),
            check_oracle_equivalence(opt),      check_wigner_coincidence(opt),       check_superposition_nonconservation(opt),
            check_reconstruction(opt),          check_measurement(opt),              check_sign_resolution(opt)};
}

/// Checks specific to one scenario file: area, fit and uncertainty at every
/// listed time for single packets; area variation for superpositions.
inline std::vector<CheckResult> scenario_checks(const Scenario& s, const Options& opt = {}) {
    std::vector<CheckResult> out;
    const double area_target = detail::pi * s.constants.hbar;
    if (s.is_superposition()) {
        out.push_back(detail::timed(0, "scenario area variation", 0.0, opt, [&] {
            const auto states = scenario_states(s, s.grid);
            const double a0 = enclosed_area(fermi_branches(initial_state(s, s.grid)));
            double worst = 0.0;
            for (const auto& psi : states) worst = std::max(worst, std::abs(enclosed_area(fermi_branches(psi)) - a0) / a0);
            return std::pair{worst > 0.01, detail::fmt("largest relative area change %.3g (need > 0.01)", worst)};
        }));
        return out;
    }
    const auto params = *s.packet();
    out.push_back(detail::timed(0, "scenario areas", 0.0, opt, [&] {
        double worst = 0.0;
        for (const auto& psi : scenario_states(s, s.grid))
            worst = std::max(worst, std::abs(enclosed_area(fermi_branches(psi)) - area_target) / area_target);
        return std::pair{worst < 1e-4, detail::fmt("max relative area error %.3g (tol 1e-4)", worst)};
    }));
    out.push_back(detail::timed(0, "scenario ellipse fits", 0.0, opt, [&] {
        double worst = 0.0;
        const auto states = scenario_states(s, s.grid);
        for (std::size_t i = 0; i < states.size(); ++i) {
            const auto fit = fit_ellipse(fermi_branches(states[i]));
            worst = std::max(worst, detail::coeff_error(fit.coeffs, analytic_ellipse(s.system, params, s.times[i], s.constants)));
        }
        return std::pair{worst < 1e-5, detail::fmt("max relative coefficient error %.3g (tol 1e-5)", worst)};
    }));
    out.push_back(detail::timed(0, "scenario uncertainty", 0.0, opt, [&] {
        const double target = s.constants.hbar * s.constants.hbar / 4.0;
        double worst = 0.0;
        for (const auto& psi : scenario_states(s, s.grid))
            worst = std::max(worst, std::abs(moments(psi).uncertainty_product() - target));
        return std::pair{worst < 1e-8, detail::fmt("max |dq^2 dp^2 - K^2 - hbar^2/4| %.3g (tol 1e-8)", worst)};
    }));
    out.push_back(detail::timed(0, "scenario Wigner coincidence", 0.0, opt, [&] {
        const Grid wgrid(s.grid.q_min(), s.grid.q_max(), s.wigner.grid_points);
        const auto fine = scenario_states(s, s.grid);
        const auto coarse = scenario_states(s, wgrid);
        double worst = 0.0;
        for (std::size_t i = 0; i < fine.size(); ++i)
            worst = std::max(worst, coincidence_in_cells(fine[i], coarse[i], s.wigner.n_p, 1.0 / std::numbers::e));
        return std::pair{worst < 2.0, detail::fmt("max Hausdorff distance %.3g cell diagonals (tol 2)", worst)};
    }));
    return out;
}

}  // namespace fermi::verify
