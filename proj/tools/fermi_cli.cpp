// fermi: scenario-driven front end for the g_F phase-space library.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fermi/fermi.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { ok = 0, invalid_scenario = 1, numerical = 2, verification = 3 };

struct RunOptions {
    std::string scenario_path;
    std::string out_dir = "out";
    bool dimensionless = false;
    std::optional<std::uint64_t> seed;
    std::string profile = "default";
};

std::string indexed(const char* stem, std::size_t k, const char* ext) { return stem + ("_" + std::to_string(k)) + ext; }

json time_entry(const fermi::Scenario& s, std::size_t k) {
    return {{"index", k}, {"time", fermi::io::number(s.times[k])}, {"time_value", fermi::io::number(s.time_values[k])}};
}

int run_curve(const fermi::Scenario& s, const RunOptions& opt) {
    const auto states = fermi::scenario_states(s, s.grid);
    const auto packet = s.packet();
    json fits = json::array();
    for (std::size_t k = 0; k < states.size(); ++k) {
        const auto curve = fermi::fermi_branches(states[k]);
        fermi::io::write_curve_csv(fs::path(opt.out_dir) / indexed("curve", k, ".csv"), curve, s.axis_scale(), opt.dimensionless);
        json entry = time_entry(s, k);
        entry["area"] = fermi::io::number(fermi::enclosed_area(curve));
        try {
            const auto fit = fermi::fit_ellipse(curve);
            entry["fit"] = fermi::io::to_json(fit.coeffs);
            entry["fit"]["residual_rms"] = fermi::io::number(fit.residual_rms);
        } catch (const fermi::Error& e) {
            // superpositions split into several bands; no single ellipse
            entry["fit"] = nullptr;
            entry["fit_error"] = e.what();
        }
        if (packet) entry["analytic"] = fermi::io::to_json(fermi::analytic_ellipse(s.system, *packet, s.times[k], s.constants));
        fits.push_back(entry);
    }
    fermi::io::write_json(fs::path(opt.out_dir) / "ellipse_fit.json", {{"scenario", s.name}, {"times", fits}});
    return ok;
}

int run_evolve(const fermi::Scenario& s, const RunOptions& opt) {
    const auto packet = s.packet();
    const auto psi0 = fermi::initial_state(s, s.grid);
    fermi::PropagationDiagnostics diag;
    const auto oracle = fermi::propagate_to_times(psi0, s.system, s.times, s.oracle_dt, &diag);
    std::vector<std::string> header{"index", "time", "time_value"};
    const std::vector<std::string> fields{"mean_q", "mean_p", "var_q", "var_p", "correlation_k"};
    if (packet)
        for (const auto& f : fields) header.push_back("analytic_" + f);
    for (const auto& f : fields) header.push_back("oracle_" + f);
    header.push_back("oracle_uncertainty_product");
    if (packet) header.push_back("l2_error");
    fermi::io::CsvWriter csv(fs::path(opt.out_dir) / "moments.csv", header);
    auto push = [](std::vector<double>& row, const fermi::Moments& m) {
        row.insert(row.end(), {m.mean_q, m.mean_p, m.var_q, m.var_p, m.correlation_k});
    };
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        std::vector<double> row{static_cast<double>(k), s.times[k], s.time_values[k]};
        if (packet) push(row, fermi::analytic_moments(s.system, *packet, s.times[k], s.constants));
        const auto m = fermi::moments(oracle[k]);
        push(row, m);
        row.push_back(m.uncertainty_product());
        if (packet) row.push_back(fermi::l2_distance(oracle[k], fermi::closed_form_state(s.system, *packet, s.times[k], s.grid, s.constants)));
        csv.values(row);
    }
    csv.close();
    for (const auto& w : diag.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    return ok;
}

int run_wigner(const fermi::Scenario& s, const RunOptions& opt) {
    const fermi::Grid wgrid(s.grid.q_min(), s.grid.q_max(), s.wigner.grid_points);
    const auto fine = fermi::scenario_states(s, s.grid);
    const auto coarse = fermi::scenario_states(s, wgrid);
    json entries = json::array();
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        const auto field = fermi::wigner_transform(coarse[k], s.wigner.n_p);
        fermi::io::write_field_binary(fs::path(opt.out_dir) / indexed("field", k, ".bin"), field);
        if (s.wigner.write_csv) fermi::io::write_field_csv(fs::path(opt.out_dir) / indexed("field", k, ".csv"), field);
        const auto contour = fermi::contour_fraction(field, s.wigner.fraction);
        fermi::io::write_contour_csv(fs::path(opt.out_dir) / indexed("contour", k, ".csv"), contour);
        std::vector<fermi::PhasePoint> curve;
        for (const auto& loop : fermi::curve_polylines(fermi::fermi_branches(fine[k]), 0.1 * field.cell_diagonal()))
            curve.insert(curve.end(), loop.begin(), loop.end());
        const double distance = fermi::hausdorff_distance(contour.points(), curve);
        json entry = time_entry(s, k);
        entry["hausdorff"] = fermi::io::number(distance);
        entry["cell_diagonal"] = fermi::io::number(field.cell_diagonal());
        entry["hausdorff_cells"] = fermi::io::number(distance / field.cell_diagonal());
        entry["field_min"] = fermi::io::number(field.min_value());
        entry["field_max"] = fermi::io::number(field.max_value());
        entries.push_back(entry);
    }
    fermi::io::write_json(fs::path(opt.out_dir) / "hausdorff.json",
                          {{"scenario", s.name}, {"fraction", fermi::io::number(s.wigner.fraction)}, {"times", entries}});
    return ok;
}

int run_measure(const fermi::Scenario& s, const RunOptions& opt) {
    const auto packet = s.packet();
    fermi::require(packet.has_value(), fermi::ErrorCode::invalid_scenario, "measure needs a Gaussian state, not a superposition");
    const std::uint64_t seed = opt.seed.value_or(s.seed);
    json entries = json::array();
    for (std::size_t k = 0; k < s.times.size(); ++k) {
        const auto truth = fermi::analytic_moments(s.system, *packet, s.times[k], s.constants);
        const auto data = fermi::simulate_measurements(truth, s.measurement.prism, s.measurement.samples,
                                                       fermi::derive_seed(seed, k), s.measurement.write_samples);
        if (s.measurement.write_samples)
            fermi::io::write_measurement_csv(fs::path(opt.out_dir) / indexed("measurements", k, ".csv"), data.samples);
        json entry = time_entry(s, k);
        entry["estimate"] = fermi::io::to_json(data.record.estimate);
        entry["standard_error"] = fermi::io::to_json(data.record.standard_error);
        entry["truth"] = fermi::io::to_json(truth);
        try {
            const auto e = fermi::ellipse_from_moments(data.record.estimate, s.constants);
            entry["ellipse"] = fermi::io::to_json(e);
            entry["ellipse"]["area"] = fermi::io::number(fermi::ellipse_area(e));
        } catch (const fermi::Error& e) {
            if (e.code() != fermi::ErrorCode::uncertainty_violation) throw;
            entry["ellipse"] = nullptr;
            entry["uncertainty_violation"] = e.what();
        }
        entries.push_back(entry);
    }
    json summary{{"scenario", s.name},
                 {"seed", seed},
                 {"samples", s.measurement.samples},
                 {"prism", {{"c_lin", fermi::io::number(s.measurement.prism.c_lin)}, {"d_quad", fermi::io::number(s.measurement.prism.d_quad)}}},
                 {"times", entries}};
    if (s.compton) {
        const auto& c = *s.compton;
        const auto sol = fermi::compton_solve(c.config, c.beta0_mean);
        const auto residuals = fermi::compton_residuals(c.config, c.beta0_mean, sol);
        const auto lin = fermi::compton_linearize(c.config, c.beta0_mean, c.beta0_halfwidth);
        summary["compton"] = {{"beta0_mean", fermi::io::number(c.beta0_mean)},
                              {"nu", fermi::io::number(sol.nu)},
                              {"beta", fermi::io::number(sol.beta)},
                              {"theta", fermi::io::number(sol.theta)},
                              {"max_residual", fermi::io::number(std::max({residuals[0], residuals[1], residuals[2]}))},
                              {"linear_A", fermi::io::number(lin.intercept)},
                              {"linear_B", fermi::io::number(lin.slope)},
                              {"linearization_residual", fermi::io::number(lin.max_residual)}};
    }
    fermi::io::write_json(fs::path(opt.out_dir) / "measurement_summary.json", summary);
    return ok;
}

int run_reconstruct(const fermi::Scenario& s, const RunOptions& opt) {
    const auto states = fermi::scenario_states(s, s.grid);
    json entries = json::array();
    for (std::size_t k = 0; k < states.size(); ++k) {
        const auto& psi = states[k];
        std::size_t peak = 0;
        for (std::size_t i = 0; i < psi.size(); ++i)
            if (std::abs(psi[i]) > std::abs(psi[peak])) peak = i;
        const auto d = fermi::spectral_derivatives(psi.amplitudes(), psi.grid().spacing());
        const double rho = std::abs(psi[peak]);
        const double drho = std::real(d.first[peak] / psi[peak]) * rho;
        const auto back = fermi::reconstruct_wavefunction(fermi::fermi_branches(psi), psi.grid().position(peak), rho, drho,
                                                          std::arg(psi[peak]));
        fermi::io::write_wavefunction_csv(fs::path(opt.out_dir) / indexed("reconstructed", k, ".csv"), back, &psi);
        json entry = time_entry(s, k);
        entry["anchor_q"] = fermi::io::number(psi.grid().position(peak));
        entry["l2_error"] = fermi::io::number(fermi::l2_distance(psi, back, true));
        entries.push_back(entry);
    }
    fermi::io::write_json(fs::path(opt.out_dir) / "roundtrip.json", {{"scenario", s.name}, {"times", entries}});
    return ok;
}

int run_verify(const fermi::Scenario& s, const RunOptions& opt) {
    const fermi::verify::Options vopt{opt.profile == "strict"};
    auto results = fermi::verify::acceptance_suite(vopt);
    for (auto& r : fermi::verify::scenario_checks(s, vopt)) results.push_back(std::move(r));
    bool all = true;
    json checks = json::array();
    for (const auto& r : results) {
        all = all && r.passed;
        std::printf("%s %s: %s [%.2f s]\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(), r.seconds);
        json entry{{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}};
        if (r.id > 0) entry["criterion"] = r.id;
        if (r.budget_seconds > 0.0) entry["budget_seconds"] = r.budget_seconds;
        checks.push_back(entry);
    }
    fermi::io::write_json(fs::path(opt.out_dir) / "verification.json",
                          {{"scenario", s.name}, {"tolerance_profile", opt.profile}, {"passed", all}, {"checks", checks}});
    return all ? ok : verification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fermi g_F phase-space curves, dynamics, Wigner fields and measurements"};
    app.require_subcommand(1);
    RunOptions opt;
    std::uint64_t seed = 0;

    const std::vector<std::pair<const char*, int (*)(const fermi::Scenario&, const RunOptions&)>> commands{
        {"curve", run_curve},   {"evolve", run_evolve},   {"wigner", run_wigner},
        {"measure", run_measure}, {"verify", run_verify}, {"reconstruct", run_reconstruct}};
    const std::map<std::string, const char*> help{
        {"curve", "g_F = 0 branches per time and ellipse fits"},
        {"evolve", "moments against time, closed form and split-step"},
        {"wigner", "Wigner fields, contours and Hausdorff distances"},
        {"measure", "simulated three-experiment reconstruction"},
        {"verify", "acceptance suite plus scenario checks"},
        {"reconstruct", "psi -> g_F -> psi round trip"}};
    std::vector<CLI::App*> subs;
    for (const auto& [name, fn] : commands) {
        auto* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("--scenario", opt.scenario_path, "scenario JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
        sub->add_flag("--dimensionless", opt.dimensionless, "dimensionless columns lead in curve CSVs");
        sub->add_option("--seed", seed, "override the scenario seed");
        sub->add_option("--tolerance-profile", opt.profile, "strict also enforces runtime budgets")
            ->check(CLI::IsMember({"strict", "default"}))
            ->capture_default_str();
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : invalid_scenario;
    }

    for (std::size_t i = 0; i < subs.size(); ++i) {
        if (!subs[i]->parsed()) continue;
        if (subs[i]->count("--seed") > 0) opt.seed = seed;
        const auto start = std::chrono::steady_clock::now();
        try {
            const auto scenario = fermi::load_scenario(opt.scenario_path);
            const int status = commands[i].second(scenario, opt);
            const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::printf("%s: %s -> %s (%.2f s)\n", commands[i].first, scenario.name.c_str(), opt.out_dir.c_str(), seconds);
            return status;
        } catch (const fermi::Error& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return e.code() == fermi::ErrorCode::invalid_scenario ? invalid_scenario : numerical;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return numerical;
        }
    }
    return ok;
}
