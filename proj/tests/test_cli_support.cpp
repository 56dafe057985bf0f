#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fermi/fermi.hpp"

using namespace fermi;
using Catch::Approx;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scenario_dir() {
    const char* dir = std::getenv("FERMI_SCENARIO_DIR");
    return dir ? fs::path(dir) : fs::path("scenarios");
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "fermi_cli_support";
    fs::create_directories(dir);
    return dir / name;
}

json minimal() {
    return json::parse(R"({
        "system": {"kind": "free"},
        "state": {"kind": "gaussian", "q0": 0, "p0": 1, "delta": 1},
        "times": {"values": [0, 1]}
    })");
}

ErrorCode code_of(const json& doc) {
    try {
        parse_scenario(doc);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::invalid_argument;  // parsed fine; callers expect a failure
}

std::string read_all(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("minimal scenario uses defaults") {
    const auto s = parse_scenario(minimal());
    CHECK(s.constants.hbar == 1.0);
    CHECK(s.grid.size() == 2048);
    CHECK(s.units == TimeUnits::absolute);
    CHECK(s.times == std::vector<double>{0.0, 1.0});
    CHECK_FALSE(s.is_superposition());
    CHECK_FALSE(s.compton.has_value());
}

TEST_CASE("tau and phase units convert to absolute time") {
    auto doc = minimal();
    doc["constants"] = {{"hbar", 0.5}, {"mass", 2.0}};
    doc["state"]["delta"] = 1.5;
    doc["times"] = {{"units", "tau"}, {"values", {1.0, -2.0}}};
    const auto s = parse_scenario(doc);
    CHECK(s.times[0] == Approx(2.0 * 1.5 * 1.5 / 0.5));
    CHECK(s.times[1] == Approx(-2.0 * 2.0 * 1.5 * 1.5 / 0.5));
    CHECK(s.time_values[1] == -2.0);

    const auto f3 = load_scenario(scenario_dir() / "fig3.json");
    const double omega0 = std::get<HarmonicOscillator>(f3.system).omega0;
    REQUIRE(f3.times.size() == 8);
    CHECK(f3.times[7] * omega0 == Approx(7.0 * std::numbers::pi / 4.0));
}

TEST_CASE("malformed scenarios are invalid_scenario") {
    auto bad_system = minimal();
    bad_system["system"]["kind"] = "pendulum";
    CHECK(code_of(bad_system) == ErrorCode::invalid_scenario);

    auto missing_times = minimal();
    missing_times.erase("times");
    CHECK(code_of(missing_times) == ErrorCode::invalid_scenario);

    auto negative_delta = minimal();
    negative_delta["state"]["delta"] = -1.0;
    CHECK(code_of(negative_delta) == ErrorCode::invalid_scenario);

    auto tiny_grid = minimal();
    tiny_grid["grid"] = {{"q_min", 1.0}, {"q_max", -1.0}, {"n_points", 16}};
    CHECK(code_of(tiny_grid) == ErrorCode::invalid_scenario);

    auto harmonic_mismatch = minimal();
    harmonic_mismatch["system"] = {{"kind", "harmonic"}, {"omega0", 1.0}};
    CHECK(code_of(harmonic_mismatch) == ErrorCode::invalid_scenario);

    auto phase_on_free = minimal();
    phase_on_free["times"]["units"] = "phase";
    CHECK(code_of(phase_on_free) == ErrorCode::invalid_scenario);

    auto both_widths = json::parse(R"({
        "system": {"kind": "harmonic", "omega0": 1},
        "state": {"kind": "harmonic_gaussian", "alpha": 1, "B": 1},
        "times": {"units": "phase", "values": [0]}
    })");
    CHECK(code_of(both_widths) == ErrorCode::invalid_scenario);

    auto bad_fraction = minimal();
    bad_fraction["wigner"] = {{"fraction", 1.5}};
    CHECK(code_of(bad_fraction) == ErrorCode::invalid_scenario);

    CHECK_THROWS_AS(load_scenario(scratch("does_not_exist.json")), Error);
    std::ofstream(scratch("broken.json")) << "{ not json";
    try {
        load_scenario(scratch("broken.json"));
        FAIL("broken JSON parsed");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_scenario);
    }
}

TEST_CASE("shipped presets load and match the reference parameter sets") {
    const auto f1 = load_scenario(scenario_dir() / "fig1.json");
    CHECK(std::holds_alternative<FreeParticle>(f1.system));
    CHECK(std::get<GaussianParams>(f1.state).p0 == 2.0);
    CHECK(f1.times == std::vector<double>{-3, -2, -1, 0, 1, 2, 3});

    const auto f2 = load_scenario(scenario_dir() / "fig2.json");
    CHECK(std::get<UniformForce>(f2.system).force == 1.5);

    const auto f3 = load_scenario(scenario_dir() / "fig3.json");
    const auto& hp = std::get<HarmonicGaussianParams>(f3.state);
    CHECK(hp.squeeze(1.0, f3.constants) == Approx(0.1).epsilon(1e-14));
    CHECK(hp.q_amplitude * hp.q_amplitude == Approx(20.0));

    const auto sp = load_scenario(scenario_dir() / "superposition.json");
    CHECK(sp.is_superposition());
    CHECK_FALSE(sp.packet().has_value());
}

TEST_CASE("scenario states follow the closed forms") {
    const auto s = load_scenario(scenario_dir() / "fig2.json");
    const auto states = scenario_states(s, s.grid);
    REQUIRE(states.size() == 7);
    const auto m = moments(states[4]);
    const auto want = analytic_moments(s.system, *s.packet(), s.times[4], s.constants);
    CHECK(m.mean_q == Approx(want.mean_q).margin(1e-9));
    CHECK(m.mean_p == Approx(want.mean_p).margin(1e-9));
}

TEST_CASE("superposition states come from the oracle") {
    auto doc = load_scenario(scenario_dir() / "superposition.json");
    doc.times = {0.0, 0.5};
    doc.time_values = doc.times;
    PropagationDiagnostics diag;
    const auto states = scenario_states(doc, doc.grid, &diag);
    REQUIRE(states.size() == 2);
    CHECK(l2_distance(states[0], initial_state(doc, doc.grid)) == 0.0);
    CHECK(diag.norm_drift < 1e-10);
}

TEST_CASE("number formatting") {
    for (double x : {0.1, std::numbers::pi, -1.0 / 3.0, 6.02214076e23, 5e-324}) CHECK(std::strtod(io::format_double(x).c_str(), nullptr) == x);
    CHECK(io::round12(std::numbers::pi) == 3.14159265359);
    CHECK(io::number(std::nan("")).is_null());
    CHECK(io::number(1.0 / 3.0).get<double>() == 0.333333333333);
}

TEST_CASE("binary field round trip") {
    const PhysicalConstants k;
    const Grid grid(-10.0, 10.0, 64);
    const auto field = wigner_transform(gaussian_packet({0.5, -1.0, 1.0}, grid, k), 32);
    io::write_field_binary(scratch("field.bin"), field);
    const auto back = io::read_field_binary(scratch("field.bin"));
    REQUIRE(back.n_q() == field.n_q());
    REQUIRE(back.n_p() == field.n_p());
    CHECK(back.values == field.values);
    CHECK(back.q.front() == field.q.front());
    CHECK(back.p.back() == field.p.back());
    CHECK(fs::file_size(scratch("field.bin")) == 48 + 8 * field.values.size());

    std::ofstream(scratch("short.bin"), std::ios::binary) << "abc";
    CHECK_THROWS_AS(io::read_field_binary(scratch("short.bin")), Error);
}

TEST_CASE("curve CSV column order follows the dimensionless flag") {
    const PhysicalConstants k;
    const Grid grid(-20.0, 20.0, 256);
    const auto curve = fermi_branches(gaussian_packet({0.0, 1.0, 2.0}, grid, k));
    const io::AxisScale scale{2.0, 0.5};
    io::write_curve_csv(scratch("raw.csv"), curve, scale, false);
    io::write_curve_csv(scratch("dimless.csv"), curve, scale, true);
    const auto raw = read_all(scratch("raw.csv"));
    const auto dimless = read_all(scratch("dimless.csv"));
    CHECK(raw.rfind("q,re_p_plus,", 0) == 0);
    CHECK(dimless.rfind("q_dimensionless,re_p_plus_dimensionless,", 0) == 0);

    // row 129 lies just right of the packet centre
    std::istringstream lines(dimless);
    std::string line;
    for (int i = 0; i <= 129; ++i) std::getline(lines, line);
    std::vector<double> cells;
    std::stringstream row(line);
    for (std::string cell; std::getline(row, cell, ',');) cells.push_back(std::stod(cell));
    REQUIRE(cells.size() == 12);
    CHECK(cells[0] == Approx(cells[5] / 2.0));
    CHECK(cells[1] == Approx(cells[6] / 0.5));
}

TEST_CASE("measurement CSV is deterministic and long-format") {
    const Moments truth{0.0, 0.0, 1.0, 0.5, 0.5};
    const auto a = simulate_measurements(truth, {0.5, 1.0}, 100, 9, true);
    const auto b = simulate_measurements(truth, {0.5, 1.0}, 100, 9, true);
    io::write_measurement_csv(scratch("m1.csv"), a.samples);
    io::write_measurement_csv(scratch("m2.csv"), b.samples);
    const auto text = read_all(scratch("m1.csv"));
    CHECK(text == read_all(scratch("m2.csv")));
    CHECK(text.rfind("experiment_id,sample_index,observable,value\n1,0,q,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 301);
}

TEST_CASE("unwritable output is an io error") {
    std::ofstream(scratch("plain_file")) << "x";
    try {
        io::write_json(scratch("plain_file") / "sub" / "out.json", json::object());
        FAIL("wrote below a regular file");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::io);
    } catch (const fs::filesystem_error&) {
        SUCCEED("filesystem refused the directory");
    }
}

TEST_CASE("scenario checks pass on the presets") {
    const verify::Options opt{false};
    for (const char* name : {"fig1.json", "fig3.json", "superposition.json"}) {
        INFO(name);
        for (const auto& r : verify::scenario_checks(load_scenario(scenario_dir() / name), opt)) {
            INFO(r.name << ": " << r.detail);
            CHECK(r.passed);
        }
    }
}
