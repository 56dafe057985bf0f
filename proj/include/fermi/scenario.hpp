#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fermi/errors.hpp"
#include "fermi/gaussian_dynamics.hpp"
#include "fermi/io.hpp"
#include "fermi/measurement.hpp"
#include "fermi/schrodinger.hpp"
#include "fermi/wavefunction.hpp"

namespace fermi {

struct SuperpositionSpec {
    GaussianParams first;
    GaussianParams second;
    cplx w1{1.0, 0.0};
    cplx w2{1.0, 0.0};
};

using StateSpec = std::variant<GaussianParams, HarmonicGaussianParams, SuperpositionSpec>;

enum class TimeUnits { absolute, tau, phase };

struct MeasurementSpec {
    PrismConstants prism{0.5, 1.0};
    std::size_t samples = 1000000;
    bool write_samples = false;
};

struct ComptonSpec {
    ComptonConfig config;
    double beta0_mean = 0.0;
    double beta0_halfwidth = 1e-3;
};

struct WignerSpec {
    std::size_t n_p = 512;
    std::size_t grid_points = 512;
    double fraction = 0.36787944117144233;  // 1/e
    bool write_csv = false;
};

struct Scenario {
    std::string name = "scenario";
    PhysicalConstants constants;
    Grid grid{-20.0, 20.0, 2048};
    SystemSpec system = FreeParticle{};
    StateSpec state = GaussianParams{};
    TimeUnits units = TimeUnits::absolute;
    std::vector<double> time_values;  // as written in the file
    std::vector<double> times;        // absolute times
    std::uint64_t seed = 0;
    MeasurementSpec measurement;
    std::optional<ComptonSpec> compton;
    WignerSpec wigner;
    double oracle_dt = 1e-3;

    bool is_superposition() const { return std::holds_alternative<SuperpositionSpec>(state); }

    /// Length scale for dimensionless axes: delta for Gaussian packets,
    /// 1/alpha for harmonic ones.
    double length_scale() const {
        if (const auto* g = std::get_if<GaussianParams>(&state)) return g->delta;
        if (const auto* h = std::get_if<HarmonicGaussianParams>(&state)) return 1.0 / h->alpha;
        return std::get<SuperpositionSpec>(state).first.delta;
    }

    io::AxisScale axis_scale() const { return {length_scale(), constants.hbar / length_scale()}; }

    /// Closed-form parameters, absent for superpositions.
    std::optional<PacketParams> packet() const {
        if (const auto* g = std::get_if<GaussianParams>(&state)) return PacketParams{*g};
        if (const auto* h = std::get_if<HarmonicGaussianParams>(&state)) return PacketParams{*h};
        return std::nullopt;
    }
};

namespace detail {

template <typename T>
T field_or(const nlohmann::json& obj, const char* key, T fallback) {
    return obj.contains(key) ? obj.at(key).get<T>() : fallback;
}

inline cplx parse_weight(const nlohmann::json& j) {
    if (j.is_array()) return {j.at(0).get<double>(), j.at(1).get<double>()};
    return {j.get<double>(), 0.0};
}

inline GaussianParams parse_gaussian(const nlohmann::json& j) {
    GaussianParams g{field_or(j, "q0", 0.0), field_or(j, "p0", 0.0), field_or(j, "delta", 1.0)};
    g.validate();
    return g;
}

inline Scenario parse_scenario_unchecked(const nlohmann::json& doc) {
    Scenario s;
    s.name = field_or<std::string>(doc, "name", "scenario");
    if (doc.contains("constants")) {
        const auto& c = doc.at("constants");
        s.constants = {field_or(c, "hbar", 1.0), field_or(c, "mass", 1.0)};
    }
    s.constants.validate();
    if (doc.contains("grid")) {
        const auto& g = doc.at("grid");
        s.grid = Grid(field_or(g, "q_min", -20.0), field_or(g, "q_max", 20.0), field_or<std::size_t>(g, "n_points", 2048));
    }

    const auto& sys = doc.at("system");
    const auto kind = sys.at("kind").get<std::string>();
    if (kind == "free") {
        s.system = FreeParticle{};
    } else if (kind == "uniform_force") {
        s.system = UniformForce{sys.at("F0").get<double>()};
    } else if (kind == "harmonic") {
        s.system = HarmonicOscillator{sys.at("omega0").get<double>()};
    } else {
        fail(ErrorCode::invalid_scenario, "unknown system kind '" + kind + "'");
    }
    validate(s.system);

    const auto& st = doc.at("state");
    const auto state_kind = st.at("kind").get<std::string>();
    if (state_kind == "gaussian") {
        s.state = parse_gaussian(st);
    } else if (state_kind == "harmonic_gaussian") {
        const auto* osc = std::get_if<HarmonicOscillator>(&s.system);
        require(osc != nullptr, ErrorCode::invalid_scenario, "harmonic_gaussian state needs a harmonic system");
        const double q_amp = field_or(st, "Q0", 0.0);
        const double phase = field_or(st, "phi", 0.0);
        HarmonicGaussianParams hp;
        if (st.contains("B")) {
            require(!st.contains("alpha"), ErrorCode::invalid_scenario, "give either alpha or B, not both");
            hp = HarmonicGaussianParams::from_squeeze(st.at("B").get<double>(), q_amp, phase, osc->omega0, s.constants);
        } else {
            hp = {st.at("alpha").get<double>(), q_amp, phase};
        }
        hp.validate();
        s.state = hp;
    } else if (state_kind == "superposition") {
        SuperpositionSpec sp{parse_gaussian(st.at("first")), parse_gaussian(st.at("second")),
                             st.contains("w1") ? parse_weight(st.at("w1")) : cplx{1.0, 0.0},
                             st.contains("w2") ? parse_weight(st.at("w2")) : cplx{1.0, 0.0}};
        s.state = sp;
    } else {
        fail(ErrorCode::invalid_scenario, "unknown state kind '" + state_kind + "'");
    }
    if (std::holds_alternative<HarmonicOscillator>(s.system))
        require(std::holds_alternative<HarmonicGaussianParams>(s.state), ErrorCode::invalid_scenario,
                "harmonic system needs a harmonic_gaussian state");

    const auto& times = doc.at("times");
    const auto units = field_or<std::string>(times, "units", "absolute");
    s.time_values = times.at("values").get<std::vector<double>>();
    require(!s.time_values.empty(), ErrorCode::invalid_scenario, "times.values is empty");
    const double m = s.constants.mass;
    const double hbar = s.constants.hbar;
    for (double v : s.time_values) {
        require(std::isfinite(v), ErrorCode::invalid_scenario, "non-finite time value");
        if (units == "absolute") {
            s.units = TimeUnits::absolute;
            s.times.push_back(v);
        } else if (units == "tau") {
            s.units = TimeUnits::tau;
            const double delta = s.length_scale();
            require(!std::holds_alternative<HarmonicGaussianParams>(s.state), ErrorCode::invalid_scenario,
                    "tau units apply to Gaussian packets; use phase for the oscillator");
            s.times.push_back(v * m * delta * delta / hbar);
        } else if (units == "phase") {
            s.units = TimeUnits::phase;
            const auto* osc = std::get_if<HarmonicOscillator>(&s.system);
            require(osc != nullptr, ErrorCode::invalid_scenario, "phase units need a harmonic system");
            s.times.push_back(v / osc->omega0);
        } else {
            fail(ErrorCode::invalid_scenario, "unknown time units '" + units + "'");
        }
    }

    s.seed = field_or<std::uint64_t>(doc, "seed", 0);
    if (doc.contains("measurement")) {
        const auto& mj = doc.at("measurement");
        s.measurement.prism = {field_or(mj, "c_lin", 0.5), field_or(mj, "d_quad", 1.0)};
        s.measurement.samples = field_or<std::size_t>(mj, "samples", 1000000);
        s.measurement.write_samples = field_or(mj, "write_samples", false);
        require(s.measurement.samples >= 2, ErrorCode::invalid_scenario, "measurement.samples must be >= 2");
        require(s.measurement.prism.d_quad != 0.0, ErrorCode::invalid_scenario, "measurement.d_quad must be non-zero");
    }
    if (doc.contains("compton")) {
        const auto& cj = doc.at("compton");
        ComptonSpec cs;
        cs.config = {cj.at("nu0").get<double>(), cj.at("phi").get<double>(), field_or(cj, "mass", 1.0),
                     field_or(cj, "speed_of_light", 1.0), field_or(cj, "planck_h", 1.0)};
        cs.config.validate();
        cs.beta0_mean = field_or(cj, "beta0_mean", 0.0);
        cs.beta0_halfwidth = field_or(cj, "beta0_halfwidth", 1e-3);
        s.compton = cs;
    }
    if (doc.contains("wigner")) {
        const auto& wj = doc.at("wigner");
        s.wigner.n_p = field_or<std::size_t>(wj, "n_p", 512);
        s.wigner.grid_points = field_or<std::size_t>(wj, "grid_points", 512);
        s.wigner.fraction = field_or(wj, "fraction", s.wigner.fraction);
        s.wigner.write_csv = field_or(wj, "write_csv", false);
        require(s.wigner.fraction > 0.0 && s.wigner.fraction < 1.0, ErrorCode::invalid_scenario,
                "wigner.fraction must lie in (0, 1)");
        Grid(s.grid.q_min(), s.grid.q_max(), s.wigner.grid_points);
    }
    if (doc.contains("oracle")) s.oracle_dt = doc.at("oracle").at("dt").get<double>();
    require(s.oracle_dt > 0.0, ErrorCode::invalid_scenario, "oracle.dt must be positive");
    return s;
}

}  // namespace detail

/// Parses a scenario document. Every malformed or out-of-range entry, including
/// violations of module preconditions, surfaces as invalid_scenario.
inline Scenario parse_scenario(const nlohmann::json& doc) {
    try {
        return detail::parse_scenario_unchecked(doc);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::invalid_scenario) throw;
        fail(ErrorCode::invalid_scenario, e.what());
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::invalid_scenario, e.what());
    }
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(in.good(), ErrorCode::invalid_scenario, "cannot read scenario file " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::invalid_scenario, e.what());
    }
    return parse_scenario(doc);
}

/// State at t = 0 on the given grid.
inline WaveFunction initial_state(const Scenario& s, const Grid& grid) {
    if (const auto* sp = std::get_if<SuperpositionSpec>(&s.state))
        return superpose(gaussian_packet(sp->first, grid, s.constants), gaussian_packet(sp->second, grid, s.constants),
                         sp->w1, sp->w2);
    return closed_form_state(s.system, *s.packet(), 0.0, grid, s.constants);
}

/// States at every scenario time: closed forms for single packets, split-step
/// propagation of the t = 0 state for superpositions.
inline std::vector<WaveFunction> scenario_states(const Scenario& s, const Grid& grid,
                                                 PropagationDiagnostics* diag = nullptr) {
    if (s.is_superposition()) return propagate_to_times(initial_state(s, grid), s.system, s.times, s.oracle_dt, diag);
    std::vector<WaveFunction> out;
    for (double t : s.times) out.push_back(closed_form_state(s.system, *s.packet(), t, grid, s.constants));
    return out;
}

}  // namespace fermi
