#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fermi/contour.hpp"
#include "fermi/errors.hpp"
#include "fermi/fermi_curve.hpp"
#include "fermi/measurement.hpp"
#include "fermi/wavefunction.hpp"
#include "fermi/wigner.hpp"

namespace fermi::io {

using nlohmann::json;

/// Shortest decimal form with 17 significant digits (round-trips a double).
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// x rounded to 12 significant digits, for JSON summaries.
inline double round12(double x) {
    if (!std::isfinite(x)) return x;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

/// JSON value for a number; non-finite values become null.
inline json number(double x) { return std::isfinite(x) ? json(round12(x)) : json(nullptr); }

inline std::ofstream open_output(const std::filesystem::path& path, bool binary = false) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    require(out.good(), ErrorCode::io, "cannot open " + path.string() + " for writing");
    return out;
}

inline void write_json(const std::filesystem::path& path, const json& doc) {
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
    require(out.good(), ErrorCode::io, "write failed: " + path.string());
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(open_output(path)), path_(path) {
        row(header);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

    void values(const std::vector<double>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << format_double(cells[i]);
        out_ << '\n';
    }

    ~CsvWriter() { out_.flush(); }

    void close() {
        out_.close();
        require(!out_.fail(), ErrorCode::io, "write failed: " + path_.string());
    }

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

/// Axis scales for dimensionless columns: q / length, p * length / hbar.
struct AxisScale {
    double length = 1.0;
    double momentum = 1.0;
};

/// Curve CSV. Raw columns q, re_p_plus, im_p_plus, re_p_minus, im_p_minus,
/// real_branch, valid are always present; the dimensionless copies follow them
/// unless `dimensionless_first` puts them in front.
inline void write_curve_csv(const std::filesystem::path& path, const FermiCurve& curve, const AxisScale& scale,
                            bool dimensionless_first) {
    const std::vector<std::string> raw{"q", "re_p_plus", "im_p_plus", "re_p_minus", "im_p_minus"};
    std::vector<std::string> scaled;
    for (const auto& name : raw) scaled.push_back(name + "_dimensionless");
    std::vector<std::string> header;
    if (dimensionless_first) header.insert(header.end(), scaled.begin(), scaled.end());
    header.insert(header.end(), raw.begin(), raw.end());
    header.push_back("real_branch");
    header.push_back("valid");
    if (!dimensionless_first) header.insert(header.end(), scaled.begin(), scaled.end());

    CsvWriter csv(path, header);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const std::vector<double> r{curve.q[i], std::real(curve.p_plus[i]), std::imag(curve.p_plus[i]),
                                    std::real(curve.p_minus[i]), std::imag(curve.p_minus[i])};
        std::vector<std::string> cells;
        auto push_scaled = [&] {
            cells.push_back(format_double(r[0] / scale.length));
            for (std::size_t k = 1; k < r.size(); ++k) cells.push_back(format_double(r[k] / scale.momentum));
        };
        if (dimensionless_first) push_scaled();
        for (double v : r) cells.push_back(format_double(v));
        cells.push_back(curve.real_branch[i] ? "1" : "0");
        cells.push_back(curve.valid[i] ? "1" : "0");
        if (!dimensionless_first) push_scaled();
        csv.row(cells);
    }
    csv.close();
}

inline void write_wavefunction_csv(const std::filesystem::path& path, const WaveFunction& psi,
                                   const WaveFunction* reference = nullptr) {
    std::vector<std::string> header{"q", "re_psi", "im_psi"};
    if (reference) {
        header.push_back("re_reference");
        header.push_back("im_reference");
    }
    CsvWriter csv(path, header);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        std::vector<double> v{psi.grid().position(i), std::real(psi[i]), std::imag(psi[i])};
        if (reference) {
            v.push_back(std::real((*reference)[i]));
            v.push_back(std::imag((*reference)[i]));
        }
        csv.values(v);
    }
    csv.close();
}

inline void write_field_csv(const std::filesystem::path& path, const PhaseSpaceField& field) {
    CsvWriter csv(path, {"q", "p", "value"});
    for (std::size_t i = 0; i < field.n_q(); ++i)
        for (std::size_t j = 0; j < field.n_p(); ++j) csv.values({field.q[i], field.p[j], field.at(i, j)});
    csv.close();
}

/// Compact binary: uint64 n_q, uint64 n_p, float64 q_min, q_max, p_min, p_max
/// (first and last grid values), then n_q * n_p float64 values, q-major.
/// Native byte order.
inline void write_field_binary(const std::filesystem::path& path, const PhaseSpaceField& field) {
    auto out = open_output(path, true);
    const std::uint64_t dims[2]{field.n_q(), field.n_p()};
    const double bounds[4]{field.q.front(), field.q.back(), field.p.front(), field.p.back()};
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    out.write(reinterpret_cast<const char*>(bounds), sizeof bounds);
    out.write(reinterpret_cast<const char*>(field.values.data()),
              static_cast<std::streamsize>(field.values.size() * sizeof(double)));
    require(out.good(), ErrorCode::io, "write failed: " + path.string());
}

inline PhaseSpaceField read_field_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::io, "cannot open " + path.string());
    std::uint64_t dims[2];
    double bounds[4];
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    in.read(reinterpret_cast<char*>(bounds), sizeof bounds);
    require(in.good() && dims[0] >= 2 && dims[1] >= 2, ErrorCode::io, "malformed field header");
    PhaseSpaceField field;
    field.q.resize(dims[0]);
    field.p.resize(dims[1]);
    for (std::size_t i = 0; i < dims[0]; ++i)
        field.q[i] = bounds[0] + (bounds[1] - bounds[0]) * static_cast<double>(i) / static_cast<double>(dims[0] - 1);
    for (std::size_t j = 0; j < dims[1]; ++j)
        field.p[j] = bounds[2] + (bounds[3] - bounds[2]) * static_cast<double>(j) / static_cast<double>(dims[1] - 1);
    field.values.resize(dims[0] * dims[1]);
    in.read(reinterpret_cast<char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * sizeof(double)));
    require(in.good(), ErrorCode::io, "truncated field file " + path.string());
    return field;
}

inline void write_contour_csv(const std::filesystem::path& path, const ContourSet& contour) {
    CsvWriter csv(path, {"component", "q", "p"});
    for (std::size_t c = 0; c < contour.components.size(); ++c)
        for (const auto& pt : contour.components[c]) csv.row({std::to_string(c), format_double(pt.q), format_double(pt.p)});
    csv.close();
}

/// Long-format records: experiment_id, sample_index, observable, value.
/// Experiment ids 1, 2, 3 are the microscope, velocimeter and prism runs.
inline void write_measurement_csv(const std::filesystem::path& path, const MeasurementSamples& samples) {
    CsvWriter csv(path, {"experiment_id", "sample_index", "observable", "value"});
    auto dump = [&](const char* id, const char* observable, const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            csv.row({id, std::to_string(i), observable, format_double(values[i])});
    };
    dump("1", "q", samples.positions);
    dump("2", "p", samples.momenta);
    dump("3", "xi", samples.screen);
    csv.close();
}

inline json to_json(const EllipseCoeffs& e) {
    return {{"a", number(e.a)},
            {"b", number(e.b)},
            {"c", number(e.c)},
            {"center_q", number(e.center_q)},
            {"center_p", number(e.center_p)}};
}

inline json to_json(const Moments& m) {
    return {{"mean_q", number(m.mean_q)},
            {"mean_p", number(m.mean_p)},
            {"var_q", number(m.var_q)},
            {"var_p", number(m.var_p)},
            {"correlation_k", number(m.correlation_k)}};
}

}  // namespace fermi::io
