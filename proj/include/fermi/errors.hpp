#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fermi {

enum class ErrorCode {
    invalid_argument,
    packet_out_of_box,
    grid_mismatch,
    zero_vector,
    all_masked,
    masked_point,
    no_real_band,
    multiple_bands,
    degenerate_fit,
    uncertainty_violation,
    divergence,
    zero_force,
    no_root,
    regime,
    non_positive_definite,
    empty_contour,
    empty_set,
    numerical,
    invalid_scenario,
    io,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::packet_out_of_box: return "packet-out-of-box";
        case ErrorCode::grid_mismatch: return "grid-mismatch";
        case ErrorCode::zero_vector: return "zero-vector";
        case ErrorCode::all_masked: return "all-masked";
        case ErrorCode::masked_point: return "masked-point";
        case ErrorCode::no_real_band: return "no-real-band";
        case ErrorCode::multiple_bands: return "multiple-bands";
        case ErrorCode::degenerate_fit: return "degenerate-fit";
        case ErrorCode::uncertainty_violation: return "uncertainty-violation";
        case ErrorCode::divergence: return "divergence";
        case ErrorCode::zero_force: return "zero-force";
        case ErrorCode::no_root: return "no-root";
        case ErrorCode::regime: return "regime";
        case ErrorCode::non_positive_definite: return "non-positive-definite";
        case ErrorCode::empty_contour: return "empty-contour";
        case ErrorCode::empty_set: return "empty-set";
        case ErrorCode::numerical: return "numerical";
        case ErrorCode::invalid_scenario: return "invalid-scenario";
        case ErrorCode::io: return "io";
    }
    return "unknown";
}

/// Every failure raised by the library carries a machine-readable code so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) fail(code, what);
}

}  // namespace fermi
