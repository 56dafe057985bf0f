#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "fermi/errors.hpp"

namespace fermi {

/// Uniform periodic position grid. Point i sits at q_min + i*dq with
/// dq = (q_max - q_min) / n_points, so q_max itself is the periodic image of q_min.
class Grid {
public:
    Grid(double q_min, double q_max, std::size_t n_points)
        : q_min_(q_min), q_max_(q_max), n_(n_points) {
        require(std::isfinite(q_min) && std::isfinite(q_max) && q_max > q_min,
                ErrorCode::invalid_argument, "grid requires q_max > q_min");
        require(n_points >= 16 && (n_points & (n_points - 1)) == 0, ErrorCode::invalid_argument,
                "grid size must be a power of two >= 16, got " + std::to_string(n_points));
    }

    double q_min() const noexcept { return q_min_; }
    double q_max() const noexcept { return q_max_; }
    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return (q_max_ - q_min_) / static_cast<double>(n_); }
    double position(std::size_t i) const noexcept { return q_min_ + static_cast<double>(i) * spacing(); }

    /// Fractional index of q; not clamped.
    double index_of(double q) const noexcept { return (q - q_min_) / spacing(); }

    bool operator==(const Grid& other) const noexcept {
        return q_min_ == other.q_min_ && q_max_ == other.q_max_ && n_ == other.n_;
    }

private:
    double q_min_;
    double q_max_;
    std::size_t n_;
};

struct PhysicalConstants {
    double hbar = 1.0;
    double mass = 1.0;

    void validate() const {
        require(hbar > 0.0 && mass > 0.0 && std::isfinite(hbar) && std::isfinite(mass),
                ErrorCode::invalid_argument, "hbar and mass must be strictly positive");
    }

    bool operator==(const PhysicalConstants&) const = default;
};

}  // namespace fermi
