#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "fermi/ellipse.hpp"
#include "fermi/errors.hpp"
#include "fermi/wigner.hpp"

namespace fermi {

struct ContourSet {
    std::vector<std::vector<PhasePoint>> components;

    std::vector<PhasePoint> points() const {
        std::vector<PhasePoint> all;
        for (const auto& c : components) all.insert(all.end(), c.begin(), c.end());
        return all;
    }
};

namespace detail {

// Cell edge identifiers: horizontal edges join (i,j)-(i+1,j), vertical edges (i,j)-(i,j+1).
inline std::uint64_t edge_key(bool vertical, std::size_t i, std::size_t j) {
    return (static_cast<std::uint64_t>(vertical) << 63) | (static_cast<std::uint64_t>(i) << 31) |
           static_cast<std::uint64_t>(j);
}

}  // namespace detail

/// Marching-squares level set of field at fraction * max(field). Crossing
/// points are linearly interpolated along cell edges; ambiguous saddle cells
/// are resolved with the cell-centre average. Segments are chained into
/// polylines, one per connected component.
inline ContourSet contour_level(const PhaseSpaceField& field, double level) {
    const std::size_t nq = field.n_q();
    const std::size_t np = field.n_p();
    auto above = [&](std::size_t i, std::size_t j) { return field.at(i, j) >= level; };

    std::map<std::uint64_t, PhasePoint> crossing;
    auto crossing_point = [&](bool vertical, std::size_t i, std::size_t j) {
        const auto key = detail::edge_key(vertical, i, j);
        if (!crossing.contains(key)) {
            const std::size_t i2 = vertical ? i : i + 1;
            const std::size_t j2 = vertical ? j + 1 : j;
            const double v1 = field.at(i, j);
            const double v2 = field.at(i2, j2);
            const double t = (level - v1) / (v2 - v1);
            crossing[key] = {field.q[i] + t * (field.q[i2] - field.q[i]),
                             field.p[j] + t * (field.p[j2] - field.p[j])};
        }
        return key;
    };

    std::map<std::uint64_t, std::vector<std::uint64_t>> links;
    auto link = [&](std::uint64_t a, std::uint64_t b) {
        links[a].push_back(b);
        links[b].push_back(a);
    };

    for (std::size_t i = 0; i + 1 < nq; ++i) {
        for (std::size_t j = 0; j + 1 < np; ++j) {
            // corners: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1)
            const std::array<bool, 4> up{above(i, j), above(i + 1, j), above(i + 1, j + 1), above(i, j + 1)};
            // edges: 0 bottom, 1 right, 2 top, 3 left
            const std::array<std::array<std::size_t, 3>, 4> edges{{{0, i, j}, {1, i + 1, j}, {0, i, j + 1}, {1, i, j}}};
            auto edge = [&](int e) {
                return crossing_point(edges[e][0] == 1, edges[e][1], edges[e][2]);
            };
            std::array<int, 4> cut{};
            int n_cut = 0;
            for (int e = 0; e < 4; ++e)
                if (up[e] != up[(e + 1) % 4]) cut[n_cut++] = e;
            if (n_cut == 2) {
                link(edge(cut[0]), edge(cut[1]));
            } else if (n_cut == 4) {
                const double centre =
                    0.25 * (field.at(i, j) + field.at(i + 1, j) + field.at(i + 1, j + 1) + field.at(i, j + 1));
                const bool centre_up = centre >= level;
                // isolate the corners on the opposite side of the centre;
                // corner k touches edges k-1 and k
                for (int corner = 0; corner < 4; ++corner)
                    if (up[corner] != centre_up) link(edge((corner + 3) % 4), edge(corner));
            }
        }
    }
    require(!links.empty(), ErrorCode::empty_contour, "level does not cross the field");

    ContourSet out;
    std::map<std::uint64_t, bool> visited;
    auto walk = [&](std::uint64_t start) {
        std::vector<PhasePoint> chain;
        std::uint64_t prev = std::numeric_limits<std::uint64_t>::max();
        std::uint64_t cur = start;
        while (true) {
            visited[cur] = true;
            chain.push_back(crossing.at(cur));
            std::uint64_t next = std::numeric_limits<std::uint64_t>::max();
            for (auto cand : links.at(cur))
                if (cand != prev && !visited[cand]) {
                    next = cand;
                    break;
                }
            if (next == std::numeric_limits<std::uint64_t>::max()) break;
            prev = cur;
            cur = next;
        }
        out.components.push_back(std::move(chain));
    };
    // open chains first (endpoints have a single link), then closed loops
    for (const auto& [key, nbrs] : links)
        if (nbrs.size() == 1 && !visited[key]) walk(key);
    for (const auto& [key, nbrs] : links)
        if (!visited[key]) walk(key);
    return out;
}

inline ContourSet contour_fraction(const PhaseSpaceField& field, double fraction) {
    require(fraction > 0.0 && fraction < 1.0, ErrorCode::invalid_argument, "fraction must lie in (0, 1)");
    return contour_level(field, fraction * field.max_value());
}

/// Symmetric Hausdorff distance, brute force.
inline double hausdorff_distance(const std::vector<PhasePoint>& a, const std::vector<PhasePoint>& b) {
    require(!a.empty() && !b.empty(), ErrorCode::empty_set, "Hausdorff distance of an empty set");
    auto directed = [](const std::vector<PhasePoint>& from, const std::vector<PhasePoint>& to) {
        double worst = 0.0;
        for (const auto& x : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& y : to) {
                const double d = (x.q - y.q) * (x.q - y.q) + (x.p - y.p) * (x.p - y.p);
                best = std::min(best, d);
            }
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    };
    return std::max(directed(a, b), directed(b, a));
}

}  // namespace fermi
