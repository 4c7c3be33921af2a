#ifndef FLOORLINE_TESTS_FIXTURES_HPP
#define FLOORLINE_TESTS_FIXTURES_HPP

#include "floorline/absorption.hpp"
#include "floorline/parity_check.hpp"

#include <vector>

namespace floorline::fixtures {

// Tanner [155, 64, 20] regular (3,5) code: 3x5 table of circulant shifts, p = 31.
inline std::vector<std::vector<int>> tanner_shifts() {
    return {{1, 2, 4, 8, 16}, {5, 10, 20, 9, 18}, {25, 19, 7, 14, 28}};
}

inline SparseParityCheck tanner_code() { return build_qc_matrix(tanner_shifts(), 31); }

// Reference (8,2) absorption-set topology of the Tanner code. Variables and
// internal checks are numbered as drawn in the source figure; with this
// ordering the dominant eigenvector comes out entrywise as published.
inline SetTopology tanner82_topology() {
    const std::vector<std::pair<int, int>> checks = {
        {0, 5}, {1, 6}, {0, 1}, {1, 3}, {2, 3}, {2, 4},
        {4, 5}, {5, 6}, {6, 7}, {0, 7}, {2, 7}};
    return make_topology(8, checks, {0, 0, 0, 1, 1, 0, 0, 0});
}

// Published dominant eigenvector of the (8,2) model (22 entries).
inline std::vector<double> tanner82_eigenvector() {
    return {0.2369, 0.2369, 0.2273, 0.2031, 0.2031, 0.2651, 0.2254, 0.2254,
            0.1660, 0.1261, 0.1483, 0.1483, 0.1261, 0.2031, 0.2651, 0.2031,
            0.2369, 0.2369, 0.2273, 0.2201, 0.2201, 0.2544};
}

// Dominant (8,8) absorption-set topology of the IEEE 802.3an code: eight
// degree-6 variables, five internal edges each, one unsatisfied check per
// variable; 20 degree-2 internal checks.
inline SetTopology ieee88_topology() {
    const std::vector<std::pair<int, int>> checks = {
        {0, 1}, {0, 2}, {0, 4}, {0, 3}, {0, 5},
        {1, 2}, {1, 4}, {1, 3}, {1, 5},
        {2, 4}, {2, 6}, {2, 7},
        {3, 5}, {3, 7}, {3, 6},
        {4, 6}, {4, 7},
        {5, 7}, {5, 6},
        {6, 7}};
    return make_topology(8, checks, std::vector<int>(8, 1));
}

// Structurally analogous stand-in for the out-of-reach 802.3an matrix:
// a (6,32)-regular 384x2048 QC array with deterministic pseudo-random shifts.
inline SparseParityCheck ieee_proxy_code() {
    std::vector<std::vector<int>> shifts(6, std::vector<int>(32));
    std::uint64_t s = 0x2048;
    for (auto& row : shifts)
        for (auto& k : row) {
            s = s * 6364136223846793005ULL + 1442695040888963407ULL;
            k = static_cast<int>((s >> 33) % 64);
        }
    return build_qc_matrix(shifts, 64);
}

} // namespace floorline::fixtures

#endif
