// mesh.hpp — the trainable wave-plate mesh: layout and unitary assembly.
//
// The mesh is a triangular arrangement of adjacent-mode gate slots, each a
// quarter-wave plate after a half-wave plate. Relative to a full triangular
// decomposition of U(d) it drops the rows acting wholly inside the kept
// block (and all single-mode phases) — those factors cannot change junk-mode
// occupation, so the autoencoder never needs them. What remains is
// d(d−1)/2 − n(n−1)/2 slots, two angles each.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qae/wave_plates.hpp"

namespace qae {

struct GateSlot {
    std::size_t mode_lo = 0;  // acts on modes (mode_lo, mode_lo + 1)
    std::size_t hwp_index = 0;
    std::size_t qwp_index = 0;
};

struct MeshLayout {
    std::size_t dim = 0;
    std::size_t keep = 0;
    std::vector<GateSlot> gates;

    std::size_t param_count() const { return 2 * gates.size(); }
};

// Rows d−1 down to n of the triangular decomposition; within a row, slots
// run (0,1), (1,2), … in increasing mode order. For (3,2) this is the pinned
// order [(0,1), (1,2)], which leaves U[0,2] structurally zero.
inline MeshLayout build_mesh(std::size_t d, std::size_t n) {
    if (n < 1 || n >= d)
        throw std::invalid_argument("build_mesh: need 1 <= n < d");
    MeshLayout layout;
    layout.dim = d;
    layout.keep = n;
    std::size_t next = 0;
    for (std::size_t row = d - 1; row >= n; --row)
        for (std::size_t i = 0; i < row; ++i) {
            layout.gates.push_back({i, next, next + 1});
            next += 2;
        }
    return layout;
}

inline double wrap_angle(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0.0) w += 360.0;
    return w;
}

struct ParameterVector {
    std::vector<double> angles_deg;  // stored wrapped into [0°, 360°)

    std::size_t size() const { return angles_deg.size(); }
    double operator[](std::size_t k) const { return angles_deg[k]; }
};

inline ParameterVector wrapped(std::vector<double> angles_deg) {
    for (double& a : angles_deg) a = wrap_angle(a);
    return ParameterVector{std::move(angles_deg)};
}

// one slot's 2×2 block: quarter plate applied after the half plate
inline CMat slot_block(const GateSlot& g, const ParameterVector& x) {
    return jones_matrix(WavePlate::quarter(x[g.qwp_index])) *
           jones_matrix(WavePlate::half(x[g.hwp_index]));
}

inline CMat mesh_unitary(const MeshLayout& layout, const ParameterVector& x) {
    if (x.size() != layout.param_count())
        throw std::invalid_argument("mesh_unitary: parameter count mismatch");
    // later slots multiply on the left; applied as in-place row updates, so
    // rows a gate never touches keep their entries bit-exactly
    CMat u = CMat::identity(layout.dim);
    for (const GateSlot& g : layout.gates) {
        const CMat b = slot_block(g, x);
        const std::size_t lo = g.mode_lo, hi = g.mode_lo + 1;
        for (std::size_t j = 0; j < layout.dim; ++j) {
            const cplx top = u(lo, j), bot = u(hi, j);
            u(lo, j) = b(0, 0) * top + b(0, 1) * bot;
            u(hi, j) = b(1, 0) * top + b(1, 1) * bot;
        }
    }
    return u;
}

}  // namespace qae
