// wave_plates.hpp — Jones matrices of rotated retarders.
//
// Convention: a retarder with retardance δ at optic-axis angle θ is
// R(θ)·diag(1, e^{iδ})·R(−θ). Half and quarter plates are the δ = π and
// δ = π/2 cases; with this convention their closed forms come out with no
// leftover global phase:
//   half(θ)    = [[cos2θ,  sin2θ], [sin2θ, −cos2θ]]
//   quarter(θ) = [[cos²θ + i·sin²θ, (1−i)·sinθcosθ],
//                 [(1−i)·sinθcosθ,  sin²θ + i·cos²θ]]
#pragma once

#include <cmath>

#include "qae/linalg.hpp"

namespace qae {

inline constexpr double pi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * (pi / 180.0); }

enum class PlateKind { half, quarter, retarder };

struct WavePlate {
    PlateKind kind = PlateKind::half;
    double angle_deg = 0.0;
    double retardance_rad = pi;  // meaningful for kind == retarder only

    static WavePlate half(double angle_deg) {
        return {PlateKind::half, angle_deg, pi};
    }
    static WavePlate quarter(double angle_deg) {
        return {PlateKind::quarter, angle_deg, pi / 2.0};
    }
    static WavePlate retarder(double angle_deg, double retardance_rad) {
        return {PlateKind::retarder, angle_deg, retardance_rad};
    }
};

inline CMat jones_matrix(const WavePlate& w) {
    // exact slow-axis phases for the two standard plates; exp(i·pi) would
    // otherwise leave ~1e-16 imaginary dust in every half-plate entry
    cplx e;
    switch (w.kind) {
        case PlateKind::half: e = cplx(-1.0, 0.0); break;
        case PlateKind::quarter: e = cplx(0.0, 1.0); break;
        case PlateKind::retarder: e = std::exp(cplx(0.0, w.retardance_rad)); break;
    }
    const double t = deg_to_rad(w.angle_deg);
    const double c = std::cos(t), s = std::sin(t);
    CMat m(2, 2);
    m(0, 0) = c * c + e * s * s;
    m(0, 1) = (1.0 - e) * s * c;
    m(1, 0) = (1.0 - e) * s * c;
    m(1, 1) = s * s + e * c * c;
    return m;
}

}  // namespace qae
