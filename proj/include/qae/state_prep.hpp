// state_prep.hpp — generation of compressible qutrit (qudit) families.
//
// A family is the image of a fixed 2-dimensional subspace: a qubit is dialed
// in with a half/quarter plate pair, embedded into the first two modes, and
// then "scrambled" by a fixed retarder acting on modes (1,2) — a wave plate
// cut for a different wavelength, so its retardance is an odd fraction of π.
// Every state produced this way lies in the span of the two columns of the
// family isometry, which is what makes the set compressible at all.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qae/linalg.hpp"
#include "qae/mesh.hpp"
#include "qae/rng.hpp"
#include "qae/wave_plates.hpp"

namespace qae {

struct PrepSetting {
    double h_deg = 0.0;  // half-wave plate angle
    double q_deg = 0.0;  // quarter-wave plate angle
};

enum class FamilyKind { physical, haar };

// retardance of a half-wave plate for 404 nm light when used at 810 nm
inline constexpr double default_scrambler_retardance() {
    return 2.0 * pi * 404.0 / 810.0;
}

struct PreparationFamily {
    std::size_t dim = 3;
    FamilyKind kind = FamilyKind::physical;
    double scrambler_angle_deg = 0.0;                             // φ_s
    double scrambler_retardance_rad = default_scrambler_retardance();  // δ_s
    std::uint64_t haar_seed = 0;  // haar mode only
};

// d×2 isometry whose column span is the family's compressible subspace:
// scrambler on modes (1,2) applied to the base embedding. The physical base
// is the literal first-two-modes embedding; haar mode swaps in a random
// isometry so tests can decouple results from the hardware-shaped subspace.
inline CMat family_isometry(const PreparationFamily& f) {
    if (f.dim < 3)
        throw std::invalid_argument("family_isometry: need at least 3 modes");
    CMat base(f.dim, 2);
    if (f.kind == FamilyKind::physical) {
        base(0, 0) = 1.0;
        base(1, 1) = 1.0;
    } else {
        base = haar_random_isometry(f.dim, 2, f.haar_seed);
    }
    const TwoModeGate scramble{
        1, 2,
        jones_matrix(WavePlate::retarder(f.scrambler_angle_deg,
                                         f.scrambler_retardance_rad))};
    return embed_two_mode(scramble, f.dim) * base;
}

inline PureState prepare_state(const PreparationFamily& f,
                               const PrepSetting& p) {
    const CMat qubit_prep = jones_matrix(WavePlate::quarter(p.q_deg)) *
                            jones_matrix(WavePlate::half(p.h_deg));
    PureState qubit{{qubit_prep(0, 0), qubit_prep(1, 0)}};  // acting on (1,0)ᵀ
    return apply_unitary(family_isometry(f), qubit);
}

// independent uniform plate angles on [0°, 180°); h then q per setting
inline std::vector<PrepSetting> sample_prep_settings(std::size_t count,
                                                     std::uint64_t seed) {
    if (count == 0)
        throw std::invalid_argument("sample_prep_settings: count must be >= 1");
    Rng rng(seed);
    std::vector<PrepSetting> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double h = rng.uniform(0.0, 180.0);
        const double q = rng.uniform(0.0, 180.0);
        out.push_back({h, q});
    }
    return out;
}

inline PreparationFamily drift_family(const PreparationFamily& f,
                                      double delta_deg) {
    PreparationFamily g = f;
    g.scrambler_angle_deg = wrap_angle(g.scrambler_angle_deg + delta_deg);
    return g;
}

}  // namespace qae
