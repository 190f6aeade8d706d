// autoencoder.hpp — junk-mode occupation, the training cost, and the
// encode/decode maps.
//
// The junk modes are the trailing d−n modes by convention. Compression
// succeeds exactly to the extent the mesh steers a state's amplitude out of
// them: the encoding fidelity obeys |⟨Ψi|Ψf⟩|² = 1 − P_junk identically.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qae/linalg.hpp"

namespace qae {

struct TrainingSet {
    std::vector<PureState> states;
    std::size_t keep = 2;  // n: modes that survive compression
};

inline double junk_probability(const CMat& u, const PureState& s,
                               std::size_t keep) {
    if (u.rows() != u.cols() || u.cols() != s.dim())
        throw std::invalid_argument("junk_probability: dimension mismatch");
    if (keep >= s.dim())
        throw std::invalid_argument("junk_probability: keep must be < dim");
    const PureState out = apply_unitary(u, s);
    double p = 0.0;
    for (std::size_t k = keep; k < out.dim(); ++k) p += std::norm(out.amps[k]);
    return p;
}

// mean junk probability over the training states
inline double cost(const CMat& u, const TrainingSet& t) {
    if (t.states.empty())
        throw std::invalid_argument("cost: empty training set");
    double acc = 0.0;
    for (const PureState& s : t.states) acc += junk_probability(u, s, t.keep);
    return acc / static_cast<double>(t.states.size());
}

struct EncodedState {
    PureState kept;  // n modes, renormalized
    double p_junk = 0.0;
};

// Apply the mesh, drop the junk modes, renormalize what survives the
// post-selection. A state that maps (numerically) entirely into junk has
// nothing left to renormalize and is an error, not a degenerate output.
inline EncodedState encode(const CMat& u, const PureState& s,
                           std::size_t keep) {
    const double p = junk_probability(u, s, keep);
    if (p >= 1.0 - 1e-12)
        throw std::runtime_error("encode: compression impossible for this state");
    const PureState out = apply_unitary(u, s);
    EncodedState e;
    e.p_junk = p;
    const double inv = 1.0 / std::sqrt(1.0 - p);
    e.kept.amps.assign(out.amps.begin(),
                       out.amps.begin() + static_cast<std::ptrdiff_t>(keep));
    for (cplx& a : e.kept.amps) a *= inv;
    return e;
}

// U† applied to the kept amplitudes padded back up with vacuum modes
inline PureState decode(const CMat& u, const EncodedState& e) {
    if (e.kept.dim() > u.rows())
        throw std::invalid_argument("decode: kept state larger than unitary");
    PureState padded;
    padded.amps = e.kept.amps;
    padded.amps.resize(u.rows(), cplx(0.0));
    return apply_unitary(adjoint(u), padded);
}

inline double success_probability(const EncodedState& e) {
    return 1.0 - e.p_junk;
}

}  // namespace qae
