// measurement.hpp — cost estimation backends: exact values or shot noise.
//
// The exact backend returns the model cost; the sampled backends emulate
// photon counting. Binomial is the default noise model (heralded single
// photons give a fixed number of trials per state); the Poisson variant
// draws junk and kept counts independently, matching raw counting statistics.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "qae/autoencoder.hpp"
#include "qae/mesh.hpp"
#include "qae/rng.hpp"

namespace qae {

enum class BackendMode { exact, binomial, poisson };

struct MeasurementBackend {
    BackendMode mode = BackendMode::exact;
    long shots_per_state = 10000;

    static MeasurementBackend exact() { return {BackendMode::exact, 0}; }
    static MeasurementBackend sampled(long shots) {
        if (shots <= 0)
            throw std::invalid_argument("sampled backend: shots must be > 0");
        return {BackendMode::binomial, shots};
    }
    static MeasurementBackend poisson(long shots) {
        if (shots <= 0)
            throw std::invalid_argument("poisson backend: shots must be > 0");
        return {BackendMode::poisson, shots};
    }

    // accepts "exact", "sampled:SHOTS", "poisson:SHOTS"
    static MeasurementBackend parse(const std::string& text) {
        if (text == "exact") return exact();
        const auto colon = text.find(':');
        if (colon != std::string::npos) {
            const std::string head = text.substr(0, colon);
            const std::string tail = text.substr(colon + 1);
            long shots = 0;
            std::size_t used = 0;
            try {
                shots = std::stol(tail, &used);
            } catch (const std::exception&) {
                throw std::invalid_argument("backend: bad shot count in '" +
                                            text + "'");
            }
            if (used != tail.size())
                throw std::invalid_argument("backend: bad shot count in '" +
                                            text + "'");
            if (head == "sampled") return sampled(shots);
            if (head == "poisson") return poisson(shots);
        }
        throw std::invalid_argument(
            "backend: expected exact | sampled:SHOTS | poisson:SHOTS, got '" +
            text + "'");
    }

    std::string to_string() const {
        switch (mode) {
            case BackendMode::exact: return "exact";
            case BackendMode::binomial:
                return "sampled:" + std::to_string(shots_per_state);
            case BackendMode::poisson:
                return "poisson:" + std::to_string(shots_per_state);
        }
        return "exact";
    }
};

// single-state occupation estimate given the true probability
inline double estimate_probability(const MeasurementBackend& b, double p_true,
                                   Rng& rng) {
    switch (b.mode) {
        case BackendMode::exact:
            return p_true;
        case BackendMode::binomial: {
            const long junk = rng.binomial(b.shots_per_state, p_true);
            return static_cast<double>(junk) /
                   static_cast<double>(b.shots_per_state);
        }
        case BackendMode::poisson: {
            const double mean = static_cast<double>(b.shots_per_state);
            const long junk = rng.poisson(mean * p_true);
            const long kept = rng.poisson(mean * (1.0 - p_true));
            if (junk + kept == 0) return 0.0;  // no photons at all this round
            return static_cast<double>(junk) /
                   static_cast<double>(junk + kept);
        }
    }
    return p_true;
}

// One cost measurement of the mesh at parameters x against the training set.
// The exact path delegates to the model cost; sampled paths estimate each
// state's junk probability from counts and average the estimates.
inline double measure_cost(const MeasurementBackend& b, const MeshLayout& layout,
                           const ParameterVector& x, const TrainingSet& t,
                           Rng& rng) {
    const CMat u = mesh_unitary(layout, x);
    if (b.mode == BackendMode::exact) return cost(u, t);
    if (t.states.empty())
        throw std::invalid_argument("measure_cost: empty training set");
    double acc = 0.0;
    for (const PureState& s : t.states)
        acc += estimate_probability(b, junk_probability(u, s, t.keep), rng);
    return acc / static_cast<double>(t.states.size());
}

}  // namespace qae
