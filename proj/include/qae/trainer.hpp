// trainer.hpp — the gradient-descent learning loop for the wave-plate mesh.
//
// Each iteration measures the cost at the current angles (the "move" record),
// probes every parameter at +s_a to form a secant gradient, and then steps a
// distance of s_a along the negative normalized gradient. s_a starts coarse
// (12°) and drops to fine (5°) after the cost first dips below 0.1. A
// watchdog kicks every plate by 25° if no measurement beats 0.1 within the
// stuck window. Every cost measurement appends one trace record; nothing is
// measured without being logged.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qae/measurement.hpp"
#include "qae/state_prep.hpp"

namespace qae {

struct TrainerConfig {
    double s_coarse = 12.0;       // probe/step size before the threshold, degrees
    double s_fine = 5.0;          // after it
    double fine_threshold = 0.1;  // cost that flips coarse → fine
    std::size_t stuck_window = 50;  // iterations without a sub-threshold cost
    double kick_deg = 25.0;         // watchdog rotation added to every plate
    std::optional<double> early_stop;  // stop at first measured cost <= this
    std::size_t max_evals = 200;
    std::uint64_t seed = 0;
    double step_scale = 1.0;  // multiplies the movement length (kept at 1)
    std::optional<std::vector<double>> initial_angles;  // overrides random init

    void validate(std::size_t param_count) const {
        if (s_coarse <= 0.0 || s_fine <= 0.0 || kick_deg <= 0.0)
            throw std::invalid_argument("trainer: angle constants must be > 0");
        if (fine_threshold <= 0.0 || fine_threshold >= 1.0)
            throw std::invalid_argument("trainer: fine_threshold must be in (0,1)");
        if (max_evals < 1)
            throw std::invalid_argument("trainer: max_evals must be >= 1");
        if (stuck_window < 1)
            throw std::invalid_argument("trainer: stuck_window must be >= 1");
        if (step_scale <= 0.0)
            throw std::invalid_argument("trainer: step_scale must be > 0");
        if (initial_angles && initial_angles->size() != param_count)
            throw std::invalid_argument("trainer: initial_angles length mismatch");
    }
};

struct DriftSchedule {
    bool enabled = false;
    double step_deg = 4.0;   // scrambler rotation per event, signed
    std::size_t period = 5;  // cost evaluations between events

    void validate() const {
        if (enabled && period < 1)
            throw std::invalid_argument("drift: period must be >= 1");
    }
};

enum class TracePhase { move, probe };

namespace trace_event {
inline constexpr unsigned kick = 1u;          // angles include a fresh +25° kick
inline constexpr unsigned drift = 2u;         // family drifted after this record
inline constexpr unsigned phase_switch = 4u;  // first cost below fine_threshold
}  // namespace trace_event

struct TraceRecord {
    std::size_t eval_index = 0;  // 1-based, equals the measurement count
    std::size_t iteration = 0;   // 1-based
    TracePhase phase = TracePhase::move;
    std::size_t probe_param = 0;  // parameter index, probe records only
    ParameterVector angles;       // configuration that was measured
    double cost_measured = 0.0;
    unsigned events = 0;
};

enum class StopReason { early_stop, budget };

struct TrainingTrace {
    std::vector<TraceRecord> records;
    ParameterVector final_angles;  // where the walk ended (probes restored)
    ParameterVector best_angles;   // lowest measured cost of the run
    double best_cost = std::numeric_limits<double>::infinity();
    std::size_t best_eval_index = 0;
    std::size_t evals_used = 0;
    std::size_t iterations = 0;
    StopReason stop = StopReason::budget;
};

// Training states come either from a preparation family (regenerable, so the
// set can follow a drifting scrambler) or as fixed states for tests that
// need a hand-built landscape.
struct TrainingSetSource {
    PreparationFamily family;
    std::vector<PrepSetting> settings;
    std::size_t keep = 2;
    std::optional<std::vector<PureState>> fixed_states;

    static TrainingSetSource from_family(const PreparationFamily& f,
                                         std::vector<PrepSetting> s,
                                         std::size_t keep = 2) {
        TrainingSetSource src;
        src.family = f;
        src.settings = std::move(s);
        src.keep = keep;
        return src;
    }

    static TrainingSetSource from_states(std::vector<PureState> states,
                                         std::size_t keep = 2) {
        TrainingSetSource src;
        src.fixed_states = std::move(states);
        src.keep = keep;
        return src;
    }

    TrainingSet realize() const {
        TrainingSet t;
        t.keep = keep;
        if (fixed_states) {
            t.states = *fixed_states;
        } else {
            if (settings.empty())
                throw std::invalid_argument("training source: no prep settings");
            t.states.reserve(settings.size());
            for (const PrepSetting& p : settings)
                t.states.push_back(prepare_state(family, p));
        }
        return t;
    }
};

// Secant gradient in cost-per-degree units: one base measurement at x, then
// one probe per parameter at +s_a with the parameter restored afterwards.
// Consumes param_count + 1 measurements.
inline std::vector<double> probe_gradient(const MeasurementBackend& backend,
                                          const MeshLayout& layout,
                                          const ParameterVector& x,
                                          const TrainingSet& t, double s_a,
                                          Rng& rng) {
    if (s_a <= 0.0)
        throw std::invalid_argument("probe_gradient: s_a must be > 0");
    const double base = measure_cost(backend, layout, x, t, rng);
    std::vector<double> g(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        ParameterVector probe = x;
        probe.angles_deg[k] = wrap_angle(probe.angles_deg[k] + s_a);
        g[k] = (measure_cost(backend, layout, probe, t, rng) - base) / s_a;
    }
    return g;
}

inline TrainingTrace train(const MeshLayout& layout, TrainingSetSource source,
                           const TrainerConfig& cfg, const DriftSchedule& drift,
                           const MeasurementBackend& backend) {
    const std::size_t pc = layout.param_count();
    cfg.validate(pc);
    drift.validate();
    if (drift.enabled && source.fixed_states)
        throw std::invalid_argument("train: drift requires a family-backed source");

    Rng rng(cfg.seed);
    ParameterVector x;
    if (cfg.initial_angles) {
        x = wrapped(*cfg.initial_angles);
    } else {
        std::vector<double> init(pc);
        for (double& a : init) a = rng.uniform(0.0, 360.0);
        x = wrapped(std::move(init));
    }

    TrainingSet tset = source.realize();
    TrainingTrace trace;
    trace.records.reserve(cfg.max_evals);

    std::size_t it = 0;
    bool fine = false;
    double s_a = cfg.s_coarse;
    // iteration of the last sub-threshold measurement or watchdog reset;
    // 0 means "start of the run"
    std::size_t window_base = 0;
    bool pending_kick = false;
    bool stopping = false;

    const auto measure = [&](const ParameterVector& at, TracePhase phase,
                             std::size_t probe_param,
                             unsigned extra_events) -> double {
        const double c = measure_cost(backend, layout, at, tset, rng);
        ++trace.evals_used;
        unsigned events = extra_events;
        if (c < cfg.fine_threshold) {
            if (!fine) {
                fine = true;
                events |= trace_event::phase_switch;
            }
            window_base = it;
        }
        trace.records.push_back(
            {trace.evals_used, it, phase, probe_param, at, c, events});
        if (c < trace.best_cost) {
            trace.best_cost = c;
            trace.best_angles = at;
            trace.best_eval_index = trace.evals_used;
        }
        if (drift.enabled && trace.evals_used % drift.period == 0) {
            source.family = drift_family(source.family, drift.step_deg);
            tset = source.realize();
            trace.records.back().events |= trace_event::drift;
        }
        if (cfg.early_stop && c <= *cfg.early_stop) {
            trace.stop = StopReason::early_stop;
            trace.final_angles = at;
            stopping = true;
        }
        return c;
    };

    while (trace.evals_used < cfg.max_evals && !stopping) {
        ++it;
        unsigned base_events = 0;
        if (pending_kick) {
            for (double& a : x.angles_deg) a = wrap_angle(a + cfg.kick_deg);
            pending_kick = false;
            base_events |= trace_event::kick;
        }
        const double c0 = measure(x, TracePhase::move, 0, base_events);
        trace.final_angles = stopping ? trace.final_angles : x;
        if (stopping || trace.evals_used >= cfg.max_evals) break;

        std::vector<double> g(pc, 0.0);
        for (std::size_t k = 0; k < pc; ++k) {
            ParameterVector probe = x;
            probe.angles_deg[k] = wrap_angle(probe.angles_deg[k] + s_a);
            const double ck = measure(probe, TracePhase::probe, k, 0);
            g[k] = (ck - c0) / s_a;
            if (stopping || trace.evals_used >= cfg.max_evals) break;
        }
        if (stopping || trace.evals_used >= cfg.max_evals) break;

        // movement: a step of length step_scale·s_a against the gradient;
        // the per-degree units cancel in g/‖g‖
        double gnorm = 0.0;
        for (double v : g) gnorm += v * v;
        gnorm = std::sqrt(gnorm);
        if (gnorm > 0.0) {
            const double step = cfg.step_scale * s_a / gnorm;
            for (std::size_t k = 0; k < pc; ++k)
                x.angles_deg[k] = wrap_angle(x.angles_deg[k] - step * g[k]);
        }
        trace.final_angles = x;

        // the coarse→fine switch takes effect from the next iteration
        s_a = fine ? cfg.s_fine : cfg.s_coarse;

        if (it - window_base >= cfg.stuck_window) {
            pending_kick = true;
            window_base = it;  // reset the watchdog window
        }
    }

    trace.iterations = it;
    if (trace.final_angles.size() == 0) trace.final_angles = x;
    return trace;
}

// Junk probabilities of fresh, uniformly drawn family states under the
// trained mesh — the generalization test behind the training-set-size sweep.
inline std::vector<double> evaluate_generalization(
    const MeshLayout& layout, const ParameterVector& x,
    const PreparationFamily& family, std::size_t test_count,
    std::uint64_t seed, const MeasurementBackend& backend) {
    if (test_count < 1)
        throw std::invalid_argument("evaluate_generalization: test_count >= 1");
    const CMat u = mesh_unitary(layout, x);
    Rng noise(derive_seed(seed, 0x7e57));
    std::vector<double> probs;
    probs.reserve(test_count);
    for (const PrepSetting& p : sample_prep_settings(test_count, seed)) {
        const double truth =
            junk_probability(u, prepare_state(family, p), layout.keep);
        probs.push_back(estimate_probability(backend, truth, noise));
    }
    return probs;
}

}  // namespace qae
