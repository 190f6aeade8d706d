// qae — mesh-autoencoder experiment runner.
//
// usage: qae <experiment> [--config FILE] [--seed N] [--out DIR]
//            [--backend exact|sampled:SHOTS] [--d D --n N]
//
// exit codes: 0 completed, 1 bad configuration or arguments, 2 I/O failure.
#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qae/experiments.hpp"

namespace {

struct CliArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string backend;
    std::optional<std::size_t> d;
    std::optional<std::size_t> n;
};

// --out wins, then the config file, then $QAE_OUT_ROOT/<experiment>, then
// ./qae-runs/<experiment>
std::string resolve_out_dir(const qae::ExperimentConfig& cfg,
                            const CliArgs& args) {
    if (!args.out.empty()) return args.out;
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    std::string root = "qae-runs";
    if (const char* env = std::getenv("QAE_OUT_ROOT"); env && *env) root = env;
    return root + "/" + cfg.experiment;
}

int run_experiment(const std::string& name, const CliArgs& args) {
    qae::ExperimentConfig cfg = qae::default_experiment_config(name);
    if (!args.config_path.empty())
        qae::apply_config_map(cfg, qae::parse_config_file(args.config_path));
    if (args.seed) cfg.master_seed = *args.seed;
    if (!args.backend.empty())
        cfg.backend = qae::MeasurementBackend::parse(args.backend);
    if (args.d) cfg.d = *args.d;
    if (args.n) cfg.n = *args.n;
    if (cfg.n < 1 || cfg.n >= cfg.d)
        throw std::invalid_argument("need 1 <= n < d");
    cfg.out_dir = resolve_out_dir(cfg, args);

    if (name == "fig3") {
        const qae::Fig3Result r = qae::fig3_compute(cfg);
        qae::fig3_emit(cfg, r);
        std::size_t converged = 0;
        for (const auto& s : r.summaries) converged += s.converged ? 1 : 0;
        std::cout << name << ": " << r.summaries.size() << " runs, "
                  << converged << " converged below "
                  << cfg.convergence_threshold << "\n";
    } else if (name == "fig4") {
        const qae::Fig4Result r = qae::fig4_compute(cfg);
        qae::fig4_emit(cfg, r);
        for (const auto& sr : r.sizes)
            std::cout << name << ": " << sr.size
                      << " training state(s) -> test junk mean "
                      << sr.summary.test_mean << "\n";
    } else if (name == "fig5") {
        const qae::Fig5Result r = qae::fig5_compute(cfg);
        qae::fig5_emit(cfg, r);
        std::cout << name << ": best cost control " << r.control.best_cost
                  << ", drift +" << cfg.drift.step_deg << " deg "
                  << r.drift_plus.best_cost << ", drift -" << cfg.drift.step_deg
                  << " deg " << r.drift_minus.best_cost << "\n";
    } else if (name == "train") {
        const qae::TrainResult r = qae::train_compute(cfg);
        qae::train_emit(cfg, r);
        std::cout << name << ": best cost " << r.summary.final_cost << " after "
                  << r.summary.evals_used << " evaluations\n";
    } else if (name == "verify-unitaries") {
        const qae::VerifyResult r = qae::verify_unitaries_compute(cfg);
        qae::verify_unitaries_emit(cfg, r);
        for (const auto& c : r.checks)
            std::cout << name << ": matrix " << c.index << " defect "
                      << c.unitarity_defect << ", entry (1,3) "
                      << (c.corner_zero ? "zero" : "NONZERO")
                      << ", mesh fit residual " << c.fit_residual << "\n";
    } else if (name == "decode-check") {
        const qae::DecodeCheckResult r = qae::decode_check_compute(cfg);
        qae::decode_check_emit(cfg, r);
        std::cout << name << ": " << r.trials
                  << " trials, max fidelity-identity deviation "
                  << r.max_identity_deviation << "\n";
    }
    std::cout << "artifacts in " << cfg.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mesh-autoencoder experiments"};
    app.require_subcommand(1);

    CliArgs args;
    const char* names[] = {"fig3",  "fig4",
                           "fig5",  "train",
                           "verify-unitaries", "decode-check"};
    const char* blurbs[] = {
        "training-cost statistics over repeated random restarts",
        "generalization to fresh states vs training-set size",
        "training under periodic preparation drift, with control run",
        "single training run; writes the learned transformation",
        "check shipped reference transformations against the mesh model",
        "encode/decode fidelity identity on random meshes and states"};
    for (int i = 0; i < 6; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], blurbs[i]);
        sub->add_option("--config", args.config_path, "config file (INI)");
        sub->add_option("--seed", args.seed, "master seed");
        sub->add_option("--out", args.out, "output directory");
        sub->add_option("--backend", args.backend,
                        "exact | sampled:SHOTS | poisson:SHOTS");
        sub->add_option("--d", args.d, "total mode count");
        sub->add_option("--n", args.n, "kept mode count");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        return run_experiment(app.get_subcommands().front()->get_name(), args);
    } catch (const qae::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
