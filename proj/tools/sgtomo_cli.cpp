// Command-line front end: single runs, parameter sweeps, Monte Carlo
// estimator benchmarks and measurement-cache management.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical-consistency error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgtomo/errors.hpp"
#include "sgtomo/io.hpp"
#include "sgtomo/run.hpp"

namespace {

struct Overrides {
    std::optional<double> g1, g2, lambda, T, theta, phi, grid_extent;
    std::optional<int> nt, grid_n, trials, workers;
    std::optional<long long> particles;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scheme, estimator, out, cache_dir;
    std::optional<double> g1_min, g1_max, g2_min, g2_max;
    std::optional<int> g1_steps, g2_steps, theta_steps, phi_steps;
    std::vector<double> lambdas, t_values;
    std::optional<std::string> sweep_mode;
};

void add_common_flags(CLI::App* cmd, std::string& config_path, Overrides& ov) {
    cmd->add_option("--config", config_path, "JSON configuration file");
    cmd->add_option("--g1", ov.g1, "field coupling");
    cmd->add_option("--g2", ov.g2, "kinetic coupling");
    cmd->add_option("--lambda", ov.lambda, "aspect ratio sigma'/sigma");
    cmd->add_option("--T", ov.T, "detection time (units of the transit time)");
    cmd->add_option("--nt", ov.nt, "Trotter steps across the magnet");
    cmd->add_option("--theta", ov.theta, "polar angle of the true state");
    cmd->add_option("--phi", ov.phi, "azimuthal angle of the true state");
    cmd->add_option("--scheme", ov.scheme, "quadrant | continuous | both (sweeps only)");
    cmd->add_option("--estimator", ov.estimator, "li | mle");
    cmd->add_option("--particles", ov.particles, "detected particles per experiment");
    cmd->add_option("--trials", ov.trials, "Monte Carlo repetitions");
    cmd->add_option("--seed", ov.seed, "master RNG seed");
    cmd->add_option("--grid-extent", ov.grid_extent, "half-width of the square box");
    cmd->add_option("--grid-n", ov.grid_n, "samples per direction");
    cmd->add_option("--workers", ov.workers, "worker threads (0 = hardware)");
    cmd->add_option("--out", ov.out, "output directory");
    cmd->add_option("--cache-dir", ov.cache_dir, "measurement-map cache directory");
}

void add_sweep_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--mode", ov.sweep_mode, "g1g2 | time | angles");
    cmd->add_option("--g1-min", ov.g1_min);
    cmd->add_option("--g1-max", ov.g1_max);
    cmd->add_option("--g1-steps", ov.g1_steps);
    cmd->add_option("--g2-min", ov.g2_min);
    cmd->add_option("--g2-max", ov.g2_max);
    cmd->add_option("--g2-steps", ov.g2_steps);
    cmd->add_option("--lambdas", ov.lambdas, "lambda values for the sweep");
    cmd->add_option("--t-values", ov.t_values, "detection times for the time sweep");
    cmd->add_option("--theta-steps", ov.theta_steps);
    cmd->add_option("--phi-steps", ov.phi_steps);
}

sgtomo::RunConfig assemble(const std::string& config_path, const Overrides& ov) {
    sgtomo::RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw sgtomo::config_error("cannot open config file " + config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw sgtomo::config_error(std::string("config parse error: ") + e.what());
        }
        cfg = j.get<sgtomo::RunConfig>();
    }
    if (ov.g1) cfg.setup.g1 = *ov.g1;
    if (ov.g2) cfg.setup.g2 = *ov.g2;
    if (ov.lambda) cfg.setup.lambda = *ov.lambda;
    if (ov.T) cfg.setup.T = *ov.T;
    if (ov.nt) cfg.setup.n_t = *ov.nt;
    if (ov.theta) {
        cfg.theta = *ov.theta;
        cfg.explicit_state.reset();
    }
    if (ov.phi) {
        cfg.phi = *ov.phi;
        cfg.explicit_state.reset();
    }
    if (ov.grid_extent) cfg.grid_extent = *ov.grid_extent;
    if (ov.grid_n) cfg.grid_n = *ov.grid_n;
    if (ov.particles) cfg.particles = *ov.particles;
    if (ov.trials) cfg.trials = *ov.trials;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.workers) cfg.workers = *ov.workers;
    if (ov.out) cfg.out_dir = *ov.out;
    if (ov.cache_dir) cfg.cache_dir = *ov.cache_dir;
    if (ov.scheme) {
        if (*ov.scheme == "quadrant")
            cfg.scheme = sgtomo::SchemeChoice::quadrant;
        else if (*ov.scheme == "continuous")
            cfg.scheme = sgtomo::SchemeChoice::continuous;
        else if (*ov.scheme == "both")
            cfg.scheme = sgtomo::SchemeChoice::both;
        else
            throw sgtomo::config_error("unknown scheme '" + *ov.scheme + "'");
    }
    if (ov.estimator) {
        if (*ov.estimator == "li")
            cfg.estimator = sgtomo::EstimatorKind::li;
        else if (*ov.estimator == "mle")
            cfg.estimator = sgtomo::EstimatorKind::mle;
        else
            throw sgtomo::config_error("unknown estimator '" + *ov.estimator + "'");
    }
    if (ov.sweep_mode) {
        if (*ov.sweep_mode == "g1g2")
            cfg.sweep_mode = sgtomo::SweepMode::g1g2;
        else if (*ov.sweep_mode == "time")
            cfg.sweep_mode = sgtomo::SweepMode::time;
        else if (*ov.sweep_mode == "angles")
            cfg.sweep_mode = sgtomo::SweepMode::angles;
        else
            throw sgtomo::config_error("unknown sweep mode '" + *ov.sweep_mode + "'");
    }
    if (ov.g1_min) cfg.g1_min = *ov.g1_min;
    if (ov.g1_max) cfg.g1_max = *ov.g1_max;
    if (ov.g1_steps) cfg.g1_steps = *ov.g1_steps;
    if (ov.g2_min) cfg.g2_min = *ov.g2_min;
    if (ov.g2_max) cfg.g2_max = *ov.g2_max;
    if (ov.g2_steps) cfg.g2_steps = *ov.g2_steps;
    if (!ov.lambdas.empty()) cfg.lambdas = ov.lambdas;
    if (!ov.t_values.empty()) cfg.t_values = ov.t_values;
    if (ov.theta_steps) cfg.theta_steps = *ov.theta_steps;
    if (ov.phi_steps) cfg.phi_steps = *ov.phi_steps;
    return cfg;
}

void print_header(const sgtomo::RunConfig& cfg) {
    nlohmann::json j = cfg;
    std::cout << "config: " << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stern-Gerlach spin-state estimation simulator"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    std::string cache_action;

    CLI::App* single = app.add_subcommand("single", "one experiment: evolve, measure, estimate");
    add_common_flags(single, config_path, ov);

    CLI::App* sweep = app.add_subcommand("sweep", "error tables over setup parameters");
    add_common_flags(sweep, config_path, ov);
    add_sweep_flags(sweep, ov);

    CLI::App* mc = app.add_subcommand("montecarlo", "repeated sample+estimate benchmark");
    add_common_flags(mc, config_path, ov);

    CLI::App* cache = app.add_subcommand("cache", "measurement-map cache maintenance");
    add_common_flags(cache, config_path, ov);
    cache->add_option("action", cache_action, "build | info | clear")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        sgtomo::RunConfig cfg = assemble(config_path, ov);
        if (single->parsed()) {
            print_header(cfg);
            sgtomo::SingleResult res = sgtomo::run_single(cfg);
            std::cout << res.digest << '\n';
        } else if (sweep->parsed()) {
            print_header(cfg);
            auto rows = sgtomo::run_sweep(cfg);
            std::size_t failed = 0;
            for (const auto& row : rows)
                if (row.status != "ok") ++failed;
            std::cout << "sweep: " << rows.size() << " rows (" << failed << " flagged) -> "
                      << cfg.out_dir << "/sweep.csv\n";
        } else if (mc->parsed()) {
            print_header(cfg);
            sgtomo::MonteCarloResult res = sgtomo::run_montecarlo(cfg);
            std::cout << "montecarlo: trials=" << cfg.trials
                      << " bias=(" << res.bias[0] << ", " << res.bias[1] << ", " << res.bias[2]
                      << ") max_rel_var_deviation=" << res.max_rel_var_deviation
                      << " non_converged=" << res.non_converged << '\n';
        } else if (cache->parsed()) {
            if (cfg.cache_dir.empty())
                throw sgtomo::config_error("cache: --cache-dir is required");
            const std::string key = sgtomo::io::cache_key(cfg.setup, cfg.grid());
            if (cache_action == "build") {
                sgtomo::SetupArtifacts art =
                    sgtomo::build_setup(cfg.setup, cfg.grid(), cfg.cache_dir);
                std::cout << "cache: " << (art.from_cache ? "already present" : "built") << " "
                          << key << '\n';
            } else if (cache_action == "info") {
                const bool present = sgtomo::io::cache_load(cfg.cache_dir, cfg.setup, cfg.grid())
                                         .has_value();
                std::cout << "cache: key=" << key << " dir=" << cfg.cache_dir
                          << (present ? " [present]" : " [absent]") << '\n';
            } else if (cache_action == "clear") {
                std::filesystem::remove_all(cfg.cache_dir);
                std::cout << "cache: cleared " << cfg.cache_dir << '\n';
            } else {
                throw sgtomo::config_error("cache: unknown action '" + cache_action + "'");
            }
        }
    } catch (const sgtomo::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const sgtomo::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
