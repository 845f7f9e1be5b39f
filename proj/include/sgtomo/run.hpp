#pragma once

// Configuration-driven front end shared by the CLI and the test suites:
// single-shot experiments, (g1, g2)/time/angle sweeps written as CSV tables,
// and Monte Carlo estimator benchmarks. All randomness flows through
// (seed, task index) derivation, and parallel results are collected in index
// order, so outputs are byte-identical for a fixed configuration regardless
// of worker count.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sgtomo/errors.hpp"
#include "sgtomo/estimate.hpp"
#include "sgtomo/evolve.hpp"
#include "sgtomo/fisher.hpp"
#include "sgtomo/grid.hpp"
#include "sgtomo/io.hpp"
#include "sgtomo/measure.hpp"
#include "sgtomo/sample.hpp"
#include "sgtomo/spinor.hpp"

namespace sgtomo {

enum class EstimatorKind { li, mle };
enum class SchemeChoice { quadrant, continuous, both };  // `both` only in sweeps
enum class SweepMode { g1g2, time, angles };

inline const char* estimator_name(EstimatorKind e) {
    return e == EstimatorKind::li ? "li" : "mle";
}

inline const char* scheme_choice_name(SchemeChoice s) {
    switch (s) {
        case SchemeChoice::quadrant: return "quadrant";
        case SchemeChoice::continuous: return "continuous";
        default: return "both";
    }
}

inline const char* sweep_mode_name(SweepMode m) {
    switch (m) {
        case SweepMode::g1g2: return "g1g2";
        case SweepMode::time: return "time";
        default: return "angles";
    }
}

struct RunConfig {
    SetupParams setup;  // g1, g2, lambda, T, n_t

    double grid_extent = 50.0;  // square box [-extent, extent]^2
    int grid_n = 600;

    double theta = 1.91, phi = 4.78;
    std::optional<std::array<double, 3>> explicit_state;  // overrides the angles

    SchemeChoice scheme = SchemeChoice::quadrant;
    EstimatorKind estimator = EstimatorKind::mle;
    long long particles = 10000;
    int trials = 2;
    std::uint64_t seed = 20240101;
    int workers = 0;  // 0 = hardware concurrency
    std::string out_dir = "out";
    std::string cache_dir;  // empty disables the measurement cache
    EstimatorConfig estimator_cfg;

    // sweep controls
    SweepMode sweep_mode = SweepMode::g1g2;
    double g1_min = 1.0, g1_max = 5.0;
    int g1_steps = 5;
    double g2_min = 0.4, g2_max = 4.0;
    int g2_steps = 5;
    std::vector<double> lambdas = {0.3};
    std::vector<double> t_values;
    int theta_steps = 8, phi_steps = 8;

    BlochVector state() const {
        if (explicit_state) {
            BlochVector s;
            s.s1 = (*explicit_state)[0];
            s.s2 = (*explicit_state)[1];
            s.s3 = (*explicit_state)[2];
            if (!s.physical()) throw config_error("config: explicit state is not physical");
            return s;
        }
        return bloch_from_angles(theta, phi);
    }

    GridSpec grid() const {
        return make_grid(-grid_extent, grid_extent, -grid_extent, grid_extent, grid_n, grid_n);
    }

    void validate(bool sweeping = false) const {
        setup.validate();
        if (!(grid_extent > 0.0)) throw config_error("config: grid extent must be positive");
        if (grid_n < 2) throw config_error("config: grid_n must be >= 2");
        if (particles < 1) throw config_error("config: particles must be >= 1");
        estimator_cfg.validate();
        state();
        if (!sweeping && scheme == SchemeChoice::both)
            throw config_error("config: scheme 'both' is only valid for sweeps");
        if (estimator == EstimatorKind::li && scheme != SchemeChoice::quadrant)
            throw config_error("config: the linear-inversion estimator requires the quadrant scheme");
        if (sweeping) {
            if (g1_steps < 1 || g2_steps < 1) throw config_error("config: sweep steps must be >= 1");
            if (lambdas.empty()) throw config_error("config: sweep needs at least one lambda");
            if (sweep_mode == SweepMode::time) {
                if (t_values.empty()) throw config_error("config: time sweep needs t_values");
                for (double t : t_values)
                    if (!(t >= 1.0))
                        throw config_error("config: detection times must be >= 1");
            }
            if (sweep_mode == SweepMode::angles && (theta_steps < 1 || phi_steps < 1))
                throw config_error("config: angle sweep needs theta_steps/phi_steps >= 1");
        }
    }
};

inline void to_json(nlohmann::json& j, const RunConfig& cfg) {
    j = nlohmann::json{
        {"schema_version", k_schema_version},
        {"setup",
         {{"g1", cfg.setup.g1},
          {"g2", cfg.setup.g2},
          {"lambda", cfg.setup.lambda},
          {"T", cfg.setup.T},
          {"n_t", cfg.setup.n_t}}},
        {"grid", {{"extent", cfg.grid_extent}, {"n", cfg.grid_n}}},
        {"state", {{"theta", cfg.theta}, {"phi", cfg.phi}}},
        {"scheme", scheme_choice_name(cfg.scheme)},
        {"estimator", estimator_name(cfg.estimator)},
        {"particles", cfg.particles},
        {"trials", cfg.trials},
        {"seed", cfg.seed},
        {"workers", cfg.workers},
        {"out", cfg.out_dir},
        {"cache_dir", cfg.cache_dir},
        {"estimator_cfg",
         {{"max_iter", cfg.estimator_cfg.max_iter},
          {"tol", cfg.estimator_cfg.tol},
          {"likelihood_floor", cfg.estimator_cfg.likelihood_floor}}},
        {"sweep",
         {{"mode", sweep_mode_name(cfg.sweep_mode)},
          {"g1_min", cfg.g1_min},
          {"g1_max", cfg.g1_max},
          {"g1_steps", cfg.g1_steps},
          {"g2_min", cfg.g2_min},
          {"g2_max", cfg.g2_max},
          {"g2_steps", cfg.g2_steps},
          {"lambdas", cfg.lambdas},
          {"t_values", cfg.t_values},
          {"theta_steps", cfg.theta_steps},
          {"phi_steps", cfg.phi_steps}}}};
    if (cfg.explicit_state) j["state"] = {{"s", *cfg.explicit_state}};
}

inline void from_json(const nlohmann::json& j, RunConfig& cfg) {
    cfg = RunConfig{};
    if (j.contains("setup")) {
        const auto& s = j.at("setup");
        cfg.setup.g1 = s.value("g1", cfg.setup.g1);
        cfg.setup.g2 = s.value("g2", cfg.setup.g2);
        cfg.setup.lambda = s.value("lambda", cfg.setup.lambda);
        cfg.setup.T = s.value("T", cfg.setup.T);
        cfg.setup.n_t = s.value("n_t", cfg.setup.n_t);
    }
    if (j.contains("grid")) {
        cfg.grid_extent = j.at("grid").value("extent", cfg.grid_extent);
        cfg.grid_n = j.at("grid").value("n", cfg.grid_n);
    }
    if (j.contains("state")) {
        const auto& st = j.at("state");
        if (st.contains("s")) {
            cfg.explicit_state = st.at("s").get<std::array<double, 3>>();
        } else {
            cfg.theta = st.value("theta", cfg.theta);
            cfg.phi = st.value("phi", cfg.phi);
        }
    }
    if (j.contains("scheme")) {
        const std::string s = j.at("scheme").get<std::string>();
        if (s == "quadrant")
            cfg.scheme = SchemeChoice::quadrant;
        else if (s == "continuous")
            cfg.scheme = SchemeChoice::continuous;
        else if (s == "both")
            cfg.scheme = SchemeChoice::both;
        else
            throw config_error("config: unknown scheme '" + s + "'");
    }
    if (j.contains("estimator")) {
        const std::string e = j.at("estimator").get<std::string>();
        if (e == "li")
            cfg.estimator = EstimatorKind::li;
        else if (e == "mle")
            cfg.estimator = EstimatorKind::mle;
        else
            throw config_error("config: unknown estimator '" + e + "'");
    }
    cfg.particles = j.value("particles", cfg.particles);
    cfg.trials = j.value("trials", cfg.trials);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.out_dir = j.value("out", cfg.out_dir);
    cfg.cache_dir = j.value("cache_dir", cfg.cache_dir);
    if (j.contains("estimator_cfg")) {
        const auto& e = j.at("estimator_cfg");
        cfg.estimator_cfg.max_iter = e.value("max_iter", cfg.estimator_cfg.max_iter);
        cfg.estimator_cfg.tol = e.value("tol", cfg.estimator_cfg.tol);
        cfg.estimator_cfg.likelihood_floor =
            e.value("likelihood_floor", cfg.estimator_cfg.likelihood_floor);
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        if (s.contains("mode")) {
            const std::string m = s.at("mode").get<std::string>();
            if (m == "g1g2")
                cfg.sweep_mode = SweepMode::g1g2;
            else if (m == "time")
                cfg.sweep_mode = SweepMode::time;
            else if (m == "angles")
                cfg.sweep_mode = SweepMode::angles;
            else
                throw config_error("config: unknown sweep mode '" + m + "'");
        }
        cfg.g1_min = s.value("g1_min", cfg.g1_min);
        cfg.g1_max = s.value("g1_max", cfg.g1_max);
        cfg.g1_steps = s.value("g1_steps", cfg.g1_steps);
        cfg.g2_min = s.value("g2_min", cfg.g2_min);
        cfg.g2_max = s.value("g2_max", cfg.g2_max);
        cfg.g2_steps = s.value("g2_steps", cfg.g2_steps);
        cfg.lambdas = s.value("lambdas", cfg.lambdas);
        cfg.t_values = s.value("t_values", cfg.t_values);
        cfg.theta_steps = s.value("theta_steps", cfg.theta_steps);
        cfg.phi_steps = s.value("phi_steps", cfg.phi_steps);
    }
}

namespace detail {

template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min({workers, 16, static_cast<int>(count)}));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline std::vector<double> linspace(double lo, double hi, int steps) {
    std::vector<double> v(steps);
    if (steps == 1) {
        v[0] = lo;
        return v;
    }
    for (int i = 0; i < steps; ++i) v[i] = lo + (hi - lo) * i / (steps - 1);
    return v;
}

}  // namespace detail

struct SetupArtifacts {
    GridSpec grid;
    MeasurementMap map;
    MeasurementMatrix matrix;
    double boundary_ratio = 0.0;
    bool from_cache = false;
};

// Evolve (or load from cache) the measurement objects of one setup.
inline SetupArtifacts build_setup(const SetupParams& setup, const GridSpec& grid,
                                  const std::string& cache_dir = {}) {
    SetupArtifacts art;
    art.grid = grid;
    if (!cache_dir.empty()) {
        if (auto cached = io::cache_load(cache_dir, setup, grid)) {
            art.map = std::move(cached->map);
            art.matrix = std::move(cached->matrix);
            art.from_cache = true;
            return art;
        }
    }
    SpinorField field = init_spinor(grid, setup.lambda);
    field = evolve_magnet(field, setup);
    field = evolve_free(field, setup);
    art.boundary_ratio = boundary_peak_ratio(field);
    if (art.boundary_ratio > 1e-6)
        std::cerr << "warning: boundary amplitude ratio " << art.boundary_ratio
                  << " exceeds 1e-6; enlarge the grid box\n";
    art.map = measurement_map(field, pauli_triple());
    art.matrix = measurement_matrix(art.map, quadrant_regions(grid));
    if (!cache_dir.empty()) io::cache_store(cache_dir, setup, grid, {art.map, art.matrix});
    return art;
}

struct SingleResult {
    EstimateReport estimate;
    ErrorSummary summary;
    std::string digest;
};

inline SingleResult run_single(const RunConfig& cfg) {
    cfg.validate();
    const BlochVector s = cfg.state();
    SetupArtifacts art = build_setup(cfg.setup, cfg.grid(), cfg.cache_dir);

    const Scheme scheme =
        cfg.scheme == SchemeChoice::continuous ? Scheme::continuous : Scheme::quadrant;
    ScalarField I = intensity(art.map, s);

    SingleResult res;
    if (scheme == Scheme::quadrant) {
        const auto p = probabilities(art.matrix, s);
        DetectionCounts counts = sample_counts(p, cfg.particles, cfg.seed);
        io::write_counts_csv(counts, cfg.out_dir + "/counts.csv");
        res.estimate = cfg.estimator == EstimatorKind::li
                           ? linear_inversion(counts.frequencies(), art.matrix)
                           : mle_discrete(counts.frequencies(), art.matrix, cfg.estimator_cfg);
        res.summary = summarize(fisher_quadrant(art.matrix, s));
    } else {
        PositionSample hits = sample_positions(I, cfg.particles, cfg.seed);
        io::write_hits_csv(hits, cfg.out_dir + "/hits.csv");
        res.estimate = mle_continuous(hits, art.map, cfg.estimator_cfg);
        res.summary = summarize(fisher_continuous(art.map, s));
    }

    io::write_intensity_csv(I, cfg.out_dir + "/intensity.csv");
    io::write_matrix_csv(art.matrix, cfg.out_dir + "/measurement_matrix.csv");
    io::write_json(io::estimate_report_json(res.estimate), cfg.out_dir + "/estimate.json");
    io::write_json(io::error_summary_json(res.summary, scheme),
                   cfg.out_dir + "/error_summary.json");

    std::ostringstream digest;
    digest << "single g1=" << cfg.setup.g1 << " g2=" << cfg.setup.g2
           << " lambda=" << cfg.setup.lambda << " T=" << cfg.setup.T
           << " scheme=" << scheme_name(scheme) << " estimator=" << estimator_name(cfg.estimator)
           << ": delta=" << res.summary.delta << " s_hat=(" << res.estimate.s_hat.s1 << ", "
           << res.estimate.s_hat.s2 << ", " << res.estimate.s_hat.s3
           << ") iterations=" << res.estimate.iterations << " converged=" << res.estimate.converged;
    res.digest = digest.str();
    return res;
}

namespace detail {

inline io::SweepRow make_row(const SetupParams& setup, double theta, double phi,
                             const BlochVector& s, Scheme scheme, const SetupArtifacts& art) {
    io::SweepRow row;
    row.setup = setup;
    row.theta = theta;
    row.phi = phi;
    row.scheme = scheme;
    try {
        row.summary = scheme == Scheme::quadrant ? summarize(fisher_quadrant(art.matrix, s))
                                                 : summarize(fisher_continuous(art.map, s));
    } catch (const numerical_error& e) {
        row.status = std::string("error: ") + e.what();
        const QuantumBounds qb = quantum_bounds(s);
        row.summary = ErrorSummary{};
        row.summary.quantum_delta_S = qb.delta_S;
        row.summary.quantum_delta_R = qb.delta_R;
    }
    return row;
}

}  // namespace detail

// One CSV row per (point, scheme); rows are written in point order no matter
// how many workers computed them.
inline std::vector<io::SweepRow> run_sweep(const RunConfig& cfg) {
    cfg.validate(true);
    const BlochVector s = cfg.state();
    const GridSpec grid = cfg.grid();

    std::vector<Scheme> schemes;
    if (cfg.scheme == SchemeChoice::quadrant || cfg.scheme == SchemeChoice::both)
        schemes.push_back(Scheme::quadrant);
    if (cfg.scheme == SchemeChoice::continuous || cfg.scheme == SchemeChoice::both)
        schemes.push_back(Scheme::continuous);

    std::vector<io::SweepRow> rows;

    if (cfg.sweep_mode == SweepMode::g1g2) {
        struct Point {
            SetupParams setup;
        };
        std::vector<Point> points;
        for (double lambda : cfg.lambdas)
            for (double g1 : detail::linspace(cfg.g1_min, cfg.g1_max, cfg.g1_steps))
                for (double g2 : detail::linspace(cfg.g2_min, cfg.g2_max, cfg.g2_steps)) {
                    SetupParams sp = cfg.setup;
                    sp.g1 = g1;
                    sp.g2 = g2;
                    sp.lambda = lambda;
                    points.push_back({sp});
                }
        std::vector<std::vector<io::SweepRow>> results(points.size());
        detail::parallel_for(points.size(), cfg.workers, [&](std::size_t i) {
            SetupArtifacts art = build_setup(points[i].setup, grid);
            for (Scheme scheme : schemes)
                results[i].push_back(
                    detail::make_row(points[i].setup, cfg.theta, cfg.phi, s, scheme, art));
        });
        for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
    } else if (cfg.sweep_mode == SweepMode::time) {
        // one magnet traversal, then an exact free flight per detection time
        SpinorField at_exit = init_spinor(grid, cfg.setup.lambda);
        at_exit = evolve_magnet(at_exit, cfg.setup);
        std::vector<std::vector<io::SweepRow>> results(cfg.t_values.size());
        const PauliTriple d = pauli_triple();
        detail::parallel_for(cfg.t_values.size(), cfg.workers, [&](std::size_t i) {
            SetupParams sp = cfg.setup;
            sp.T = cfg.t_values[i];
            SpinorField field = evolve_free(at_exit, sp);
            SetupArtifacts art;
            art.grid = grid;
            art.boundary_ratio = boundary_peak_ratio(field);
            art.map = measurement_map(field, d);
            art.matrix = measurement_matrix(art.map, quadrant_regions(grid));
            for (Scheme scheme : schemes)
                results[i].push_back(detail::make_row(sp, cfg.theta, cfg.phi, s, scheme, art));
        });
        for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
    } else {  // angles
        SetupArtifacts art = build_setup(cfg.setup, grid, cfg.cache_dir);
        std::vector<std::pair<double, double>> angles;
        for (double theta : detail::linspace(0.0, M_PI, cfg.theta_steps))
            for (double phi :
                 detail::linspace(2.0 * M_PI / cfg.phi_steps, 2.0 * M_PI, cfg.phi_steps))
                angles.emplace_back(theta, phi);
        std::vector<std::vector<io::SweepRow>> results(angles.size());
        detail::parallel_for(angles.size(), cfg.workers, [&](std::size_t i) {
            const BlochVector state = bloch_from_angles(angles[i].first, angles[i].second);
            for (Scheme scheme : schemes)
                results[i].push_back(detail::make_row(cfg.setup, angles[i].first,
                                                      angles[i].second, state, scheme, art));
        });
        for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
    }

    std::ofstream out = io::open_out(cfg.out_dir + "/sweep.csv");
    out << io::sweep_csv_header() << '\n';
    for (const auto& row : rows) out << io::sweep_row_csv(row) << '\n';
    return rows;
}

struct MonteCarloResult {
    std::array<double, 3> mean{};
    std::array<double, 3> bias{};
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d cramer_rao = Eigen::Matrix3d::Zero();  // K^-1 / N
    int non_converged = 0;
    double max_rel_var_deviation = 0.0;  // diagonal, vs Cramer-Rao
};

inline MonteCarloResult run_montecarlo(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.trials < 2) throw config_error("montecarlo: trials must be >= 2");
    const BlochVector s = cfg.state();
    SetupArtifacts art = build_setup(cfg.setup, cfg.grid(), cfg.cache_dir);

    const Scheme scheme =
        cfg.scheme == SchemeChoice::continuous ? Scheme::continuous : Scheme::quadrant;

    InfoMatrix info = scheme == Scheme::quadrant ? fisher_quadrant(art.matrix, s)
                                                 : fisher_continuous(art.map, s);

    struct Trial {
        EstimateReport report;
    };
    std::vector<Trial> trials(cfg.trials);

    if (scheme == Scheme::quadrant) {
        const auto p = probabilities(art.matrix, s);
        detail::parallel_for(trials.size(), cfg.workers, [&](std::size_t i) {
            const std::uint64_t trial_seed = rng::derive_seed(cfg.seed, i);
            DetectionCounts counts = sample_counts(p, cfg.particles, trial_seed);
            trials[i].report = cfg.estimator == EstimatorKind::li
                                   ? linear_inversion(counts.frequencies(), art.matrix)
                                   : mle_discrete(counts.frequencies(), art.matrix,
                                                  cfg.estimator_cfg);
        });
    } else {
        ScalarField I = intensity(art.map, s);
        const DiscreteSampler2D sampler(I);
        detail::parallel_for(trials.size(), cfg.workers, [&](std::size_t i) {
            const std::uint64_t trial_seed = rng::derive_seed(cfg.seed, i);
            PositionSample hits = sampler.draw(cfg.particles, trial_seed);
            trials[i].report = mle_continuous(hits, art.map, cfg.estimator_cfg);
        });
    }

    std::ofstream out = io::open_out(cfg.out_dir + "/trials.csv");
    out << "trial,s1,s2,s3,converged,iterations\n";
    for (std::size_t i = 0; i < trials.size(); ++i) {
        const auto& r = trials[i].report;
        out << i << ',' << io::fmt(r.s_hat.s1) << ',' << io::fmt(r.s_hat.s2) << ','
            << io::fmt(r.s_hat.s3) << ',' << (r.converged ? 1 : 0) << ',' << r.iterations
            << '\n';
    }

    MonteCarloResult res;
    const double n = static_cast<double>(trials.size());
    for (const auto& t : trials) {
        res.mean[0] += t.report.s_hat.s1 / n;
        res.mean[1] += t.report.s_hat.s2 / n;
        res.mean[2] += t.report.s_hat.s3 / n;
        if (!t.report.converged) ++res.non_converged;
    }
    for (const auto& t : trials) {
        const std::array<double, 3> d{t.report.s_hat.s1 - res.mean[0],
                                      t.report.s_hat.s2 - res.mean[1],
                                      t.report.s_hat.s3 - res.mean[2]};
        for (int u = 0; u < 3; ++u)
            for (int v = 0; v < 3; ++v) res.covariance(u, v) += d[u] * d[v] / (n - 1.0);
    }
    res.bias = {res.mean[0] - s.s1, res.mean[1] - s.s2, res.mean[2] - s.s3};
    res.cramer_rao = info.K.inverse() / static_cast<double>(cfg.particles);
    for (int u = 0; u < 3; ++u)
        res.max_rel_var_deviation =
            std::max(res.max_rel_var_deviation,
                     std::abs(res.covariance(u, u) - res.cramer_rao(u, u)) / res.cramer_rao(u, u));

    nlohmann::json summary{
        {"schema_version", k_schema_version},
        {"scheme", scheme_name(scheme)},
        {"estimator", estimator_name(cfg.estimator)},
        {"trials", cfg.trials},
        {"particles", cfg.particles},
        {"state", {s.s1, s.s2, s.s3}},
        {"mean", res.mean},
        {"bias", res.bias},
        {"covariance",
         {{res.covariance(0, 0), res.covariance(0, 1), res.covariance(0, 2)},
          {res.covariance(1, 0), res.covariance(1, 1), res.covariance(1, 2)},
          {res.covariance(2, 0), res.covariance(2, 1), res.covariance(2, 2)}}},
        {"cramer_rao",
         {{res.cramer_rao(0, 0), res.cramer_rao(0, 1), res.cramer_rao(0, 2)},
          {res.cramer_rao(1, 0), res.cramer_rao(1, 1), res.cramer_rao(1, 2)},
          {res.cramer_rao(2, 0), res.cramer_rao(2, 1), res.cramer_rao(2, 2)}}},
        {"max_rel_var_deviation", res.max_rel_var_deviation},
        {"non_converged", res.non_converged}};
    io::write_json(summary, cfg.out_dir + "/mc_summary.json");
    return res;
}

}  // namespace sgtomo
