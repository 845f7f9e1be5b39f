#pragma once

// Serialization: CSV for fields/matrices/samples, JSON for reports, and the
// measurement-map cache keyed by (SetupParams, GridSpec).
//
// CSV formats (documented here and in the README):
//   measurement map   header "x,z,M0,M1,M2,M3", one row per lattice cell
//   measurement matrix four rows "Mk0,Mk1,Mk2,Mk3", k = 1..4
//   intensity         header "x,z,I"
//   hits              header "x,z", one row per detected particle
//   counts            single row "n1,n2,n3,n4"
// Doubles are printed with %.17g so a reload reproduces them bit-exactly.

#include <array>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgtomo/errors.hpp"
#include "sgtomo/estimate.hpp"
#include "sgtomo/evolve.hpp"
#include "sgtomo/fisher.hpp"
#include "sgtomo/grid.hpp"
#include "sgtomo/measure.hpp"
#include "sgtomo/sample.hpp"

namespace sgtomo {

inline constexpr int k_schema_version = 1;

namespace io {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path);
    if (!out) throw config_error("io: cannot open " + path + " for writing");
    return out;
}

inline void write_map_csv(const MeasurementMap& map, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "x,z,M0,M1,M2,M3\n";
    const GridSpec& g = map.grid;
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_z; ++j) {
            const std::size_t c = g.index(i, j);
            out << fmt(g.x(i)) << ',' << fmt(g.z(j));
            for (int mu = 0; mu < 4; ++mu) out << ',' << fmt(map.m[mu].values[c]);
            out << '\n';
        }
}

inline MeasurementMap read_map_csv(const std::string& path, const GridSpec& grid, double T) {
    std::ifstream in(path);
    if (!in) throw config_error("io: cannot open " + path);
    MeasurementMap map;
    map.grid = grid;
    map.T = T;
    for (auto& comp : map.m) comp = ScalarField(grid);
    std::string line;
    std::getline(in, line);  // header
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double x, z, m0, m1, m2, m3;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &x, &z, &m0, &m1, &m2, &m3) != 6)
            throw config_error("io: malformed map row in " + path);
        if (rows >= grid.size()) throw config_error("io: too many map rows in " + path);
        map.m[0].values[rows] = m0;
        map.m[1].values[rows] = m1;
        map.m[2].values[rows] = m2;
        map.m[3].values[rows] = m3;
        ++rows;
    }
    if (rows != grid.size()) throw config_error("io: map row count mismatch in " + path);
    return map;
}

inline void write_matrix_csv(const MeasurementMatrix& M, const std::string& path) {
    std::ofstream out = open_out(path);
    for (int k = 0; k < 4; ++k) {
        for (int mu = 0; mu < 4; ++mu) out << (mu ? "," : "") << fmt(M.m[k][mu]);
        out << '\n';
    }
}

inline MeasurementMatrix read_matrix_csv(const std::string& path, const GridSpec& grid) {
    std::ifstream in(path);
    if (!in) throw config_error("io: cannot open " + path);
    MeasurementMatrix M;
    M.regions = quadrant_regions(grid);
    std::string line;
    for (int k = 0; k < 4; ++k) {
        if (!std::getline(in, line)) throw config_error("io: truncated matrix in " + path);
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &M.m[k][0], &M.m[k][1], &M.m[k][2],
                        &M.m[k][3]) != 4)
            throw config_error("io: malformed matrix row in " + path);
    }
    return M;
}

inline void write_intensity_csv(const ScalarField& I, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "x,z,I\n";
    const GridSpec& g = I.grid;
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_z; ++j)
            out << fmt(g.x(i)) << ',' << fmt(g.z(j)) << ',' << fmt(I(i, j)) << '\n';
}

inline void write_hits_csv(const PositionSample& sample, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "x,z\n";
    for (const auto& [x, z] : sample.hits) out << fmt(x) << ',' << fmt(z) << '\n';
}

inline void write_counts_csv(const DetectionCounts& counts, const std::string& path) {
    std::ofstream out = open_out(path);
    out << counts.n[0] << ',' << counts.n[1] << ',' << counts.n[2] << ',' << counts.n[3] << '\n';
}

inline nlohmann::json estimate_report_json(const EstimateReport& rep) {
    return nlohmann::json{{"schema_version", k_schema_version},
                          {"method", rep.method},
                          {"s", {rep.s_hat.s0, rep.s_hat.s1, rep.s_hat.s2, rep.s_hat.s3}},
                          {"iterations", rep.iterations},
                          {"converged", rep.converged},
                          {"residual", rep.fixed_point_residual},
                          {"purity", rep.s_hat.purity()},
                          {"projected", rep.projected},
                          {"damping_events", rep.damping_events}};
}

inline nlohmann::json error_summary_json(const ErrorSummary& es, Scheme scheme) {
    nlohmann::json j{{"schema_version", k_schema_version},
                     {"scheme", scheme_name(scheme)},
                     {"delta", es.delta},
                     {"variances", es.variances},
                     {"delta_excluding_s2", es.delta_excluding_s2},
                     {"quantum_delta_S", es.quantum_delta_S}};
    if (es.quantum_delta_R)
        j["quantum_delta_R"] = *es.quantum_delta_R;
    else
        j["quantum_delta_R"] = nullptr;
    if (es.near_null) j["near_null"] = *es.near_null;
    return j;
}

// JSON must stay parseable when delta saturates, so infinities become the
// string sentinel "inf".
inline void sanitize_json_numbers(nlohmann::json& j) {
    if (j.is_number_float() && !std::isfinite(j.get<double>())) {
        j = j.get<double>() > 0 ? "inf" : "-inf";
    } else if (j.is_object() || j.is_array()) {
        for (auto& item : j) sanitize_json_numbers(item);
    }
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
    nlohmann::json copy = j;
    sanitize_json_numbers(copy);
    std::ofstream out = open_out(path);
    out << copy.dump(2) << '\n';
}

// --- sweep rows -------------------------------------------------------------

inline const char* sweep_csv_header() {
    return "g1,g2,lambda,T,theta,phi,scheme,delta,var1,var2,var3,delta_no_s2,delta_S,status";
}

struct SweepRow {
    SetupParams setup;
    double theta = 0.0, phi = 0.0;
    Scheme scheme = Scheme::quadrant;
    ErrorSummary summary;
    std::string status = "ok";
};

inline std::string sweep_row_csv(const SweepRow& row) {
    std::ostringstream out;
    out << fmt(row.setup.g1) << ',' << fmt(row.setup.g2) << ',' << fmt(row.setup.lambda) << ','
        << fmt(row.setup.T) << ',' << fmt(row.theta) << ',' << fmt(row.phi) << ','
        << scheme_name(row.scheme) << ',' << fmt(row.summary.delta) << ','
        << fmt(row.summary.variances[0]) << ',' << fmt(row.summary.variances[1]) << ','
        << fmt(row.summary.variances[2]) << ',' << fmt(row.summary.delta_excluding_s2) << ','
        << fmt(row.summary.quantum_delta_S) << ',' << row.status;
    return out.str();
}

// --- measurement cache -------------------------------------------------------

inline std::string cache_key(const SetupParams& setup, const GridSpec& grid) {
    std::ostringstream canon;
    canon << fmt(setup.g1) << '|' << fmt(setup.g2) << '|' << fmt(setup.lambda) << '|'
          << fmt(setup.T) << '|' << setup.n_t << '|' << fmt(grid.x_min) << '|' << fmt(grid.x_max)
          << '|' << fmt(grid.z_min) << '|' << fmt(grid.z_max) << '|' << grid.n_x << '|'
          << grid.n_z;
    const std::string s = canon.str();
    std::uint64_t hash = 1469598103934665603ull;  // FNV-1a
    for (unsigned char c : s) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, hash);
    return buf;
}

struct CachedSetup {
    MeasurementMap map;
    MeasurementMatrix matrix;
};

inline void cache_store(const std::string& cache_dir, const SetupParams& setup,
                        const GridSpec& grid, const CachedSetup& data) {
    const std::filesystem::path dir =
        std::filesystem::path(cache_dir) / cache_key(setup, grid);
    std::filesystem::create_directories(dir);
    nlohmann::json meta{{"schema_version", k_schema_version},
                        {"g1", setup.g1},
                        {"g2", setup.g2},
                        {"lambda", setup.lambda},
                        {"T", setup.T},
                        {"n_t", setup.n_t},
                        {"x_min", grid.x_min},
                        {"x_max", grid.x_max},
                        {"z_min", grid.z_min},
                        {"z_max", grid.z_max},
                        {"n_x", grid.n_x},
                        {"n_z", grid.n_z}};
    write_json(meta, (dir / "meta.json").string());
    write_map_csv(data.map, (dir / "map.csv").string());
    write_matrix_csv(data.matrix, (dir / "matrix.csv").string());
}

inline std::optional<CachedSetup> cache_load(const std::string& cache_dir,
                                             const SetupParams& setup, const GridSpec& grid) {
    const std::filesystem::path dir =
        std::filesystem::path(cache_dir) / cache_key(setup, grid);
    if (!std::filesystem::exists(dir / "map.csv") ||
        !std::filesystem::exists(dir / "matrix.csv"))
        return std::nullopt;
    CachedSetup data;
    data.map = read_map_csv((dir / "map.csv").string(), grid, setup.T);
    data.matrix = read_matrix_csv((dir / "matrix.csv").string(), grid);
    return data;
}

}  // namespace io
}  // namespace sgtomo
