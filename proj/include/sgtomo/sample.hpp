#pragma once

// Synthetic measurement outcomes: multinomial quadrant counts and cell-discrete
// hit positions, reproducible by construction.
//
// RNG contract: every sampling call takes (master seed, task index implicit in
// the caller) and derives an independent stream with derive_stream(). Streams
// are splitmix64-decorrelated seeds feeding std::mt19937_64, whose output
// sequence is fixed by the standard, so results are identical across runs,
// platforms and scheduling orders.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "sgtomo/errors.hpp"
#include "sgtomo/grid.hpp"

namespace sgtomo {

namespace rng {

struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

// Independent sub-seed for (master seed, task index); feed it to any
// sampling call so parallel tasks stay reproducible however scheduled.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t task_index) {
    SplitMix64 sm{master_seed ^ (0xD1B54A32D192ED03ull * (task_index + 1))};
    return sm.next();
}

// Independent stream for (master seed, task index).
inline std::mt19937_64 derive_stream(std::uint64_t master_seed, std::uint64_t task_index) {
    SplitMix64 sm{master_seed ^ (0xA24BAED4963EE407ull * (task_index + 1))};
    std::seed_seq seq{static_cast<std::uint32_t>(sm.next()), static_cast<std::uint32_t>(sm.next()),
                      static_cast<std::uint32_t>(sm.next()), static_cast<std::uint32_t>(sm.next()),
                      static_cast<std::uint32_t>(sm.next()), static_cast<std::uint32_t>(sm.next()),
                      static_cast<std::uint32_t>(sm.next()), static_cast<std::uint32_t>(sm.next())};
    return std::mt19937_64(seq);
}

inline double uniform01(std::mt19937_64& gen) {
    return (gen() >> 11) * 0x1.0p-53;  // [0, 1)
}

}  // namespace rng

struct DetectionCounts {
    std::array<long long, 4> n{};
    long long total = 0;

    std::array<double, 4> frequencies() const {
        std::array<double, 4> f{};
        for (int k = 0; k < 4; ++k) f[k] = total > 0 ? static_cast<double>(n[k]) / total : 0.0;
        return f;
    }
};

inline DetectionCounts sample_counts(const std::array<double, 4>& p, long long N,
                                     std::uint64_t seed) {
    if (N < 1) throw config_error("sample_counts: N must be >= 1");
    double sum = 0.0;
    for (double pk : p) {
        if (!(pk >= 0.0)) throw config_error("sample_counts: negative probability");
        sum += pk;
    }
    if (std::abs(sum - 1.0) > 1e-8)
        throw config_error("sample_counts: probabilities sum to " + std::to_string(sum));

    std::array<double, 3> cum{p[0] / sum, (p[0] + p[1]) / sum, (p[0] + p[1] + p[2]) / sum};
    auto gen = rng::derive_stream(seed, 0);
    DetectionCounts counts;
    counts.total = N;
    for (long long i = 0; i < N; ++i) {
        const double u = rng::uniform01(gen);
        int k = u < cum[0] ? 0 : (u < cum[1] ? 1 : (u < cum[2] ? 2 : 3));
        ++counts.n[k];
    }
    return counts;
}

struct PositionSample {
    std::vector<std::pair<double, double>> hits;  // cell centers (x_i + dx/2, z_j + dz/2)
    std::vector<std::size_t> cells;               // flat lattice index of each hit
    GridSpec grid;

    std::size_t size() const { return hits.size(); }
};

// Walker alias sampler over the lattice cells of a nonnegative intensity
// field. Build once, draw many times with independent seeds.
class DiscreteSampler2D {
public:
    explicit DiscreteSampler2D(const ScalarField& intensity) : grid_(intensity.grid) {
        const std::size_t n = intensity.values.size();
        double total = 0.0;
        for (double v : intensity.values) {
            if (v < -1e-12)
                throw numerical_error("sampler: negative intensity value");
            total += std::max(v, 0.0);
        }
        if (!(total > 0.0) || !std::isfinite(total))
            throw numerical_error("sampler: intensity is not normalizable");
        if (std::abs(total * grid_.cell_area() - 1.0) > 1e-6)
            throw numerical_error("sampler: intensity integral deviates from 1 beyond 1e-6");

        prob_.resize(n);
        alias_.resize(n, 0);
        std::vector<double> scaled(n);
        for (std::size_t i = 0; i < n; ++i)
            scaled[i] = std::max(intensity.values[i], 0.0) / total * n;
        std::vector<std::size_t> small, large;
        small.reserve(n);
        large.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            (scaled[i] < 1.0 ? small : large).push_back(i);
        while (!small.empty() && !large.empty()) {
            const std::size_t s = small.back(), l = large.back();
            small.pop_back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            if (scaled[l] < 1.0) {
                large.pop_back();
                small.push_back(l);
            }
        }
        for (std::size_t i : large) prob_[i] = 1.0;
        for (std::size_t i : small) prob_[i] = 1.0;  // numerical leftovers
    }

    PositionSample draw(long long N, std::uint64_t seed) const {
        if (N < 1) throw config_error("sampler: N must be >= 1");
        auto gen = rng::derive_stream(seed, 0);
        PositionSample out;
        out.grid = grid_;
        out.hits.reserve(N);
        out.cells.reserve(N);
        const std::size_t n = prob_.size();
        for (long long i = 0; i < N; ++i) {
            const double u1 = rng::uniform01(gen);
            std::size_t k = std::min(static_cast<std::size_t>(u1 * n), n - 1);
            if (rng::uniform01(gen) >= prob_[k]) k = alias_[k];
            out.cells.push_back(k);
            const int ix = static_cast<int>(k) / grid_.n_z;
            const int iz = static_cast<int>(k) % grid_.n_z;
            out.hits.emplace_back(grid_.x(ix) + 0.5 * grid_.dx, grid_.z(iz) + 0.5 * grid_.dz);
        }
        return out;
    }

    const GridSpec& grid() const { return grid_; }

private:
    GridSpec grid_;
    std::vector<double> prob_;
    std::vector<std::size_t> alias_;
};

inline PositionSample sample_positions(const ScalarField& intensity, long long N,
                                       std::uint64_t seed) {
    return DiscreteSampler2D(intensity).draw(N, seed);
}

}  // namespace sgtomo
