#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include "fixtures.hpp"
#include "sgtomo/errors.hpp"
#include "sgtomo/measure.hpp"
#include "sgtomo/sample.hpp"

using namespace sgtomo;

TEST_CASE("sample_counts: degenerate distribution and determinism") {
    DetectionCounts c = sample_counts({1.0, 0.0, 0.0, 0.0}, 100, 42);
    CHECK(c.n == std::array<long long, 4>{100, 0, 0, 0});
    CHECK(c.total == 100);

    DetectionCounts a = sample_counts({0.1, 0.2, 0.3, 0.4}, 5000, 7);
    DetectionCounts b = sample_counts({0.1, 0.2, 0.3, 0.4}, 5000, 7);
    CHECK(a.n == b.n);
    DetectionCounts other = sample_counts({0.1, 0.2, 0.3, 0.4}, 5000, 8);
    CHECK(a.n != other.n);

    CHECK_THROWS_AS(sample_counts({0.5, 0.6, 0.2, 0.1}, 10, 1), config_error);
    CHECK_THROWS_AS(sample_counts({-0.1, 0.5, 0.3, 0.3}, 10, 1), config_error);
    CHECK_THROWS_AS(sample_counts({0.25, 0.25, 0.25, 0.25}, 0, 1), config_error);
}

TEST_CASE("sample_counts: frequencies concentrate at the binomial rate") {
    const long long N = 1000000;
    DetectionCounts c = sample_counts({0.25, 0.25, 0.25, 0.25}, N, 123);
    const double sigma = std::sqrt(0.25 * 0.75 / N);
    auto f = c.frequencies();
    for (int k = 0; k < 4; ++k) CHECK(std::abs(f[k] - 0.25) < 5.0 * sigma);

    // law of large numbers at two scales
    for (long long n : {1000LL, 100000LL}) {
        DetectionCounts cc = sample_counts({0.1, 0.2, 0.3, 0.4}, n, 77);
        auto ff = cc.frequencies();
        const std::array<double, 4> p{0.1, 0.2, 0.3, 0.4};
        for (int k = 0; k < 4; ++k)
            CHECK(std::abs(ff[k] - p[k]) < 5.0 * std::sqrt(p[k] * (1 - p[k]) / n));
    }
}

TEST_CASE("sample_positions: concentrated intensity puts every hit in that cell") {
    GridSpec g = make_grid(-2, 2, -2, 2, 8, 8);
    ScalarField I(g);
    I(5, 2) = 1.0 / g.cell_area();
    PositionSample hits = sample_positions(I, 50, 3);
    for (std::size_t k = 0; k < hits.size(); ++k) {
        CHECK(hits.cells[k] == g.index(5, 2));
        CHECK(hits.hits[k].first == doctest::Approx(g.x(5) + 0.5 * g.dx));
        CHECK(hits.hits[k].second == doctest::Approx(g.z(2) + 0.5 * g.dz));
    }
}

TEST_CASE("sample_positions: determinism and validation") {
    GridSpec g = make_grid(-2, 2, -2, 2, 16, 16);
    ScalarField I(g, 1.0 / 16.0);  // uniform, integrates to 1
    PositionSample a = sample_positions(I, 2000, 11);
    PositionSample b = sample_positions(I, 2000, 11);
    CHECK(a.cells == b.cells);

    ScalarField bad(g, 1.0);  // integrates to 16
    CHECK_THROWS_AS(sample_positions(bad, 10, 1), numerical_error);
    ScalarField neg(g, 1.0 / 16.0);
    neg.values[3] = -1e-3;
    CHECK_THROWS_AS(sample_positions(neg, 10, 1), numerical_error);
}

TEST_CASE("sample_positions on an evolved intensity: binning and moments") {
    auto setup = fixtures::make_small_setup(2.0, 1.0, 0.7);
    BlochVector s = bloch_from_angles(1.91, 4.78);
    ScalarField I = intensity(setup.map, s);

    const long long N = 100000;
    PositionSample hits = sample_positions(I, N, 2024);

    // quadrant-binned hits reproduce the multinomial statistics:
    // chi^2 over 3 dof below the 1e-3 critical value 16.266
    auto p = probabilities(setup.matrix, s);
    auto regions = quadrant_regions(setup.grid);
    std::array<long long, 4> n{};
    const GridSpec& g = setup.grid;
    for (std::size_t c : hits.cells) {
        const int ix = static_cast<int>(c) / g.n_z, iz = static_cast<int>(c) % g.n_z;
        for (int k = 0; k < 4; ++k)
            if (regions[k](g.x(ix), g.z(iz))) {
                ++n[k];
                break;
            }
    }
    double chi2 = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double expected = static_cast<double>(N) * p[k];
        chi2 += (n[k] - expected) * (n[k] - expected) / expected;
    }
    CHECK(chi2 < 16.266);

    // empirical mean against the exact mean of the sampled (cell-center)
    // distribution, within 5 standard errors
    double wsum = 0.0, mx = 0.0, mz = 0.0, vx = 0.0, vz = 0.0;
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_z; ++j) {
            const double w = I(i, j);
            const double cx = g.x(i) + 0.5 * g.dx, cz = g.z(j) + 0.5 * g.dz;
            wsum += w;
            mx += w * cx;
            mz += w * cz;
            vx += w * cx * cx;
            vz += w * cz * cz;
        }
    mx /= wsum;
    mz /= wsum;
    vx = vx / wsum - mx * mx;
    vz = vz / wsum - mz * mz;

    double ex = 0.0, ez = 0.0;
    for (const auto& [hx, hz] : hits.hits) {
        ex += hx;
        ez += hz;
    }
    ex /= static_cast<double>(N);
    ez /= static_cast<double>(N);
    CHECK(std::abs(ex - mx) < 5.0 * std::sqrt(vx / N));
    CHECK(std::abs(ez - mz) < 5.0 * std::sqrt(vz / N));
}
