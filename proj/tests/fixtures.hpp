#pragma once

// Shared small evolved setups for the measurement/sampling/estimation tests.
// Reduced boxes keep a full pipeline run in the tens of milliseconds.

#include "sgtomo/evolve.hpp"
#include "sgtomo/grid.hpp"
#include "sgtomo/measure.hpp"
#include "sgtomo/spinor.hpp"

namespace fixtures {

struct SmallSetup {
    sgtomo::GridSpec grid;
    sgtomo::SetupParams params;
    sgtomo::SpinorField evolved;
    sgtomo::PauliTriple d;
    sgtomo::MeasurementMap map;
    sgtomo::MeasurementMatrix matrix;
};

inline SmallSetup make_small_setup(double g1, double g2, double lambda, double T = 1.0,
                                   double extent = 16.0, int n = 128, int n_t = 100) {
    SmallSetup s;
    s.grid = sgtomo::make_grid(-extent, extent, -extent, extent, n, n);
    s.params = sgtomo::SetupParams{g1, g2, lambda, T, n_t};
    sgtomo::SpinorField f = sgtomo::init_spinor(s.grid, lambda);
    f = sgtomo::evolve_magnet(f, s.params);
    s.evolved = sgtomo::evolve_free(f, s.params);
    s.d = sgtomo::pauli_triple();
    s.map = sgtomo::measurement_map(s.evolved, s.d);
    s.matrix = sgtomo::measurement_matrix(s.map, sgtomo::quadrant_regions(s.grid));
    return s;
}

}  // namespace fixtures
