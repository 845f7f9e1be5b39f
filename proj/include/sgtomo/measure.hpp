#pragma once

// Effective spin observables of the whole setup: the detection fields
// M_mu(x,z,T), the 4x4 quadrant measurement matrix, intensities and
// detection probabilities.
//
// With Phi = sum_a phi_a sigma_a, the pointwise spin operator of the setup
// is Phi^dag Phi, so M_mu = Tr(sigma_mu Phi^dag Phi)/2
//                         = sum_ab phi_a phi_b* Tr(sigma_b sigma_a sigma_mu)/2.
// This index order (b before a) is what keeps the POVM complete under the
// evolution: integrate(M_0) = 1 and integrate(M_mu) = 0 for mu >= 1 hold to
// round-off because both factor maps are exactly unitary on the lattice.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "sgtomo/errors.hpp"
#include "sgtomo/grid.hpp"
#include "sgtomo/spinor.hpp"

namespace sgtomo {

struct MeasureTolerances {
    double realness = 1e-10;    // max imaginary residue before discarding
    double positivity = 1e-10;  // slack in M_0 >= |M_vec| pointwise
};

struct MeasurementMap {
    std::array<ScalarField, 4> m;
    GridSpec grid;
    double T = 0.0;
    double max_imag_residue = 0.0;
};

inline MeasurementMap measurement_map(const SpinorField& field, const PauliTriple& d,
                                      const MeasureTolerances& tol = {}) {
    MeasurementMap map;
    map.grid = field.grid;
    map.T = field.time_label;
    for (auto& comp : map.m) comp = ScalarField(field.grid);

    // The coefficient of phi_a phi_b* in M_mu is d[b][a][mu]; for each (a,b)
    // exactly one mu carries a nonzero entry, so precompute that list.
    struct Term {
        int a, b, mu;
        complexd coeff;
    };
    std::vector<Term> terms;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int mu = 0; mu < 4; ++mu)
                if (std::abs(d.d[b][a][mu]) > 0.5)
                    terms.push_back({a, b, mu, d.d[b][a][mu]});

    const std::size_t n = field.grid.size();
    double max_imag = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::array<complexd, 4> acc{};
        for (const Term& t : terms)
            acc[t.mu] += field.phi[t.a].values[k] * std::conj(field.phi[t.b].values[k]) * t.coeff;
        for (int mu = 0; mu < 4; ++mu) {
            max_imag = std::max(max_imag, std::abs(acc[mu].imag()));
            map.m[mu].values[k] = acc[mu].real();
        }
    }
    map.max_imag_residue = max_imag;
    if (max_imag > tol.realness)
        throw numerical_error("measure: imaginary residue " + std::to_string(max_imag) +
                              " exceeds realness tolerance");

    for (std::size_t k = 0; k < n; ++k) {
        const double m1 = map.m[1].values[k], m2 = map.m[2].values[k], m3 = map.m[3].values[k];
        if (map.m[0].values[k] < std::sqrt(m1 * m1 + m2 * m2 + m3 * m3) - tol.positivity)
            throw numerical_error("measure: pointwise positivity M_0 >= |M| violated");
    }
    return map;
}

// Completeness residuals: integrate(M_0) - 1 and integrate(M_mu) for mu >= 1.
inline std::array<double, 4> completeness_residuals(const MeasurementMap& map) {
    std::array<double, 4> r{};
    for (int mu = 0; mu < 4; ++mu) r[mu] = integrate(map.m[mu]);
    r[0] -= 1.0;
    return r;
}

inline ScalarField intensity(const MeasurementMap& map, const BlochVector& s) {
    if (!s.physical()) throw config_error("intensity: state is not physical");
    ScalarField I(map.grid);
    const std::size_t n = map.grid.size();
    for (std::size_t k = 0; k < n; ++k) {
        double v = map.m[0].values[k] + map.m[1].values[k] * s.s1 +
                   map.m[2].values[k] * s.s2 + map.m[3].values[k] * s.s3;
        if (v < 0.0) {
            if (v < -1e-10)
                throw numerical_error("intensity: negative value " + std::to_string(v));
            v = 0.0;
        }
        I.values[k] = v;
    }
    return I;
}

// Quadrants of the detection plane. Axis points are assigned deterministically:
// x = 0 counts as the x > 0 side, z = 0 as the z > 0 side.
inline std::array<Region, 4> quadrant_regions(const GridSpec&) {
    return {
        Region([](double x, double z) { return x >= 0.0 && z >= 0.0; }),   // Omega_1
        Region([](double x, double z) { return x < 0.0 && z >= 0.0; }),    // Omega_2
        Region([](double x, double z) { return x < 0.0 && z < 0.0; }),     // Omega_3
        Region([](double x, double z) { return x >= 0.0 && z < 0.0; }),    // Omega_4
    };
}

struct MeasurementMatrix {
    // m[k][mu], detection region k = 0..3, Pauli index mu = 0..3.
    std::array<std::array<double, 4>, 4> m{};
    std::array<Region, 4> regions;
};

inline MeasurementMatrix measurement_matrix(const MeasurementMap& map,
                                            const std::array<Region, 4>& regions) {
    MeasurementMatrix M;
    M.regions = regions;
    for (int k = 0; k < 4; ++k)
        for (int mu = 0; mu < 4; ++mu) M.m[k][mu] = integrate(map.m[mu], regions[k]);
    return M;
}

inline std::array<double, 4> probabilities(const MeasurementMatrix& M, const BlochVector& s) {
    if (!s.physical()) throw config_error("probabilities: state is not physical");
    std::array<double, 4> p{};
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) {
        double v = M.m[k][0] * s.s0 + M.m[k][1] * s.s1 + M.m[k][2] * s.s2 + M.m[k][3] * s.s3;
        if (v < 0.0) {
            if (v < -1e-10)
                throw numerical_error("probabilities: p_" + std::to_string(k + 1) +
                                      " = " + std::to_string(v) + " below -1e-10");
            v = 0.0;
        }
        p[k] = v;
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-8)
        throw numerical_error("probabilities: sum " + std::to_string(sum) +
                              " deviates from 1 beyond 1e-8");
    return p;
}

}  // namespace sgtomo
