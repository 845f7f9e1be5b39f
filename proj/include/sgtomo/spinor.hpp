#pragma once

// Pauli algebra, Bloch-vector representation of the spin density operator,
// the structure tensor d and the four-component spinor field.
//
// Normalization convention (used by every downstream module): the spinor
// field starts with sum_a integrate(|phi_a|^2) = 1 at t = 0, with only
// phi_0 populated by the initial Gaussian. Writing the 2x2 matrix
// Phi = sum_a phi_a sigma_a, every evolution factor acts as Phi -> U Phi
// with U unitary, so the norm is conserved. The detection fields
// M_mu = Tr(sigma_mu Phi^dag Phi)/2 then obey integrate(M_0) = 1 and
// integrate(M_mu) = 0 for mu >= 1 with no extra factors: the magnetic
// factor cancels pointwise through U^dag U = 1 and the kinetic factor
// through the unitarity of the spectral step, so the intensity of any
// physical state integrates to s_0 = 1. The arbitrary reference spin state
// |chi> that threads through the derivation multiplies every phi_a by the
// same ket and cancels in every observable; it is never materialized.

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>

#include "sgtomo/errors.hpp"
#include "sgtomo/grid.hpp"

namespace sgtomo {

using Mat2 = std::array<std::array<complexd, 2>, 2>;

// sigma_0..sigma_3 as explicit 2x2 matrices.
inline const std::array<Mat2, 4>& pauli_matrices() {
    static const std::array<Mat2, 4> sigma = {{
        {{{complexd(1, 0), complexd(0, 0)}, {complexd(0, 0), complexd(1, 0)}}},
        {{{complexd(0, 0), complexd(1, 0)}, {complexd(1, 0), complexd(0, 0)}}},
        {{{complexd(0, 0), complexd(0, -1)}, {complexd(0, 1), complexd(0, 0)}}},
        {{{complexd(1, 0), complexd(0, 0)}, {complexd(0, 0), complexd(-1, 0)}}},
    }};
    return sigma;
}

inline Mat2 mat2_mul(const Mat2& a, const Mat2& b) {
    Mat2 c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
}

inline complexd mat2_trace(const Mat2& a) { return a[0][0] + a[1][1]; }

struct BlochVector {
    double s0 = 1.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;

    double purity() const { return s1 * s1 + s2 * s2 + s3 * s3; }
    bool physical(double tol = 1e-9) const { return s0 == 1.0 && purity() <= 1.0 + tol; }
    double operator[](int mu) const {
        return mu == 0 ? s0 : (mu == 1 ? s1 : (mu == 2 ? s2 : s3));
    }
};

inline BlochVector bloch_from_angles(double theta, double phi) {
    if (!(theta >= 0.0 && theta <= M_PI))
        throw config_error("bloch_from_angles: theta outside [0, pi]");
    if (!(phi > 0.0 && phi <= 2.0 * M_PI))
        throw config_error("bloch_from_angles: phi outside (0, 2*pi]");
    BlochVector s;
    s.s0 = 1.0;
    s.s1 = std::sin(theta) * std::cos(phi);
    s.s2 = std::sin(theta) * std::sin(phi);
    s.s3 = std::cos(theta);
    return s;
}

// d[a][b][m] = Tr(sigma_a sigma_b sigma_m) / 2, all 64 entries.
struct PauliTriple {
    std::array<std::array<std::array<complexd, 4>, 4>, 4> d{};
};

inline PauliTriple pauli_triple() {
    PauliTriple t;
    const auto& sigma = pauli_matrices();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int m = 0; m < 4; ++m)
                t.d[a][b][m] = 0.5 * mat2_trace(mat2_mul(mat2_mul(sigma[a], sigma[b]), sigma[m]));
    return t;
}

// Pauli components phi_a(x,z) of the evolved spatial state at time_label.
struct SpinorField {
    std::array<ComplexField, 4> phi;
    GridSpec grid;
    double time_label = 0.0;
};

inline double spatial_norm(const SpinorField& f) {
    double sum = 0.0;
    for (const auto& comp : f.phi)
        for (const auto& v : comp.values) sum += std::norm(v);
    return sum * f.grid.cell_area();
}

// Largest |phi| on the lattice boundary relative to the largest |phi|
// anywhere; a diagnostic for mass reaching the artificial box edge.
inline double boundary_peak_ratio(const SpinorField& f) {
    const GridSpec& g = f.grid;
    double peak = 0.0, edge = 0.0;
    for (const auto& comp : f.phi) {
        for (int i = 0; i < g.n_x; ++i) {
            for (int j = 0; j < g.n_z; ++j) {
                double a = std::abs(comp(i, j));
                peak = std::max(peak, a);
                if (i == 0 || j == 0 || i == g.n_x - 1 || j == g.n_z - 1)
                    edge = std::max(edge, a);
            }
        }
    }
    return peak > 0.0 ? edge / peak : 0.0;
}

// Initial state: phi_0 the elongated Gaussian sqrt(1/(2 pi lambda))
// exp(-(x^2 + (z/lambda)^2)/4), phi_1 = phi_2 = phi_3 = 0.
// Warns (stderr, non-fatal) when the box barely holds the Gaussian.
inline SpinorField init_spinor(const GridSpec& grid, double lambda) {
    if (!(lambda > 0.0)) throw config_error("init_spinor: lambda must be positive");
    SpinorField f;
    f.grid = grid;
    f.time_label = 0.0;
    for (auto& comp : f.phi) comp = ComplexField(grid);
    const double amp = std::sqrt(1.0 / (2.0 * M_PI * lambda));
    for (int i = 0; i < grid.n_x; ++i) {
        const double x = grid.x(i);
        for (int j = 0; j < grid.n_z; ++j) {
            const double zl = grid.z(j) / lambda;
            f.phi[0](i, j) = amp * std::exp(-(x * x + zl * zl) / 4.0);
        }
    }
    if (const double ratio = boundary_peak_ratio(f); ratio > 1e-8)
        std::fprintf(stderr,
                     "warning: initial Gaussian boundary amplitude is %.2e of the peak; "
                     "the grid box may be too small\n",
                     ratio);
    return f;
}

}  // namespace sgtomo
