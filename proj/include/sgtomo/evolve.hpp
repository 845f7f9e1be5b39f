#pragma once

// Split-step propagation of the spinor field through the quadrupolar-field
// region and the subsequent free flight.
//
// One Trotter step of length dt is the symmetric (Strang) product
//   exp(-i h_m dt/2) exp(-i h_l dt) exp(-i h_m dt/2)
// with h_m = g1 (x sigma_1 - z sigma_3) multiplicative in position and
// h_l = g2 (p_x^2 + p_z^2) multiplicative in momentum. The magnetic factor
// is expanded in Pauli components, exp(-i h_m dt/2) = sum_mu u_mu sigma_mu,
// and applied as a pointwise recombination of the four phi_a; the kinetic
// factor is a phase in momentum space reached by FFT.

#include <array>
#include <cmath>
#include <complex>

#include "sgtomo/errors.hpp"
#include "sgtomo/grid.hpp"
#include "sgtomo/spinor.hpp"

namespace sgtomo {

struct SetupParams {
    double g1 = 0.0;      // field coupling, mu*b*sigma*tau / (2 hbar)
    double g2 = 1.0;      // kinetic coupling, hbar*tau / (2 m sigma^2)
    double lambda = 1.0;  // aspect ratio sigma'/sigma of the initial Gaussian
    double T = 1.0;       // detection time in units of the transit time
    int n_t = 600;        // Trotter steps across the magnet interval [0,1]

    void validate() const {
        if (!(g1 >= 0.0)) throw config_error("setup: g1 must be >= 0");
        if (!(g2 > 0.0)) throw config_error("setup: g2 must be > 0");
        if (!(lambda > 0.0)) throw config_error("setup: lambda must be > 0");
        if (!(T >= 1.0)) throw config_error("setup: T must be >= 1");
        if (n_t < 1) throw config_error("setup: n_t must be >= 1");
    }
};

// Pauli expansion of exp(-i h_m dt/2); u2 vanishes identically because the
// field has no sigma_2 part. With r = sqrt(x^2+z^2) and a = g1*r*dt_half,
//   u0 = cos(a), u1 = -i sin(a) x/r, u3 = +i sin(a) z/r,
// where sin(a)/r is evaluated as g1*dt_half*sinc(a) so the r = 0 point
// needs no special case.
struct HalfStepCoefficients {
    ComplexField u0, u1, u3;
};

namespace detail {
inline double sinc(double a) {
    // |a| below ~1e-4: two-term Taylor keeps full double accuracy.
    if (std::abs(a) < 1e-4) return 1.0 - a * a / 6.0;
    return std::sin(a) / a;
}
}  // namespace detail

inline HalfStepCoefficients half_step_coefficients(const GridSpec& grid, double g1,
                                                   double dt_half) {
    HalfStepCoefficients u;
    u.u0 = ComplexField(grid);
    u.u1 = ComplexField(grid);
    u.u3 = ComplexField(grid);
    for (int i = 0; i < grid.n_x; ++i) {
        const double x = grid.x(i);
        for (int j = 0; j < grid.n_z; ++j) {
            const double z = grid.z(j);
            const double r = std::hypot(x, z);
            const double a = g1 * r * dt_half;
            const double c = g1 * dt_half * detail::sinc(a);  // sin(a)/r, finite at r = 0
            const std::size_t idx = grid.index(i, j);
            u.u0.values[idx] = complexd(std::cos(a), 0.0);
            u.u1.values[idx] = complexd(0.0, -c * x);
            u.u3.values[idx] = complexd(0.0, c * z);
        }
    }
    return u;
}

namespace detail {

inline void check_same_shape(const SpinorField& f, const HalfStepCoefficients& u) {
    if (!f.grid.same_shape(u.u0.grid))
        throw numerical_error("evolve: spinor field and half-step coefficients differ in shape");
}

// phi_bar_0 = sum_mu u_mu phi_mu
// phi_bar_l = u_l phi_0 + u_0 phi_l + i sum_ij eps_ijl u_i phi_j   (u_2 = 0)
inline void magnetic_half_step_inplace(SpinorField& f, const HalfStepCoefficients& u) {
    const std::size_t n = f.grid.size();
    const complexd im(0.0, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
        const complexd u0 = u.u0.values[k], u1 = u.u1.values[k], u3 = u.u3.values[k];
        const complexd p0 = f.phi[0].values[k], p1 = f.phi[1].values[k];
        const complexd p2 = f.phi[2].values[k], p3 = f.phi[3].values[k];
        f.phi[0].values[k] = u0 * p0 + u1 * p1 + u3 * p3;
        f.phi[1].values[k] = u1 * p0 + u0 * p1 - im * u3 * p2;
        f.phi[2].values[k] = u0 * p2 + im * (u3 * p1 - u1 * p3);
        f.phi[3].values[k] = u3 * p0 + u0 * p3 + im * u1 * p2;
    }
}

// exp(-i g2 p^2 dt) sampled in natural FFT order, with the two unnormalized
// FFT passes' 1/N factor folded in.
inline ComplexField kinetic_phase(const GridSpec& grid, double g2, double dt) {
    ComplexField phase(grid);
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (int i = 0; i < grid.n_x; ++i) {
        const double px = grid.p_x(i);
        for (int j = 0; j < grid.n_z; ++j) {
            const double pz = grid.p_z(j);
            const double arg = -g2 * (px * px + pz * pz) * dt;
            phase.values[grid.index(i, j)] =
                complexd(std::cos(arg) * scale, std::sin(arg) * scale);
        }
    }
    return phase;
}

inline void kinetic_step_inplace(SpinorField& f, const ComplexField& phase) {
    auto& plans = FftPlans::instance();
    const int nx = f.grid.n_x, nz = f.grid.n_z;
    for (auto& comp : f.phi) {
        plans.execute(comp.values.data(), nx, nz, FFTW_FORWARD);
        const std::size_t n = comp.values.size();
        for (std::size_t k = 0; k < n; ++k) comp.values[k] *= phase.values[k];
        plans.execute(comp.values.data(), nx, nz, FFTW_BACKWARD);
    }
}

// Strang-split evolution under g1, g2 for a signed duration; used forward by
// evolve_magnet and with negated duration by the time-reversal checks.
inline void trotter_evolve_inplace(SpinorField& f, double g1, double g2, double duration,
                                   int n_t) {
    const double dt = duration / n_t;
    const HalfStepCoefficients u = half_step_coefficients(f.grid, g1, dt / 2.0);
    const ComplexField phase = kinetic_phase(f.grid, g2, dt);
    for (int step = 0; step < n_t; ++step) {
        magnetic_half_step_inplace(f, u);
        kinetic_step_inplace(f, phase);
        magnetic_half_step_inplace(f, u);
    }
}

}  // namespace detail

inline SpinorField apply_magnetic_half_step(const SpinorField& field,
                                            const HalfStepCoefficients& u) {
    detail::check_same_shape(field, u);
    SpinorField out = field;
    detail::magnetic_half_step_inplace(out, u);
    return out;
}

inline SpinorField apply_kinetic_step(const SpinorField& field, double g2, double dt) {
    SpinorField out = field;
    detail::kinetic_step_inplace(out, detail::kinetic_phase(field.grid, g2, dt));
    return out;
}

// Propagate from t = 0 to t = 1 through the magnet with n_t symmetric steps.
inline SpinorField evolve_magnet(const SpinorField& field, const SetupParams& params) {
    params.validate();
    if (std::abs(field.time_label) > 1e-12)
        throw config_error("evolve_magnet: field is not at t = 0");
    SpinorField out = field;
    detail::trotter_evolve_inplace(out, params.g1, params.g2, 1.0, params.n_t);
    out.time_label = 1.0;
    return out;
}

// Free flight from t = 1 to t = T as one exact spectral step (the kinetic
// Hamiltonian commutes with itself, so no splitting is involved).
inline SpinorField evolve_free(const SpinorField& field, const SetupParams& params) {
    params.validate();
    if (std::abs(field.time_label - 1.0) > 1e-12)
        throw config_error("evolve_free: field is not at t = 1");
    SpinorField out = field;
    if (params.T > 1.0)
        detail::kinetic_step_inplace(out, detail::kinetic_phase(field.grid, params.g2,
                                                                params.T - 1.0));
    out.time_label = params.T;
    return out;
}

struct DimensionlessCouplings {
    double g1 = 0.0;
    double g2 = 0.0;
    double tau = 0.0;  // transit time through the magnet, seconds
};

// CODATA 2018 reduced Planck constant, J s.
inline constexpr double k_hbar = 1.054571817e-34;

// mu [J/T], m [kg], b [T/m], L [m], speed [m/s], sigma [m].
inline DimensionlessCouplings dimensionless_from_physical(double mu, double m, double b,
                                                          double L, double speed,
                                                          double sigma) {
    if (!(mu > 0.0 && m > 0.0 && b > 0.0 && L > 0.0 && speed > 0.0 && sigma > 0.0))
        throw config_error("dimensionless_from_physical: all inputs must be positive");
    DimensionlessCouplings c;
    c.tau = L / speed;
    c.g1 = mu * b * sigma * c.tau / (2.0 * k_hbar);
    c.g2 = k_hbar * c.tau / (2.0 * m * sigma * sigma);
    return c;
}

}  // namespace sgtomo
