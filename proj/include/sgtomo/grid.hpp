#pragma once

// Uniform 2D position/momentum lattice, spectral transforms and quadrature.
//
// Conventions, fixed once and relied on everywhere:
//  * Closed-open cells: n_x * n_z samples at x_i = x_min + i*dx, i = 0..n_x-1;
//    the duplicate right endpoint is excluded so the DFT is unpadded.
//  * Momentum samples are stored in natural FFT order internally
//    (p_i = dp*i for i <= (n-1)/2, otherwise dp*(i-n)); use the *_centered
//    helpers to obtain monotonically increasing axes at API boundaries.
//  * Unitary DFT pair: both to_momentum and to_position scale by
//    1/sqrt(n_x*n_z), so to_position(to_momentum(f)) == f to round-off and
//    sum|f|^2 == sum|F|^2 exactly (Parseval in lattice form).
//  * All quadratures are cell-constant Riemann sums:
//    integrate(f) = sum_ij f(x_i, z_j) * dx * dz.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "sgtomo/errors.hpp"

namespace sgtomo {

using complexd = std::complex<double>;

struct GridSpec {
    double x_min = 0.0, x_max = 0.0;
    double z_min = 0.0, z_max = 0.0;
    int n_x = 0, n_z = 0;
    double dx = 0.0, dz = 0.0;
    double dp_x = 0.0, dp_z = 0.0;

    // Written as an interpolation between the bounds rather than x_min + i*dx
    // so that symmetric boxes with even counts sample x = 0 exactly (quadrant
    // membership of axis points must not depend on accumulated round-off).
    double x(int i) const { return x_min + (x_max - x_min) * (static_cast<double>(i) / n_x); }
    double z(int j) const { return z_min + (z_max - z_min) * (static_cast<double>(j) / n_z); }

    // Natural FFT ordering; covers [-pi/dx, pi/dx).
    double p_x(int i) const { return dp_x * (i <= (n_x - 1) / 2 ? i : i - n_x); }
    double p_z(int j) const { return dp_z * (j <= (n_z - 1) / 2 ? j : j - n_z); }

    std::size_t size() const { return static_cast<std::size_t>(n_x) * n_z; }
    std::size_t index(int ix, int iz) const { return static_cast<std::size_t>(ix) * n_z + iz; }
    double cell_area() const { return dx * dz; }

    bool same_shape(const GridSpec& other) const {
        return n_x == other.n_x && n_z == other.n_z;
    }
};

inline GridSpec make_grid(double x_min, double x_max, double z_min, double z_max,
                          int n_x, int n_z) {
    if (!(x_max > x_min) || !(z_max > z_min))
        throw config_error("grid: degenerate interval (require x_max > x_min, z_max > z_min)");
    if (n_x < 2 || n_z < 2)
        throw config_error("grid: need at least 2 samples per direction");
    GridSpec g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.z_min = z_min;
    g.z_max = z_max;
    g.n_x = n_x;
    g.n_z = n_z;
    g.dx = (x_max - x_min) / n_x;
    g.dz = (z_max - z_min) / n_z;
    g.dp_x = 2.0 * M_PI / (n_x * g.dx);
    g.dp_z = 2.0 * M_PI / (n_z * g.dz);
    return g;
}

template <typename T>
struct Field2D {
    GridSpec grid;
    std::vector<T> values;  // row-major, index = ix*n_z + iz

    Field2D() = default;
    explicit Field2D(const GridSpec& g, T fill = T{}) : grid(g), values(g.size(), fill) {}

    T& operator()(int ix, int iz) { return values[grid.index(ix, iz)]; }
    const T& operator()(int ix, int iz) const { return values[grid.index(ix, iz)]; }
};

using ScalarField = Field2D<double>;
using ComplexField = Field2D<complexd>;

// Predicate over sample coordinates (x_i, z_j); selects cells for quadrature.
using Region = std::function<bool(double, double)>;

namespace detail {

// Process-wide FFTW plan cache. Plans are created with FFTW_ESTIMATE so the
// chosen algorithm is deterministic, and FFTW_UNALIGNED so one plan serves
// any buffer of the right shape. fftw_execute_dft on distinct buffers is
// thread-safe; only plan creation is serialized.
class FftPlans {
public:
    static FftPlans& instance() {
        static FftPlans cache;
        return cache;
    }

    void execute(complexd* data, int n_x, int n_z, int sign) {
        fftw_plan plan = get(n_x, n_z, sign);
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                         reinterpret_cast<fftw_complex*>(data));
    }

private:
    FftPlans() = default;
    ~FftPlans() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }
    FftPlans(const FftPlans&) = delete;

    fftw_plan get(int n_x, int n_z, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(n_x, n_z, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<complexd> proto(static_cast<std::size_t>(n_x) * n_z);
        fftw_plan plan = fftw_plan_dft_2d(
            n_x, n_z, reinterpret_cast<fftw_complex*>(proto.data()),
            reinterpret_cast<fftw_complex*>(proto.data()), sign,
            FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

// In-place unitary transforms used by the propagator hot loop.
inline void fft_unitary_inplace(ComplexField& f, int sign) {
    FftPlans::instance().execute(f.values.data(), f.grid.n_x, f.grid.n_z, sign);
    const double scale = 1.0 / std::sqrt(static_cast<double>(f.grid.size()));
    for (auto& v : f.values) v *= scale;
}

}  // namespace detail

inline ComplexField to_momentum(const ComplexField& f) {
    if (f.values.size() != f.grid.size())
        throw numerical_error("grid: field shape does not match its GridSpec");
    ComplexField out = f;
    detail::fft_unitary_inplace(out, FFTW_FORWARD);
    return out;
}

inline ComplexField to_position(const ComplexField& F) {
    if (F.values.size() != F.grid.size())
        throw numerical_error("grid: field shape does not match its GridSpec");
    ComplexField out = F;
    detail::fft_unitary_inplace(out, FFTW_BACKWARD);
    return out;
}

// Reorder a natural-FFT-order momentum field so both axes increase
// monotonically from -pi/dx (resp. -pi/dz).
template <typename T>
Field2D<T> centered(const Field2D<T>& F) {
    Field2D<T> out(F.grid);
    const int nx = F.grid.n_x, nz = F.grid.n_z;
    const int hx = (nx + 1) / 2, hz = (nz + 1) / 2;  // count of non-negative freqs
    for (int i = 0; i < nx; ++i) {
        int ci = (i + nx - hx) % nx;  // natural index i lands at centered row ci
        for (int j = 0; j < nz; ++j) {
            int cj = (j + nz - hz) % nz;
            out(ci, cj) = F(i, j);
        }
    }
    return out;
}

inline std::vector<double> momentum_axis_x_centered(const GridSpec& g) {
    std::vector<double> p(g.n_x);
    for (int i = 0; i < g.n_x; ++i) p[i] = g.dp_x * (i - g.n_x + (g.n_x + 1) / 2);
    return p;
}

inline std::vector<double> momentum_axis_z_centered(const GridSpec& g) {
    std::vector<double> p(g.n_z);
    for (int j = 0; j < g.n_z; ++j) p[j] = g.dp_z * (j - g.n_z + (g.n_z + 1) / 2);
    return p;
}

inline double integrate(const ScalarField& f) {
    double sum = 0.0;
    for (double v : f.values) sum += v;
    return sum * f.grid.cell_area();
}

inline double integrate(const ScalarField& f, const Region& region) {
    const GridSpec& g = f.grid;
    double sum = 0.0;
    for (int i = 0; i < g.n_x; ++i) {
        const double xi = g.x(i);
        for (int j = 0; j < g.n_z; ++j) {
            if (region(xi, g.z(j))) sum += f(i, j);
        }
    }
    return sum * g.cell_area();
}

}  // namespace sgtomo
