#pragma once

// Classical Fisher information of the two detection schemes, the logarithmic
// error of a setup, and the quantum Cramer-Rao reference bounds.
//
// With s_0 = 1 fixed, only mu = 1..3 carry information, so the scaled
// information matrix K is 3x3:
//   quadrant:    K_uv = sum_k M_ku M_kv / p_k
//   continuous:  K_uv = integrate(M_u M_v / I)

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "sgtomo/errors.hpp"
#include "sgtomo/measure.hpp"
#include "sgtomo/spinor.hpp"

namespace sgtomo {

enum class Scheme { quadrant, continuous };

inline const char* scheme_name(Scheme s) {
    return s == Scheme::quadrant ? "quadrant" : "continuous";
}

struct InfoMatrix {
    Eigen::Matrix3d K = Eigen::Matrix3d::Zero();
    Scheme scheme = Scheme::quadrant;
    BlochVector s_ref;
};

inline InfoMatrix fisher_quadrant(const MeasurementMatrix& M, const BlochVector& s) {
    if (!s.physical()) throw config_error("fisher_quadrant: state is not physical");
    InfoMatrix info;
    info.scheme = Scheme::quadrant;
    info.s_ref = s;
    for (int k = 0; k < 4; ++k) {
        const double pk = M.m[k][0] + M.m[k][1] * s.s1 + M.m[k][2] * s.s2 + M.m[k][3] * s.s3;
        if (!(pk > 0.0))
            throw numerical_error("fisher_quadrant: p_" + std::to_string(k + 1) +
                                  " is not positive");
        for (int u = 0; u < 3; ++u)
            for (int v = 0; v < 3; ++v)
                info.K(u, v) += M.m[k][u + 1] * M.m[k][v + 1] / pk;
    }
    return info;
}

inline InfoMatrix fisher_continuous(const MeasurementMap& map, const BlochVector& s,
                                    double floor = 1e-12) {
    if (!s.physical()) throw config_error("fisher_continuous: state is not physical");
    InfoMatrix info;
    info.scheme = Scheme::continuous;
    info.s_ref = s;
    const std::size_t n = map.grid.size();
    double max_m0 = 0.0;
    for (std::size_t c = 0; c < n; ++c) max_m0 = std::max(max_m0, map.m[0].values[c]);
    // Sub-floor intensity is tolerated in the far tails, where |M_mu| decays
    // alongside I and the dropped contribution is bounded by the tail mass.
    // A cell with real operator weight and vanishing intensity is different:
    // the integrand is genuinely unbounded there, so it is an error.
    const double weight_floor = 1e-6 * max_m0;
    for (std::size_t c = 0; c < n; ++c) {
        const double m1 = map.m[1].values[c], m2 = map.m[2].values[c], m3 = map.m[3].values[c];
        const double I = map.m[0].values[c] + m1 * s.s1 + m2 * s.s2 + m3 * s.s3;
        if (I <= floor) {
            if (std::abs(m1) > weight_floor || std::abs(m2) > weight_floor ||
                std::abs(m3) > weight_floor)
                throw support_violation_error(
                    "fisher_continuous: significant |M_mu| where the intensity vanishes");
            continue;
        }
        const double w = 1.0 / I;
        info.K(0, 0) += m1 * m1 * w;
        info.K(0, 1) += m1 * m2 * w;
        info.K(0, 2) += m1 * m3 * w;
        info.K(1, 1) += m2 * m2 * w;
        info.K(1, 2) += m2 * m3 * w;
        info.K(2, 2) += m3 * m3 * w;
    }
    info.K(1, 0) = info.K(0, 1);
    info.K(2, 0) = info.K(0, 2);
    info.K(2, 1) = info.K(1, 2);
    info.K *= map.grid.cell_area();
    return info;
}

struct ErrorSummary {
    double delta = 0.0;                         // log10 tr K^-1
    std::array<double, 3> variances{};          // diag K^-1
    double delta_excluding_s2 = 0.0;            // log10 (tr K^-1 - var(s2))
    double quantum_delta_S = 0.0;               // symmetric quantum bound
    std::optional<double> quantum_delta_R;      // right bound; absent for pure states
    std::optional<std::array<double, 3>> near_null;  // attached when delta saturates
};

// Condition number above which the inverse is reported as the +infinity
// sentinel rather than a garbage number (saturated cells in sweep heatmaps).
inline constexpr double k_condition_limit = 1e15;

inline ErrorSummary log_error(const InfoMatrix& info) {
    ErrorSummary es;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(info.K);
    const Eigen::Vector3d ev = eig.eigenvalues();  // ascending
    const double inf = std::numeric_limits<double>::infinity();
    if (!(ev(0) > 0.0) || ev(2) / ev(0) > k_condition_limit) {
        es.delta = inf;
        es.delta_excluding_s2 = inf;
        es.variances = {inf, inf, inf};
        const Eigen::Vector3d null_dir = eig.eigenvectors().col(0);
        es.near_null = std::array<double, 3>{null_dir(0), null_dir(1), null_dir(2)};
        return es;
    }
    const Eigen::Matrix3d inv = info.K.inverse();
    es.variances = {inv(0, 0), inv(1, 1), inv(2, 2)};
    es.delta = std::log10(inv.trace());
    es.delta_excluding_s2 = std::log10(inv(0, 0) + inv(2, 2));
    return es;
}

struct QuantumBounds {
    double delta_S = 0.0;
    std::optional<double> delta_R;
};

// Mixed states: delta_S = delta_R = log10(3 - |s|^2). Pure states: the right
// logarithmic derivative does not exist, only the symmetric bound log10(3).
inline QuantumBounds quantum_bounds(const BlochVector& s) {
    const double purity = s.purity();
    if (s.s0 != 1.0 || purity > 1.0 + 1e-9)
        throw config_error("quantum_bounds: state is not physical");
    QuantumBounds qb;
    if (purity >= 1.0 - 1e-9) {
        qb.delta_S = std::log10(3.0);
        qb.delta_R = std::nullopt;
    } else {
        qb.delta_S = std::log10(3.0 - purity);
        qb.delta_R = qb.delta_S;
    }
    return qb;
}

// Full summary for one computed setup.
inline ErrorSummary summarize(const InfoMatrix& info) {
    ErrorSummary es = log_error(info);
    const QuantumBounds qb = quantum_bounds(info.s_ref);
    es.quantum_delta_S = qb.delta_S;
    es.quantum_delta_R = qb.delta_R;
    return es;
}

}  // namespace sgtomo
