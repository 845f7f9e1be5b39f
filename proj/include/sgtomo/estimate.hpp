#pragma once

// Spin-state estimators: linear inversion through the Moore-Penrose inverse
// of the measurement matrix, and the iterative maximum-likelihood fixed point
//   s_mu^(n+1) = (2 r_mu^(n) - s_mu^(n) gamma^(n)) / (2 r_0^(n) + gamma^(n)),
//   gamma = r_1^2 + r_2^2 + r_3^2 - r_0^2,
// where r is built from quadrant frequencies (discrete scheme) or from the
// detection fields at the observed hit cells (continuous scheme). Each
// iterate is normalized (s_0 = 1) and stays inside the closed Bloch ball.
// Plain iteration is not globally monotone, so a step that lowers the
// log-likelihood by more than 1e-12 is halved back toward the previous
// iterate; halvings are counted in the report.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "sgtomo/errors.hpp"
#include "sgtomo/measure.hpp"
#include "sgtomo/sample.hpp"
#include "sgtomo/spinor.hpp"

namespace sgtomo {

struct EstimatorConfig {
    int max_iter = 10000;
    double tol = 1e-10;              // stop when max_mu |step| drops below
    double likelihood_floor = 1e-12; // minimum probability / intensity in denominators

    void validate() const {
        if (max_iter < 1) throw config_error("estimator: max_iter must be >= 1");
        if (!(tol > 0.0)) throw config_error("estimator: tol must be > 0");
        if (!(likelihood_floor > 0.0)) throw config_error("estimator: floor must be > 0");
    }
};

struct EstimateReport {
    BlochVector s_hat;
    int iterations = 0;
    bool converged = false;
    double fixed_point_residual = 0.0;
    bool projected = false;  // linear inversion only
    int damping_events = 0;
    std::string method;
};

namespace detail {

inline void check_frequencies(const std::vector<double>& f) {
    double sum = 0.0;
    for (double fk : f) {
        if (!(fk >= 0.0)) throw config_error("estimate: negative frequency");
        sum += fk;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw config_error("estimate: frequencies sum to " + std::to_string(sum));
}

struct RState {
    std::array<double, 4> r{};
    double loglike = 0.0;
};

// Shared RrhoR driver; `compute` maps a Bloch vector to (r, loglike).
template <typename ComputeR>
EstimateReport rrr_iterate(ComputeR&& compute, const EstimatorConfig& cfg,
                           const std::string& method) {
    cfg.validate();
    EstimateReport rep;
    rep.method = method;

    BlochVector s;  // maximally mixed start
    RState cur = compute(s);
    for (int it = 0; it < cfg.max_iter; ++it) {
        const double gamma =
            cur.r[1] * cur.r[1] + cur.r[2] * cur.r[2] + cur.r[3] * cur.r[3] - cur.r[0] * cur.r[0];
        const double denom = 2.0 * cur.r[0] + gamma;
        if (!(denom > 0.0))
            throw numerical_error("estimate: non-positive RrhoR normalization");
        BlochVector next;
        next.s1 = (2.0 * cur.r[1] - s.s1 * gamma) / denom;
        next.s2 = (2.0 * cur.r[2] - s.s2 * gamma) / denom;
        next.s3 = (2.0 * cur.r[3] - s.s3 * gamma) / denom;

        RState attempt = compute(next);
        int halvings = 0;
        while (attempt.loglike < cur.loglike - 1e-12 && halvings < 60) {
            next.s1 = 0.5 * (next.s1 + s.s1);
            next.s2 = 0.5 * (next.s2 + s.s2);
            next.s3 = 0.5 * (next.s3 + s.s3);
            attempt = compute(next);
            ++halvings;
            ++rep.damping_events;
        }

        const double step = std::max({std::abs(next.s1 - s.s1), std::abs(next.s2 - s.s2),
                                      std::abs(next.s3 - s.s3)});
        s = next;
        cur = attempt;
        rep.iterations = it + 1;
        if (s.purity() > 1.0 + 1e-9)
            throw numerical_error("estimate: iterate left the Bloch ball");
        if (step < cfg.tol) {
            rep.converged = true;
            break;
        }
    }
    rep.fixed_point_residual =
        std::max({std::abs((1.0 - cur.r[0]) * s.s1 - cur.r[1]),
                  std::abs((1.0 - cur.r[0]) * s.s2 - cur.r[2]),
                  std::abs((1.0 - cur.r[0]) * s.s3 - cur.r[3])});
    rep.s_hat = s;
    return rep;
}

}  // namespace detail

// Moore-Penrose inversion of f = M s for a (rows x 4) measurement matrix.
// Reports the raw, possibly unphysical, solution unless clipping is requested.
inline EstimateReport linear_inversion(const std::vector<double>& f, const Eigen::MatrixXd& M,
                                       bool clip_to_ball = false) {
    if (M.cols() != 4) throw config_error("linear_inversion: measurement matrix needs 4 columns");
    if (M.rows() < 4) throw config_error("linear_inversion: need at least 4 regions");
    if (static_cast<Eigen::Index>(f.size()) != M.rows())
        throw config_error("linear_inversion: frequency vector length mismatch");
    detail::check_frequencies(f);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (sv(3) < 1e-12 * sv(0)) {
        std::vector<double> values(sv.data(), sv.data() + sv.size());
        throw ill_conditioned_error(
            "linear_inversion: measurement matrix is rank-deficient below the 1e-12 cutoff",
            values);
    }
    Eigen::Map<const Eigen::VectorXd> fv(f.data(), f.size());
    Eigen::VectorXd s = svd.solve(fv);

    EstimateReport rep;
    rep.method = "li";
    rep.s_hat = BlochVector{s(0), s(1), s(2), s(3)};
    rep.iterations = 0;
    rep.converged = true;
    Eigen::VectorXd resid = M * s - fv;
    rep.fixed_point_residual = resid.cwiseAbs().maxCoeff();
    if (clip_to_ball) {
        rep.projected = true;
        rep.s_hat.s0 = 1.0;
        const double norm = std::sqrt(rep.s_hat.purity());
        if (norm > 1.0) {
            rep.s_hat.s1 /= norm;
            rep.s_hat.s2 /= norm;
            rep.s_hat.s3 /= norm;
        }
    }
    return rep;
}

inline EstimateReport linear_inversion(const std::array<double, 4>& f,
                                       const MeasurementMatrix& M,
                                       bool clip_to_ball = false) {
    Eigen::MatrixXd mat(4, 4);
    for (int k = 0; k < 4; ++k)
        for (int mu = 0; mu < 4; ++mu) mat(k, mu) = M.m[k][mu];
    return linear_inversion(std::vector<double>(f.begin(), f.end()), mat, clip_to_ball);
}

inline EstimateReport mle_discrete(const std::array<double, 4>& f, const MeasurementMatrix& M,
                                   const EstimatorConfig& cfg = {}) {
    detail::check_frequencies(std::vector<double>(f.begin(), f.end()));
    auto compute = [&](const BlochVector& s) {
        detail::RState st;
        for (int k = 0; k < 4; ++k) {
            const double pk = M.m[k][0] + M.m[k][1] * s.s1 + M.m[k][2] * s.s2 + M.m[k][3] * s.s3;
            if (pk < cfg.likelihood_floor) {
                if (f[k] > 0.0)
                    throw likelihood_degeneracy_error(
                        "mle_discrete: observed frequency in region " + std::to_string(k + 1) +
                        " but modelled probability is below the floor");
                continue;
            }
            const double w = f[k] / pk;
            for (int mu = 0; mu < 4; ++mu) st.r[mu] += w * M.m[k][mu];
            if (f[k] > 0.0) st.loglike += f[k] * std::log(pk);
        }
        return st;
    };
    return detail::rrr_iterate(compute, cfg, "mle_discrete");
}

inline EstimateReport mle_continuous(const PositionSample& sample, const MeasurementMap& map,
                                     const EstimatorConfig& cfg = {}) {
    if (sample.size() == 0) throw config_error("mle_continuous: empty sample");
    if (!sample.grid.same_shape(map.grid))
        throw config_error("mle_continuous: sample and measurement map grids differ");

    // Collapse hits onto unique cells; the iteration cost is then O(#cells).
    std::unordered_map<std::size_t, long long> hist;
    hist.reserve(sample.cells.size());
    for (std::size_t c : sample.cells) {
        if (c >= map.grid.size())
            throw config_error("mle_continuous: hit outside the lattice");
        ++hist[c];
    }
    std::vector<std::pair<std::size_t, long long>> cells(hist.begin(), hist.end());
    std::sort(cells.begin(), cells.end());  // fixed accumulation order
    struct CellTerm {
        double m0, m1, m2, m3, weight;
    };
    std::vector<CellTerm> terms;
    terms.reserve(cells.size());
    const double inv_n = 1.0 / static_cast<double>(sample.size());
    for (const auto& [c, cnt] : cells)
        terms.push_back({map.m[0].values[c], map.m[1].values[c], map.m[2].values[c],
                         map.m[3].values[c], static_cast<double>(cnt) * inv_n});

    auto compute = [&](const BlochVector& s) {
        detail::RState st;
        for (const CellTerm& t : terms) {
            const double I = t.m0 + t.m1 * s.s1 + t.m2 * s.s2 + t.m3 * s.s3;
            if (I < cfg.likelihood_floor)
                throw likelihood_degeneracy_error(
                    "mle_continuous: hit cell with intensity below the floor");
            const double w = t.weight / I;
            st.r[0] += w * t.m0;
            st.r[1] += w * t.m1;
            st.r[2] += w * t.m2;
            st.r[3] += w * t.m3;
            st.loglike += t.weight * std::log(I);
        }
        return st;
    };
    return detail::rrr_iterate(compute, cfg, "mle_continuous");
}

}  // namespace sgtomo
