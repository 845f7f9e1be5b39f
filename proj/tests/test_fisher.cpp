#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sgtomo/errors.hpp"
#include "sgtomo/fisher.hpp"

using namespace sgtomo;

TEST_CASE("g1 = 0: both information matrices vanish") {
    auto setup = fixtures::make_small_setup(0.0, 1.0, 0.7, 1.0, 16.0, 128, 40);
    BlochVector s;
    s.s1 = 0.2;
    s.s3 = -0.1;
    InfoMatrix quad = fisher_quadrant(setup.matrix, s);
    InfoMatrix cont = fisher_continuous(setup.map, s);
    CHECK(quad.K.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(cont.K.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("quadrant Fisher matrix matches the finite-difference oracle") {
    auto setup = fixtures::make_small_setup(2.0, 1.0, 0.7);
    BlochVector s = bloch_from_angles(1.91, 4.78);
    InfoMatrix info = fisher_quadrant(setup.matrix, s);

    CHECK((info.K - info.K.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(info.K);
    CHECK(eig.eigenvalues()(0) > -1e-10);

    // p is linear in s, so the Hessian of sum_k p_k ln p_k equals K exactly
    const auto& M = setup.matrix.m;
    auto H = [&](const std::array<double, 3>& q) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double pk = M[k][0] + M[k][1] * q[0] + M[k][2] * q[1] + M[k][3] * q[2];
            acc += pk * std::log(pk);
        }
        return acc;
    };
    auto hess = oracles::fd_hessian(H, {s.s1, s.s2, s.s3}, 1e-4);
    const double scale = info.K.cwiseAbs().maxCoeff();
    for (int u = 0; u < 3; ++u)
        for (int v = 0; v < 3; ++v)
            CHECK(std::abs(info.K(u, v) - hess[u][v]) < 1e-4 * scale);
}

TEST_CASE("continuous Fisher matrix matches the finite-difference oracle") {
    auto setup = fixtures::make_small_setup(2.0, 1.0, 0.7);
    BlochVector s = bloch_from_angles(1.91, 4.78);
    InfoMatrix info = fisher_continuous(setup.map, s);

    auto H = [&](const std::array<double, 3>& q) {
        double acc = 0.0;
        for (std::size_t c = 0; c < setup.grid.size(); ++c) {
            const double I = setup.map.m[0].values[c] + setup.map.m[1].values[c] * q[0] +
                             setup.map.m[2].values[c] * q[1] + setup.map.m[3].values[c] * q[2];
            if (I > 0.0) acc += I * std::log(I);
        }
        return acc * setup.grid.cell_area();
    };
    auto hess = oracles::fd_hessian(H, {s.s1, s.s2, s.s3}, 1e-4);
    const double scale = info.K.cwiseAbs().maxCoeff();
    for (int u = 0; u < 3; ++u)
        for (int v = 0; v < 3; ++v)
            CHECK(std::abs(info.K(u, v) - hess[u][v]) < 1e-4 * scale);
}

TEST_CASE("coarse-graining never gains information") {
    auto setup = fixtures::make_small_setup(2.0, 1.0, 0.7);
    BlochVector s = bloch_from_angles(1.91, 4.78);
    Eigen::Matrix3d diff =
        fisher_continuous(setup.map, s).K - fisher_quadrant(setup.matrix, s).K;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(diff);
    CHECK(eig.eigenvalues()(0) >= -1e-8);
}

TEST_CASE("lambda = 1: the s2 row of the continuous matrix is numerically null") {
    auto setup = fixtures::make_small_setup(2.0, 1.0, 1.0);
    BlochVector s = bloch_from_angles(1.91, 4.78);
    InfoMatrix info = fisher_continuous(setup.map, s);
    const double row = std::sqrt(info.K(1, 0) * info.K(1, 0) + info.K(1, 1) * info.K(1, 1) +
                                 info.K(1, 2) * info.K(1, 2));
    CHECK(row < 1e-8 * info.K.norm());
}

TEST_CASE("log_error: identity, near-singular diagonal, sentinel") {
    InfoMatrix id;
    id.K = Eigen::Matrix3d::Identity();
    ErrorSummary es = log_error(id);
    CHECK(es.delta == doctest::Approx(std::log10(3.0)).epsilon(1e-12));
    CHECK(es.variances[0] == doctest::Approx(1.0));
    CHECK(es.delta_excluding_s2 == doctest::Approx(std::log10(2.0)).epsilon(1e-12));

    InfoMatrix weak;
    weak.K = Eigen::Vector3d(1.0, 1e-12, 1.0).asDiagonal();
    es = log_error(weak);
    CHECK(es.delta == doctest::Approx(12.0).epsilon(1e-3));
    CHECK(es.delta_excluding_s2 == doctest::Approx(std::log10(2.0)).epsilon(1e-6));

    InfoMatrix singular;
    singular.K = Eigen::Vector3d(1.0, 1e-16, 1.0).asDiagonal();
    es = log_error(singular);
    CHECK(std::isinf(es.delta));
    REQUIRE(es.near_null.has_value());
    CHECK(std::abs((*es.near_null)[1]) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("quantum bounds") {
    BlochVector mixed;  // maximally mixed
    QuantumBounds qb = quantum_bounds(mixed);
    CHECK(qb.delta_S == doctest::Approx(std::log10(3.0)).epsilon(1e-12));
    REQUIRE(qb.delta_R.has_value());
    CHECK(*qb.delta_R == qb.delta_S);

    BlochVector pure = bloch_from_angles(1.91, 4.78);
    qb = quantum_bounds(pure);
    CHECK(qb.delta_S == doctest::Approx(std::log10(3.0)).epsilon(1e-12));
    CHECK_FALSE(qb.delta_R.has_value());

    BlochVector half;
    half.s1 = std::sqrt(0.5);
    qb = quantum_bounds(half);
    CHECK(qb.delta_S == doctest::Approx(std::log10(2.5)).epsilon(1e-12));

    BlochVector bad;
    bad.s3 = 1.5;
    CHECK_THROWS_AS(quantum_bounds(bad), config_error);
}

TEST_CASE("Cramer-Rao ordering on a small sweep") {
    BlochVector s = bloch_from_angles(1.91, 4.78);
    for (double g1 : {1.5, 3.0})
        for (double g2 : {0.8, 2.0}) {
            auto setup = fixtures::make_small_setup(g1, g2, 0.7, 1.0, 20.0, 160, 80);
            ErrorSummary quad = summarize(fisher_quadrant(setup.matrix, s));
            ErrorSummary cont = summarize(fisher_continuous(setup.map, s));
            CHECK(quad.delta >= quad.quantum_delta_S - 1e-9);
            CHECK(cont.delta >= cont.quantum_delta_S - 1e-9);
            CHECK(quad.delta >= cont.delta - 1e-8);  // coarse-graining ordering
        }
}

TEST_CASE("fisher_quadrant rejects vanishing probabilities") {
    MeasurementMatrix M{};
    M.m = {{{0.5, 0.5, 0.0, 0.0}, {0.5, -0.5, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0},
            {0.0, 0.0, 0.0, 0.0}}};
    BlochVector s;
    CHECK_THROWS_AS(fisher_quadrant(M, s), numerical_error);
}
