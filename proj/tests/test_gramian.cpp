#include "netlqr/gramian.hpp"

#include "netlqr/lqr.hpp"

#include "support/test_systems.hpp"

#include <doctest.h>

#include <cmath>

using namespace netlqr;

namespace {

NetworkSystem scalar_system(double a) {
    Matrix one = Matrix::Identity(1, 1);
    Matrix A(1, 1);
    A << a;
    return NetworkSystem(A, {Vector::Ones(1)}, one, one, one, one, one);
}

double min_eig(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (M + M.transpose()),
                                              Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

NetworkSystem with_state_cost(const NetworkSystem& sys, const Matrix& Q) {
    return NetworkSystem(sys.A(), sys.catalog(), Q, sys.QT(), sys.R_full(), sys.X0(), sys.W());
}

}  // namespace

TEST_CASE("inverse-dynamics Gramian basics") {
    SUBCASE("scalar two-stage sum") {
        const GramianResult g = inverse_gramian(scalar_system(2.0), ActuatorSet({0}), 2);
        CHECK(g.Xbar(0, 0) == doctest::Approx(1.25).epsilon(1e-14));
        // terminal term transported twice: (1/2)^2 * 1 * (1/2)^2
        CHECK(g.X_full(0, 0) == doctest::Approx(1.25 + 0.0625).epsilon(1e-14));
    }

    SUBCASE("scalar limit is the geometric series") {
        const GramianLimit limit = inverse_gramian_limit(scalar_system(2.0), ActuatorSet({0}));
        CHECK_FALSE(limit.capped);
        CHECK(limit.Xbar(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-11));
    }

    SUBCASE("no actuation leaves only the transported terminal term") {
        const NetworkSystem sys = scalar_system(2.0);
        const GramianResult g = inverse_gramian(sys, ActuatorSet::none(), 3);
        CHECK(g.Xbar.norm() == 0.0);
        CHECK(g.X_full(0, 0) == doctest::Approx(std::pow(0.5, 6)).epsilon(1e-14));
    }

    SUBCASE("singular dynamics are rejected") {
        const NetworkSystem sys = build_path_system(5, 1.0);
        CHECK_THROWS_AS(inverse_gramian(sys, ActuatorSet({0}), 4), Error);
        CHECK_THROWS_AS(inverse_gramian_limit(sys, ActuatorSet({0})), Error);
    }

    SUBCASE("divergent sums hit the stage cap and are flagged") {
        // stable A makes A^{-1} expanding, so the series never settles
        const GramianLimit limit =
            inverse_gramian_limit(scalar_system(0.5), ActuatorSet({0}), 1e-12, 200);
        CHECK(limit.capped);
        CHECK(limit.stages == 200);
    }
}

TEST_CASE("recursion and closed form agree") {
    for (int trial = 0; trial < 30; ++trial) {
        const auto seed = static_cast<std::uint64_t>(2200 + trial);
        const NetworkSystem sys = testsup::random_system(seed, testsup::Regime::invertible, 7);
        const ActuatorSet S = testsup::random_subset(seed ^ 0x11, sys.catalog_size(), true);
        rng::Generator gen(seed);
        const int T = 1 + gen.uniform_int(50);
        const GramianResult g = inverse_gramian(sys, S, T);
        const Matrix rec = inverse_gramian_recursion(sys, S, T, sys.QT());
        CHECK((g.X_full - rec).norm() <= 1e-9 * (1.0 + g.X_full.norm()));
        CHECK(min_eig(g.Xbar) >= -1e-9 * (1.0 + g.Xbar.norm()));
    }
}

TEST_CASE("Gramian is monotone in the stage count") {
    for (int trial = 0; trial < 10; ++trial) {
        const auto seed = static_cast<std::uint64_t>(2500 + trial);
        const NetworkSystem sys = testsup::random_system(seed, testsup::Regime::invertible, 6);
        const ActuatorSet S = testsup::random_subset(seed, sys.catalog_size(), false);
        Matrix prev;
        for (int T : {1, 3, 7, 15}) {
            const Matrix Xbar = inverse_gramian(sys, S, T).Xbar;
            if (prev.size() > 0) {
                CHECK(min_eig(Xbar - prev) >= -1e-10 * (1.0 + Xbar.norm()));
            }
            prev = Xbar;
        }
    }
}

TEST_CASE("duality with the vanishing-state-cost Riccati solution") {
    // With Q -> 0 the inverse finite-horizon cost matrix follows the Gramian
    // recursion, so X_full(T) - B B' reproduces P_0^{-1} up to the
    // inverse-transported input term, which dies off when every eigenvalue of
    // A is unstable.
    const int T = 60;
    for (int trial = 0; trial < 10; ++trial) {
        const auto seed = static_cast<std::uint64_t>(3100 + trial);
        const NetworkSystem base =
            testsup::random_system(seed, testsup::Regime::all_unstable, 5);
        const NetworkSystem sys =
            with_state_cost(base, 1e-10 * Matrix::Identity(base.n(), base.n()));
        const ActuatorSet S = testsup::random_subset(seed ^ 0x77, sys.catalog_size(), false);

        const Matrix P0 = riccati_recursion(sys, S, T).front();
        const Matrix P0_inv = P0.llt().solve(Matrix::Identity(sys.n(), sys.n()));
        const Matrix B = sys.input_matrix(S);
        const GramianResult g = inverse_gramian(sys, S, T);
        const Matrix reconstructed = g.X_full - B * B.transpose();
        CHECK((P0_inv - reconstructed).norm() <= 1e-5 * (1.0 + P0_inv.norm()));
    }
}

TEST_CASE("worst-case cost dominates the inverse Gramian floor") {
    for (int trial = 0; trial < 10; ++trial) {
        const auto seed = static_cast<std::uint64_t>(3300 + trial);
        const NetworkSystem base =
            testsup::random_system(seed, testsup::Regime::all_unstable, 5);
        const NetworkSystem sys =
            with_state_cost(base, 1e-10 * Matrix::Identity(base.n(), base.n()));
        const ActuatorSet S = testsup::random_subset(seed ^ 0x3, sys.catalog_size(), false);

        const GramianLimit limit = inverse_gramian_limit(sys, S, 1e-13);
        REQUIRE_FALSE(limit.capped);
        const double floor = 1.0 / Eigen::SelfAdjointEigenSolver<Matrix>(limit.Xbar,
                                                                         Eigen::EigenvaluesOnly)
                                       .eigenvalues()
                                       .minCoeff();
        const CostSolution sol = solve_are(sys, S);
        const double lambda_max =
            Eigen::SelfAdjointEigenSolver<Matrix>(sol.P, Eigen::EigenvaluesOnly)
                .eigenvalues()
                .maxCoeff();
        CHECK(lambda_max >= floor * (1.0 - 1e-6));
    }
}

TEST_CASE("Gramian minimum-eigenvalue bound") {
    SUBCASE("scalar bound matches the exact limit") {
        const GramianEigBound b = gramian_min_eig_bound(scalar_system(2.0), 1, 0.5);
        CHECK(b.n_bar == 1);
        CHECK(b.bound == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    }

    SUBCASE("repeated eigenvalue bound") {
        const Matrix I2 = Matrix::Identity(2, 2);
        std::vector<Vector> catalog{Vector::Unit(2, 0), Vector::Unit(2, 1)};
        const NetworkSystem sys(2.0 * I2, catalog, I2, I2, I2, I2, I2);
        const GramianEigBound b = gramian_min_eig_bound(sys, 1, 0.5);
        CHECK(b.n_bar == 2);
        CHECK(b.cond_V == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(b.bound == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }

    SUBCASE("bound dominates every singleton Gramian on a coupled system") {
        Matrix A(2, 2);
        A << 2, 0, 1, 1.5;
        const Matrix I2 = Matrix::Identity(2, 2);
        std::vector<Vector> catalog{Vector::Unit(2, 0), Vector::Unit(2, 1)};
        const NetworkSystem sys(A, catalog, I2, I2, I2, I2, I2);
        const GramianEigBound b = gramian_min_eig_bound(sys, 1, 1.0 / 1.5);
        for (int j = 0; j < 2; ++j) {
            const GramianLimit limit = inverse_gramian_limit(sys, ActuatorSet({j}), 1e-13);
            const double lmin =
                Eigen::SelfAdjointEigenSolver<Matrix>(limit.Xbar, Eigen::EigenvaluesOnly)
                    .eigenvalues()
                    .minCoeff();
            CHECK(lmin <= b.bound + 1e-9);
        }
    }

    SUBCASE("domain checks") {
        const NetworkSystem sys = scalar_system(2.0);
        CHECK_THROWS_AS(gramian_min_eig_bound(sys, 1, 0.2), Error);   // below 1/rho
        CHECK_THROWS_AS(gramian_min_eig_bound(sys, 1, 1.0), Error);   // not below 1
        CHECK_THROWS_AS(gramian_min_eig_bound(sys, 0, 0.5), Error);
    }

    SUBCASE("numerically defective dynamics are rejected") {
        const int n = 8;
        Matrix J = 1.5 * Matrix::Identity(n, n);
        for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = 1.0;
        std::vector<Vector> catalog{Vector::Ones(n)};
        const Matrix I = Matrix::Identity(n, n);
        const NetworkSystem sys(J, catalog, I, I, Matrix::Identity(1, 1), I, I);
        CHECK(sys.spectrum().cond_V >= 1e12);
        CHECK_THROWS_AS(gramian_min_eig_bound(sys, 1, 0.9), Error);
    }
}

TEST_CASE("min-eig bound holds exhaustively on random unstable systems") {
    for (int trial = 0; trial < 8; ++trial) {
        const auto seed = static_cast<std::uint64_t>(3600 + trial);
        const NetworkSystem sys = testsup::random_system(seed, testsup::Regime::all_unstable, 5);
        const double mu = 0.5 * (1.0 / sys.spectrum().spectral_radius() + 1.0);
        for (int k = 1; k <= sys.catalog_size(); ++k) {
            const GramianEigBound bound = gramian_min_eig_bound(sys, k, mu);
            // every k-subset, enumerated lexicographically
            std::vector<int> idx(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
            for (;;) {
                const GramianLimit limit = inverse_gramian_limit(sys, ActuatorSet(idx), 1e-13);
                const double lmin =
                    Eigen::SelfAdjointEigenSolver<Matrix>(limit.Xbar, Eigen::EigenvaluesOnly)
                        .eigenvalues()
                        .minCoeff();
                CHECK(lmin <= bound.bound + 1e-9);
                int pos = k - 1;
                while (pos >= 0 && idx[static_cast<std::size_t>(pos)] ==
                                       sys.catalog_size() - k + pos) {
                    --pos;
                }
                if (pos < 0) break;
                ++idx[static_cast<std::size_t>(pos)];
                for (int i = pos + 1; i < k; ++i) {
                    idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
                }
            }
        }
    }
}
