#include "netlqr/gramian.hpp"
#include "netlqr/system.hpp"

#include "support/test_systems.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace netlqr;

TEST_CASE("path system construction") {
    SUBCASE("n=3 rho=3 gives the unscaled tridiagonal of ones") {
        const NetworkSystem sys = build_path_system(3, 3.0);
        Matrix expected(3, 3);
        expected << 1, 1, 0, 1, 1, 1, 0, 1, 1;
        CHECK((sys.A() - expected).norm() == 0.0);
        CHECK(sys.catalog_size() == 3);
        CHECK(sys.Q() == Matrix::Identity(3, 3));
        CHECK(sys.R_full() == Matrix::Identity(3, 3));
    }

    SUBCASE("n=3 rho=0.9 is stable with radius 0.3(1+sqrt 2)") {
        const NetworkSystem sys = build_path_system(3, 0.9);
        CHECK(sys.spectrum().spectral_radius() ==
              doctest::Approx(0.3 * (1.0 + std::sqrt(2.0))).epsilon(1e-12));
    }

    SUBCASE("rejects n < 2 and rho <= 0") {
        CHECK_THROWS_AS(build_path_system(1, 1.0), Error);
        CHECK_THROWS_AS(build_path_system(3, 0.0), Error);
        CHECK_THROWS_AS(build_path_system(3, -1.0), Error);
    }

    SUBCASE("singular tridiagonals construct with a flagged margin") {
        // The tridiagonal of ones is exactly singular whenever n+1 is a
        // multiple of 3 (a zero eigenvalue at 1 + 2 cos(2 pi / 3)), for every
        // rho. Those systems stay usable for cost solves; only the
        // inverse-dynamics operations reject them.
        for (int n : {2, 5, 50}) {
            const NetworkSystem sys = build_path_system(n, 3.0);
            CHECK_FALSE(sys.dynamics_invertible());
            CHECK(sys.invertibility_margin() < 1e-12);
            CHECK_THROWS_AS(inverse_gramian(sys, ActuatorSet({0}), 3), Error);
        }
        CHECK(build_path_system(4, 3.0).dynamics_invertible());
        CHECK(build_path_system(100, 3.0).dynamics_invertible());
    }

    SUBCASE("symmetric with orthonormal eigenvectors for random (n, rho)") {
        rng::Generator gen(41);
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 3 + gen.uniform_int(30);
            const double rho = 0.2 + 2.5 * gen.uniform();
            const NetworkSystem sys = build_path_system(n, rho);
            CHECK(is_symmetric(sys.A(), 0.0));
            CHECK(sys.spectrum().cond_V == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("Erdos-Renyi system construction") {
    SUBCASE("deterministic in the seed") {
        const NetworkSystem a = build_er_system(40, 0.15, 99, 1.0);
        const NetworkSystem b = build_er_system(40, 0.15, 99, 1.0);
        CHECK(a.A() == b.A());
    }

    SUBCASE("marginal scaling lands the radius on 1") {
        const NetworkSystem sys = build_er_system(100, 0.1, 7, 1.0);
        CHECK(sys.spectrum().spectral_radius() == doctest::Approx(1.0).epsilon(1e-10));
    }

    SUBCASE("unscaled adjacency is 0/1 symmetric with zero diagonal") {
        const NetworkSystem sys = build_er_system(30, 0.2, 5);
        const Matrix& A = sys.A();
        CHECK(is_symmetric(A, 0.0));
        CHECK(A.diagonal().cwiseAbs().maxCoeff() == 0.0);
        for (int i = 0; i < 30; ++i) {
            for (int j = 0; j < 30; ++j) {
                CHECK((A(i, j) == 0.0 || A(i, j) == 1.0));
            }
        }
    }

    SUBCASE("p close to 1 yields the complete graph spectrum") {
        // K_4 adjacency has eigenvalues {3, -1, -1, -1}; scaled radius 1.
        const NetworkSystem sys = build_er_system(4, 0.999, 12345, 1.0);
        const Matrix expected =
            (Matrix::Ones(4, 4) - Matrix::Identity(4, 4)) / 3.0;
        CHECK((sys.A() - expected).norm() < 1e-15);
    }

    SUBCASE("degenerate ensembles fail after bounded retries") {
        CHECK_THROWS_WITH_AS(build_er_system(6, 0.001, 3, 1.0),
                             doctest::Contains("degenerate ensemble"), Error);
        CHECK_THROWS_AS(build_er_system(10, 1.5, 0), Error);
        CHECK_THROWS_AS(build_er_system(10, 0.0, 0), Error);
    }
}

TEST_CASE("spectral_scale") {
    SUBCASE("diagonal example") {
        Matrix A(2, 2);
        A << 2, 0, 0, 0.5;
        const Matrix scaled = spectral_scale(A, 1.0);
        CHECK(scaled(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(scaled(1, 1) == doctest::Approx(0.25).epsilon(1e-14));
    }

    SUBCASE("scaling to the current radius is the identity") {
        const NetworkSystem sys = build_path_system(3, 3.0);
        const double radius = sys.spectrum().spectral_radius();
        CHECK((spectral_scale(sys.A(), radius) - sys.A()).norm() <= 1e-12 * sys.A().norm());
    }

    SUBCASE("idempotent under repeated application") {
        rng::Generator gen(17);
        for (int trial = 0; trial < 20; ++trial) {
            const NetworkSystem sys =
                testsup::random_system(1000 + static_cast<std::uint64_t>(trial),
                                       testsup::Regime::invertible);
            const Matrix once = spectral_scale(sys.A(), 1.3);
            const Matrix twice = spectral_scale(once, 1.3);
            CHECK((twice - once).norm() <= 1e-12 * once.norm());
        }
    }

    SUBCASE("rejects zero and nilpotent matrices") {
        CHECK_THROWS_AS(spectral_scale(Matrix::Zero(3, 3), 1.0), Error);
        Matrix N = Matrix::Zero(2, 2);
        N(0, 1) = 5.0;
        CHECK_THROWS_AS(spectral_scale(N, 1.0), Error);
    }
}

TEST_CASE("validate_system diagnostics") {
    auto unit_catalog = [](int n) {
        std::vector<Vector> catalog;
        for (int i = 0; i < n; ++i) catalog.push_back(Vector::Unit(n, i));
        return catalog;
    };
    const Matrix I2 = Matrix::Identity(2, 2);

    SUBCASE("coupled unstable chain is stabilizable from the first node") {
        Matrix A(2, 2);
        A << 2, 0, 1, 1.5;
        const NetworkSystem sys(A, unit_catalog(2), I2, I2, I2, I2, I2);
        const SystemDiagnostics d = validate_system(sys, ActuatorSet({0}));
        CHECK(d.stabilizable);
        CHECK(d.detectable);
        CHECK_FALSE(d.schur_stable);
    }

    SUBCASE("decoupled unstable mode is not stabilizable") {
        Matrix A(2, 2);
        A << 2, 0, 0, 1.5;
        const NetworkSystem sys(A, unit_catalog(2), I2, I2, I2, I2, I2);
        CHECK_FALSE(validate_system(sys, ActuatorSet({0})).stabilizable);
        CHECK(validate_system(sys, ActuatorSet({0, 1})).stabilizable);
    }

    SUBCASE("repeated unstable eigenvalue with a single shared input") {
        // diag(2, 2) driven through (1, 1): the (1, -1) mode is invisible to
        // the input even though no single eigenvector is orthogonal to it.
        Matrix A = 2.0 * I2;
        std::vector<Vector> catalog{Vector::Ones(2)};
        const NetworkSystem sys(A, catalog, I2, I2, Matrix::Identity(1, 1), I2, I2);
        CHECK_FALSE(validate_system(sys, ActuatorSet({0})).stabilizable);
    }

    SUBCASE("stable system with no actuation") {
        const NetworkSystem sys(0.5 * I2, unit_catalog(2), I2, I2, I2, I2, I2);
        const SystemDiagnostics d = validate_system(sys, ActuatorSet::none());
        CHECK(d.detectable);
        CHECK(d.schur_stable);
        CHECK(d.stabilizable);
        CHECK(d.diagonalizable);
    }

    SUBCASE("stable flag tracks the spectral radius on generated systems") {
        for (int trial = 0; trial < 25; ++trial) {
            const auto seed = static_cast<std::uint64_t>(5000 + trial);
            const NetworkSystem sys = testsup::random_system(
                seed, trial % 2 ? testsup::Regime::stable : testsup::Regime::invertible);
            const SystemDiagnostics d = validate_system(sys, ActuatorSet::none());
            CHECK(d.schur_stable == (sys.spectrum().spectral_radius() < 1.0 - 1e-12));
        }
    }
}

TEST_CASE("NetworkSystem validation") {
    const Matrix I2 = Matrix::Identity(2, 2);
    std::vector<Vector> catalog{Vector::Unit(2, 0), Vector::Unit(2, 1)};

    SUBCASE("rejects asymmetric Q") {
        Matrix Q(2, 2);
        Q << 1, 0.5, 0, 1;
        CHECK_THROWS_AS(NetworkSystem(I2 * 0.5, catalog, Q, I2, I2, I2, I2), Error);
    }

    SUBCASE("rejects indefinite Q and non-PD terminal cost") {
        Matrix Q = -I2;
        CHECK_THROWS_AS(NetworkSystem(0.5 * I2, catalog, Q, I2, I2, I2, I2), Error);
        CHECK_THROWS_AS(NetworkSystem(0.5 * I2, catalog, I2, Matrix::Zero(2, 2), I2, I2, I2),
                        Error);
        CHECK_THROWS_AS(NetworkSystem(0.5 * I2, catalog, I2, I2, Matrix::Zero(2, 2), I2, I2),
                        Error);
    }

    SUBCASE("rejects catalog dimension mismatch and empty catalog") {
        std::vector<Vector> bad{Vector::Unit(3, 0)};
        CHECK_THROWS_AS(
            NetworkSystem(0.5 * I2, bad, I2, I2, Matrix::Identity(1, 1), I2, I2), Error);
        CHECK_THROWS_AS(NetworkSystem(0.5 * I2, {}, I2, I2, Matrix(0, 0), I2, I2), Error);
    }

    SUBCASE("actuator sets validate strict ordering") {
        CHECK_THROWS_AS(ActuatorSet({1, 1}), Error);
        CHECK_THROWS_AS(ActuatorSet({2, 1}), Error);
        CHECK_THROWS_AS(ActuatorSet({-1}), Error);
        CHECK(ActuatorSet::from_unsorted({3, 0, 2}).indices() == std::vector<int>{0, 2, 3});
        CHECK(ActuatorSet::none().empty());
    }
}

TEST_CASE("system JSON round trip") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "netlqr_sys_roundtrip.json";

    SUBCASE("identity-shaped system uses identity literals") {
        const NetworkSystem sys = build_path_system(4, 0.9);
        const std::string text = system_to_json(sys);
        CHECK(text.find("\"identity\"") != std::string::npos);
        const NetworkSystem back = system_from_json(text);
        CHECK((back.A() - sys.A()).norm() == 0.0);
        CHECK(back.catalog_size() == sys.catalog_size());
        CHECK(back.Q() == sys.Q());
    }

    SUBCASE("general matrices survive save/load exactly") {
        const NetworkSystem sys =
            testsup::random_system(77, [] {
                testsup::SystemOptions o;
                o.regime = testsup::Regime::stable;
                o.random_spd_q = true;
                return o;
            }());
        save_system(sys, path.string());
        const NetworkSystem back = load_system(path.string());
        CHECK((back.A() - sys.A()).norm() == 0.0);
        CHECK((back.Q() - sys.Q()).norm() == 0.0);
        fs::remove(path);
    }

    SUBCASE("malformed documents are rejected") {
        CHECK_THROWS_AS(system_from_json("{"), Error);
        CHECK_THROWS_AS(system_from_json("{\"n\": 2}"), Error);
        CHECK_THROWS_AS(system_from_json("{\"n\": 2, \"A\": [1, 0, 0]}"), Error);
        CHECK_THROWS_AS(load_system("/nonexistent/netlqr.json"), Error);
    }
}
