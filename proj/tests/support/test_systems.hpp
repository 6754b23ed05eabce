#pragma once

// Seeded random test systems shared by the unit and acceptance suites.

#include "netlqr/rng.hpp"
#include "netlqr/system.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

namespace testsup {

enum class Regime {
    stable,        // spectral radius <= 0.93
    unstable,      // at least one |lambda| > 1.05, rest mixed
    all_unstable,  // every |lambda| >= 1.15
    invertible,    // |lambda| in [0.5, 2.0], mixed stability
};

struct SystemOptions {
    Regime regime = Regime::stable;
    int n_min = 2;
    int n_max = 8;
    bool symmetric = false;
    bool random_spd_q = false;  // otherwise Q = I
    double complex_pair_prob = 0.35;
};

inline netlqr::Matrix random_well_conditioned(netlqr::rng::Generator& gen, int n,
                                              double max_cond = 25.0) {
    for (;;) {
        netlqr::Matrix V(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) V(i, j) = gen.normal();
        }
        Eigen::JacobiSVD<netlqr::Matrix> svd(V);
        const double cond =
            svd.singularValues().maxCoeff() / svd.singularValues().minCoeff();
        if (cond < max_cond) return V;
    }
}

inline double draw_magnitude(netlqr::rng::Generator& gen, Regime regime, bool force_unstable) {
    switch (regime) {
        case Regime::stable:
            return 0.2 + 0.73 * gen.uniform();
        case Regime::unstable:
            if (force_unstable) return 1.05 + 1.15 * gen.uniform();
            return 0.2 + 2.0 * gen.uniform();
        case Regime::all_unstable:
            return 1.15 + 1.05 * gen.uniform();
        case Regime::invertible:
            return 0.5 + 1.5 * gen.uniform();
    }
    return 0.5;
}

/// Diagonalizable random system with identity catalog: A = V L V^{-1} where L
/// is block diagonal (real eigenvalues and 2x2 rotation blocks for complex
/// pairs) and V has bounded condition number.
inline netlqr::NetworkSystem random_system(std::uint64_t seed, const SystemOptions& opts) {
    using netlqr::Matrix;
    using netlqr::Vector;
    netlqr::rng::Generator gen(seed);
    const int n = opts.n_min + gen.uniform_int(opts.n_max - opts.n_min + 1);

    Matrix A;
    if (opts.symmetric) {
        Matrix G(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) G(i, j) = gen.normal();
        }
        const Eigen::HouseholderQR<Matrix> qr(G);
        const Matrix Qo = qr.householderQ();
        Vector d(n);
        for (int i = 0; i < n; ++i) {
            const double mag = draw_magnitude(gen, opts.regime, i == 0);
            d[i] = (gen.uniform() < 0.5 ? -1.0 : 1.0) * mag;
        }
        A = Qo * d.asDiagonal() * Qo.transpose();
        A = 0.5 * (A + A.transpose());
    } else {
        Matrix L = Matrix::Zero(n, n);
        int i = 0;
        bool first = true;
        while (i < n) {
            const double mag = draw_magnitude(gen, opts.regime, first);
            first = false;
            const bool pair = (i + 1 < n) && gen.uniform() < opts.complex_pair_prob;
            if (pair) {
                const double theta = 0.2 + 2.7 * gen.uniform();
                L(i, i) = mag * std::cos(theta);
                L(i, i + 1) = mag * std::sin(theta);
                L(i + 1, i) = -mag * std::sin(theta);
                L(i + 1, i + 1) = mag * std::cos(theta);
                i += 2;
            } else {
                L(i, i) = (gen.uniform() < 0.5 ? -1.0 : 1.0) * mag;
                ++i;
            }
        }
        const Matrix V = random_well_conditioned(gen, n);
        A = V * L * V.partialPivLu().solve(Matrix::Identity(n, n));
    }

    Matrix Q = Matrix::Identity(n, n);
    if (opts.random_spd_q) {
        Matrix G(n, n);
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) G(r, c) = gen.normal();
        }
        Q = G * G.transpose() / n + 0.3 * Matrix::Identity(n, n);
        Q = 0.5 * (Q + Q.transpose());
    }

    std::vector<Vector> catalog;
    for (int c = 0; c < n; ++c) catalog.push_back(Vector::Unit(n, c));
    const Matrix I = Matrix::Identity(n, n);
    return netlqr::NetworkSystem(A, catalog, Q, I, I, I, I);
}

inline netlqr::NetworkSystem random_system(std::uint64_t seed, Regime regime, int n_max = 8) {
    SystemOptions opts;
    opts.regime = regime;
    opts.n_max = n_max;
    return random_system(seed, opts);
}

/// Random subset of the catalog; may be empty when allow_empty is set.
inline netlqr::ActuatorSet random_subset(std::uint64_t seed, int catalog_size, bool allow_empty) {
    netlqr::rng::Generator gen(seed);
    const int low = allow_empty ? 0 : 1;
    const int k = low + gen.uniform_int(catalog_size - low + 1);
    return netlqr::ActuatorSet(gen.sample_without_replacement(catalog_size, k));
}

}  // namespace testsup
