#include "netlqr/gramian.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>

namespace netlqr {

namespace {

Eigen::PartialPivLU<Matrix> dynamics_lu(const NetworkSystem& sys) {
    if (!sys.dynamics_invertible()) {
        throw Error(Errc::singular_dynamics,
                    "inverse-dynamics Gramian requires invertible A (margin " +
                        std::to_string(sys.invertibility_margin()) + ")");
    }
    return Eigen::PartialPivLU<Matrix>(sys.A());
}

Matrix spd_inverse(const Matrix& M, const char* name) {
    Eigen::LLT<Matrix> llt(0.5 * (M + M.transpose()));
    if (llt.info() != Eigen::Success) {
        throw Error(Errc::not_positive_definite, std::string(name) + " must be positive definite");
    }
    return llt.solve(Matrix::Identity(M.rows(), M.cols()));
}

// X <- A^{-1} X A^{-T} for symmetric X, via two LU solves.
Matrix inverse_sandwich(const Eigen::PartialPivLU<Matrix>& lu, const Matrix& X) {
    const Matrix Y = lu.solve(X);
    return lu.solve(Y.transpose()).transpose();
}

}  // namespace

GramianResult inverse_gramian(const NetworkSystem& sys, const ActuatorSet& S, int T,
                              const Matrix& QT) {
    if (T < 1) throw Error(Errc::invalid_argument, "inverse_gramian: T must be >= 1");
    sys.validate_subset(S);
    const auto lu = dynamics_lu(sys);
    const Eigen::Index n = sys.n();

    GramianResult out;
    out.T = T;
    out.Xbar = Matrix::Zero(n, n);
    Matrix C = sys.input_matrix(S);  // (A^{-1})^tau B_S, accumulated column block
    for (int tau = 0; tau < T; ++tau) {
        if (C.cols() > 0) out.Xbar.noalias() += C * C.transpose();
        C = lu.solve(C);
    }
    out.Xbar = 0.5 * (out.Xbar + out.Xbar.transpose());

    Matrix Z = spd_inverse(QT, "QT");
    for (int tau = 0; tau < T; ++tau) Z = inverse_sandwich(lu, Z);
    out.X_full = out.Xbar + 0.5 * (Z + Z.transpose());
    return out;
}

GramianResult inverse_gramian(const NetworkSystem& sys, const ActuatorSet& S, int T) {
    return inverse_gramian(sys, S, T, sys.QT());
}

Matrix inverse_gramian_recursion(const NetworkSystem& sys, const ActuatorSet& S, int T,
                                 const Matrix& QT) {
    if (T < 1) throw Error(Errc::invalid_argument, "inverse_gramian_recursion: T must be >= 1");
    sys.validate_subset(S);
    const auto lu = dynamics_lu(sys);
    const Matrix B = sys.input_matrix(S);
    Matrix BBt = Matrix::Zero(sys.n(), sys.n());
    if (!S.empty()) BBt = B * B.transpose();

    Matrix X = spd_inverse(QT, "QT");
    for (int tau = 0; tau < T; ++tau) {
        X = inverse_sandwich(lu, X) + BBt;
        X = 0.5 * (X + X.transpose());
    }
    return X;
}

GramianLimit inverse_gramian_limit(const NetworkSystem& sys, const ActuatorSet& S, double tol,
                                   int max_stages) {
    sys.validate_subset(S);
    const auto lu = dynamics_lu(sys);
    const Eigen::Index n = sys.n();

    GramianLimit out;
    out.Xbar = Matrix::Zero(n, n);
    Matrix C = sys.input_matrix(S);
    if (C.cols() == 0) return out;

    for (int tau = 0; tau < max_stages; ++tau) {
        const Matrix term = C * C.transpose();
        out.Xbar.noalias() += term;
        out.stages = tau + 1;
        if (term.norm() <= tol * std::max(1.0, out.Xbar.norm())) {
            out.Xbar = 0.5 * (out.Xbar + out.Xbar.transpose());
            return out;
        }
        C = lu.solve(C);
    }
    out.capped = true;
    out.Xbar = 0.5 * (out.Xbar + out.Xbar.transpose());
    return out;
}

GramianEigBound gramian_min_eig_bound(const NetworkSystem& sys, int k, double mu) {
    if (k < 1) throw Error(Errc::invalid_argument, "gramian_min_eig_bound: k must be >= 1");
    if (!sys.dynamics_invertible()) {
        throw Error(Errc::singular_dynamics, "gramian_min_eig_bound: A must be invertible");
    }
    const Spectrum& spec = sys.spectrum();
    if (spec.cond_V >= 1e12) {
        throw Error(Errc::defective, "gramian_min_eig_bound: A is numerically defective");
    }
    // Eigenvalues of A^{-1} are the reciprocals of those of A, so
    // |lambda_min(A^{-1})| = 1/spectral_radius(A).
    const double mu_low = 1.0 / spec.spectral_radius();
    if (mu < mu_low - 1e-12 || mu >= 1.0) {
        throw Error(Errc::domain, "gramian_min_eig_bound: mu must lie in [1/rho(A), 1)");
    }

    GramianEigBound out;
    out.mu = mu;
    out.cond_V = spec.cond_V;
    // #{ |lambda(A^{-1})| <= mu } = #{ |lambda(A)| >= 1/mu }.
    out.n_bar = spec.count_at_least(1.0 / mu);
    out.bound = spec.cond_V * spec.cond_V *
                std::pow(mu, 2.0 * (static_cast<double>(out.n_bar) / k - 1.0)) /
                (1.0 - mu * mu);
    return out;
}

}  // namespace netlqr
