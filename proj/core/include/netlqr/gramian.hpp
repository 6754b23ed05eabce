#pragma once

#include "netlqr/system.hpp"
#include "netlqr/types.hpp"

namespace netlqr {

/// T-stage controllability Gramian of the inverse dynamics (A^{-1}, B_S).
/// Xbar = sum_{tau=0..T-1} (A^{-1})^tau B_S B_S^T (A^{-T})^tau; X_full adds
/// the inverse-transported terminal term (A^{-1})^T QT^{-1} (A^{-T})^T.
struct GramianResult {
    Matrix Xbar;
    Matrix X_full;
    int T = 0;
};

/// Closed-form evaluation (accumulated powers). Requires invertible dynamics;
/// throws Errc::singular_dynamics below the 1e-12 margin. R_S = I is assumed:
/// non-identity input costs fold into the catalog columns.
GramianResult inverse_gramian(const NetworkSystem& sys, const ActuatorSet& S, int T,
                              const Matrix& QT);
GramianResult inverse_gramian(const NetworkSystem& sys, const ActuatorSet& S, int T);

/// Same X_full through the one-step recursion
/// X_{tau+1} = A^{-1} X_tau A^{-T} + B_S B_S^T seeded with QT^{-1}; equals the
/// closed form to roundoff and is the cross-check route for it.
Matrix inverse_gramian_recursion(const NetworkSystem& sys, const ActuatorSet& S, int T,
                                 const Matrix& QT);

struct GramianLimit {
    Matrix Xbar;
    int stages = 0;
    bool capped = false;  // stage cap hit before the increment fell below tol
};

/// Runs the Gramian sum until the increment norm falls below `tol` (capped at
/// `max_stages`). Converges when every eigenvalue of A is unstable.
GramianLimit inverse_gramian_limit(const NetworkSystem& sys, const ActuatorSet& S,
                                   double tol = 1e-12, int max_stages = 100000);

struct GramianEigBound {
    double bound = 0.0;
    int n_bar = 0;
    double cond_V = 0.0;
    double mu = 0.0;
};

/// Upper bound on lambda_min of the inverse-dynamics Gramian for any
/// k-element subset: cond^2(V) * mu^{2(n_bar/k - 1)} / (1 - mu^2) with
/// n_bar = #{ lambda in spec(A^{-1}) : |lambda| <= mu }. Valid for
/// mu in [|lambda_min(A^{-1})|, 1); requires diagonalizable A.
GramianEigBound gramian_min_eig_bound(const NetworkSystem& sys, int k, double mu);

}  // namespace netlqr
