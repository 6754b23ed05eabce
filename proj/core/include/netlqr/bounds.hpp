#pragma once

#include "netlqr/system.hpp"
#include "netlqr/types.hpp"

#include <optional>
#include <vector>

namespace netlqr {

struct EtaCandidate {
    double eta = 0.0;
    int n_bar = 0;
    double bound = 0.0;
};

/// Lower bound on lambda_max(P) for Schur-unstable dynamics, with the full
/// candidate table it was maximized over.
struct UnstableBoundReport {
    double bound = 0.0;
    double eta = 0.0;
    int n_bar = 0;
    double cond_V = 0.0;
    int k = 0;
    double lambda_max_magnitude = 0.0;
    std::vector<EtaCandidate> per_eta;
    /// (A, Q^{1/2}) detectability hypothesis. When false the bound value is
    /// still reported but the hypotheses are unmet.
    bool detectable = true;
};

/// Evaluates cond^{-2}(V) * (eta^2-1)/eta^2 * eta^{2(n_bar/k - 1)} over a
/// candidate grid (the unstable eigenvalue magnitudes plus 20 geometric
/// intermediates in (1, |lambda_max|]) and reports the maximum. Every
/// stabilizable k-subset has lambda_max(P) at or above the reported value.
UnstableBoundReport unstable_lower_bound(const NetworkSystem& sys, int k);

/// Symmetric-network specialization: max of the full-actuation term
/// (lmax^2-1)/lmax^2 and the generic bound at eta = smallest unstable
/// magnitude with cond(V) = 1.
UnstableBoundReport symmetric_unstable_bound(const NetworkSystem& sys, int k);

struct StabilityTransform {
    Matrix T;
    double alpha = 0.0;    // sigma_1^2(T) / (sigma_n^2(T) (1 - sigma_1^2(TAT^{-1})))
    double sigma1_D = 0.0; // sigma_1(T A T^{-1}) < 1
    bool normal = false;   // T = I was used
};

/// Similarity transform certifying Schur stability: T is the symmetric square
/// root of the solution M of M = A^T M A + I, which gives
/// sigma_1(TAT^{-1})^2 = 1 - 1/lambda_max(M) < 1. Normal matrices use T = I.
StabilityTransform stability_transform(const Matrix& A);

/// Actuator influence matrix R(S) = B_S R_S^{-1} B_S^T.
Matrix actuator_influence(const NetworkSystem& sys, const ActuatorSet& S);

struct StableBoundReport {
    double alpha = 0.0;
    Matrix T_transform;
    double sigma1_D = 0.0;
    double lambda1_max = 0.0;
    bool lambda1_max_exact = true;  // false: upper-bounded by the full catalog
    double bound = 0.0;
    std::optional<double> simple_bound;  // 1/(1 - lambda_1^2(A)) when A is normal
    int k = 0;
};

/// Upper bound on the worst/best k-subset cost-trace ratio for stable
/// dynamics and Q > 0. lambda_1^max over influence matrices is exact by
/// enumeration up to 1e5 subsets, otherwise replaced by the full-catalog
/// value (the bound is monotone increasing in it, so it stays valid).
StableBoundReport stable_ratio_bound(const NetworkSystem& sys, int k);

struct EmpiricalRatio {
    double ratio = 1.0;  // tr(P_worst) / tr(P_opt) over k-subsets
    bool exhaustive = true;  // false: greedy/anti-greedy inner estimate
    ActuatorSet best;
    ActuatorSet worst;
    double trace_best = 0.0;
    double trace_worst = 0.0;
};

/// Exact ratio by exhaustive enumeration when C(M, k) <= 1e5; otherwise a
/// greedy/anti-greedy inner estimate flagged non-exhaustive.
EmpiricalRatio empirical_ratio(const NetworkSystem& sys, int k);

}  // namespace netlqr
