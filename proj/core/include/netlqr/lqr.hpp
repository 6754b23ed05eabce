#pragma once

#include "netlqr/system.hpp"
#include "netlqr/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace netlqr {

/// Optimal cost matrix with solver diagnostics. `horizon` is empty for the
/// infinite-horizon solution. When `converged` is false the solver hit its
/// iteration cap (marginal uncontrolled modes or an over-tight tolerance) and
/// P holds the last iterate.
struct CostSolution {
    Matrix P;
    std::optional<int> horizon;
    long iterations = 0;
    double residual = 0.0;  // relative Frobenius Riccati residual
    bool converged = true;
    std::string method;
};

struct CostFunctionals {
    double lambda_max = 0.0;  // worst-case cost over unit initial states
    double trace = 0.0;
    double average = 0.0;  // tr(P X0)
};

/// Stacked least-squares pieces of the open-loop cost. G and H carry the
/// stage weighting (Q^{1/2} blocks, QT^{1/2} for the terminal block); Bdiag
/// is the block diagonal of B_S R_S^{-1/2}.
struct BatchMatrices {
    Matrix G;      // (T+1)n x n
    Matrix H;      // (T+1)n x Tn
    Matrix Bdiag;  // Tn x T|S|
};

/// Backward dynamic-programming recursion from P_T = QT; returns
/// [P_0, ..., P_T]. With S empty each step reduces to P <- Q + A^T P A.
std::vector<Matrix> riccati_recursion(const NetworkSystem& sys, const ActuatorSet& S, int T);

enum class AreMethod {
    automatic,    // doubling, falling back to fixed-point if it stalls
    fixed_point,  // plain backward iteration from QT (the reference path)
    doubling,     // structure-preserving doubling
};

struct AreOptions {
    double tol = 1e-11;  // relative Frobenius residual target
    long max_iter = 1000000;
    AreMethod method = AreMethod::automatic;
};

/// Infinite-horizon cost matrix: the stabilizing fixed point of the Riccati
/// map. Throws Errc::not_stabilizable when an eigenvalue with |lambda| > 1 is
/// uncontrollable from B_S (the optimal cost is infinite). Marginal
/// uncontrolled modes are not rejected up front; they surface as
/// converged == false with the last iterate.
CostSolution solve_are(const NetworkSystem& sys, const ActuatorSet& S, const AreOptions& opts = {});
CostSolution solve_are(const NetworkSystem& sys, const ActuatorSet& S, double tol, long max_iter);

/// P = A^T P A + Q for Schur-stable A, by doubling. Throws Errc::unstable if
/// the spectral radius is >= 1 - 1e-12. Does not require A invertible.
Matrix solve_lyapunov(const Matrix& A, const Matrix& Q);

BatchMatrices batch_matrices(const NetworkSystem& sys, const ActuatorSet& S, int T);

/// P_0 = G^T (I + H Bdiag Bdiag^T H^T)^{-1} G. Agrees with the recursion's
/// P_0 to roundoff; restricted to T*n <= 5000 for memory.
CostSolution batch_cost_matrix(const NetworkSystem& sys, const ActuatorSet& S, int T);

CostFunctionals cost_functionals(const Matrix& P, const Matrix& X0);

/// Finite-horizon stochastic cost x0^T P_0 x0 + sum_{t=1..T} tr(P_t W).
double lqg_cost(const NetworkSystem& sys, const ActuatorSet& S, int T, const Vector& x0);

/// Steady-state average stage cost tr(P W).
double lqg_steady_state(const NetworkSystem& sys, const ActuatorSet& S);

/// Optimal state feedback u = -K x for a given cost matrix:
/// K = (R_S + B_S^T P B_S)^{-1} B_S^T P A.
Matrix optimal_gain(const NetworkSystem& sys, const ActuatorSet& S, const Matrix& P);

struct SimulationResult {
    double average_cost = 0.0;
    double std_error = 0.0;  // batch-means standard error of the average
    long samples = 0;
};

/// Closed-loop run under the optimal gain from x0 = 0 with w_t ~ N(0, W)
/// drawn deterministically from `seed`; averages the stage cost over
/// t in [burn_in, T_sim). The average converges to tr(P W).
SimulationResult simulate_closed_loop(const NetworkSystem& sys, const ActuatorSet& S, long T_sim,
                                      long burn_in, std::uint64_t seed);

}  // namespace netlqr
