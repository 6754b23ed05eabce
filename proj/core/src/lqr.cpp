#include "netlqr/lqr.hpp"

#include "netlqr/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>

namespace netlqr {

namespace {

Matrix symmetrized(const Matrix& M) { return 0.5 * (M + M.transpose()); }

// One backward step of the cost recursion:
// Q + A^T P A - A^T P B (R + B^T P B)^{-1} B^T P A.
// The inner inverse goes through an LDLT of the symmetric positive definite
// R + B^T P B rather than an explicit inverse.
Matrix riccati_step(const Matrix& P, const Matrix& A, const Matrix& B, const Matrix& Q,
                    const Matrix& R) {
    if (B.cols() == 0) {
        return symmetrized(Q + A.transpose() * P * A);
    }
    const Matrix PB = P * B;
    const Matrix inner = symmetrized(R + B.transpose() * PB);
    Eigen::LDLT<Matrix> ldlt(inner);
    const Matrix K = ldlt.solve(PB.transpose() * A);  // (R + B^T P B)^{-1} B^T P A
    return symmetrized(Q + A.transpose() * (P * A) - (A.transpose() * PB) * K);
}

double relative_diff(const Matrix& next, const Matrix& prev) {
    return (next - prev).norm() / std::max(1.0, next.norm());
}

struct IterationOutcome {
    Matrix P;
    long iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

// Plain value iteration from P = QT. The step residual ||F(P_k) - P_k|| is
// exactly the Riccati residual at P_k, so convergence is measured on it
// directly.
IterationOutcome fixed_point_iteration(const Matrix& A, const Matrix& B, const Matrix& Q,
                                       const Matrix& R, const Matrix& QT, double tol,
                                       long max_iter) {
    IterationOutcome out;
    Matrix P = symmetrized(QT);
    for (long iter = 1; iter <= max_iter; ++iter) {
        Matrix next = riccati_step(P, A, B, Q, R);
        const double residual = relative_diff(next, P);
        P = std::move(next);
        out.iterations = iter;
        out.residual = residual;
        if (residual <= tol) {
            out.converged = true;
            break;
        }
        if (!P.allFinite()) break;
    }
    out.P = std::move(P);
    return out;
}

// Structure-preserving doubling. Each pass squares the convergence exponent,
// so marginally damped closed loops that would take 1e5 plain iterations
// finish in a few dozen. H_k converges to the stabilizing solution.
IterationOutcome doubling_iteration(const Matrix& A, const Matrix& B, const Matrix& Q,
                                    const Matrix& R, double tol, long max_iter) {
    IterationOutcome out;
    const Eigen::Index n = A.rows();

    Matrix A_k = A;
    Matrix G_k;
    if (B.cols() == 0) {
        G_k = Matrix::Zero(n, n);
    } else {
        Eigen::LDLT<Matrix> rldlt(symmetrized(R));
        G_k = symmetrized(B * rldlt.solve(B.transpose()));
    }
    Matrix H_k = symmetrized(Q);

    const long cap = std::min<long>(max_iter, 200);
    for (long iter = 1; iter <= cap; ++iter) {
        const Matrix W = Matrix::Identity(n, n) + G_k * H_k;
        Eigen::PartialPivLU<Matrix> lu(W);
        const Matrix V1 = lu.solve(A_k);
        const Matrix V2 = lu.solve(G_k.transpose()).transpose();

        Matrix H_next = symmetrized(H_k + V1.transpose() * (H_k * A_k));
        G_k = symmetrized(G_k + A_k * V2 * A_k.transpose());
        A_k = A_k * V1;

        out.iterations = iter;
        const double step = relative_diff(H_next, H_k);
        H_k = std::move(H_next);
        if (!H_k.allFinite() || H_k.norm() > 1e250) {
            out.P = std::move(H_k);
            return out;
        }
        if (step <= 0.1 * tol) break;
    }

    // Verify against the fixed-point map itself; the doubling recurrences
    // stopping is not a residual certificate on its own.
    const Matrix check = riccati_step(H_k, A, B, Q, R);
    out.residual = relative_diff(check, H_k);
    out.converged = out.residual <= tol;
    out.P = symmetrized(check);
    return out;
}

void check_stabilizable(const NetworkSystem& sys, const ActuatorSet& S) {
    // Strictly unstable modes must be controllable or the optimal cost is
    // infinite. Marginal modes are left to the solver so that it can report
    // a flagged last iterate instead of refusing outright.
    if (!is_stabilizable(sys.A(), sys.input_matrix(S), 1.0 + 1e-9)) {
        throw Error(Errc::not_stabilizable,
                    "solve_are: an unstable mode is uncontrollable from B_S; optimal cost is "
                    "infinite for subset " +
                        S.to_string());
    }
}

}  // namespace

std::vector<Matrix> riccati_recursion(const NetworkSystem& sys, const ActuatorSet& S, int T) {
    if (T < 1) throw Error(Errc::invalid_argument, "riccati_recursion: T must be >= 1");
    sys.validate_subset(S);
    const Matrix B = sys.input_matrix(S);
    const Matrix R = sys.input_cost(S);
    std::vector<Matrix> P(static_cast<std::size_t>(T) + 1);
    P[static_cast<std::size_t>(T)] = symmetrized(sys.QT());
    for (int t = T; t >= 1; --t) {
        P[static_cast<std::size_t>(t - 1)] =
            riccati_step(P[static_cast<std::size_t>(t)], sys.A(), B, sys.Q(), R);
    }
    return P;
}

CostSolution solve_are(const NetworkSystem& sys, const ActuatorSet& S, const AreOptions& opts) {
    sys.validate_subset(S);
    check_stabilizable(sys, S);
    const Matrix B = sys.input_matrix(S);
    const Matrix R = sys.input_cost(S);

    CostSolution solution;
    solution.horizon = std::nullopt;

    if (opts.method == AreMethod::doubling || opts.method == AreMethod::automatic) {
        IterationOutcome out =
            doubling_iteration(sys.A(), B, sys.Q(), R, opts.tol, opts.max_iter);
        if (out.converged || opts.method == AreMethod::doubling) {
            solution.P = std::move(out.P);
            solution.iterations = out.iterations;
            solution.residual = out.residual;
            solution.converged = out.converged;
            solution.method = "doubling";
            return solution;
        }
    }

    IterationOutcome out =
        fixed_point_iteration(sys.A(), B, sys.Q(), R, sys.QT(), opts.tol, opts.max_iter);
    solution.P = std::move(out.P);
    solution.iterations = out.iterations;
    solution.residual = out.residual;
    solution.converged = out.converged;
    solution.method = "fixed_point";
    return solution;
}

CostSolution solve_are(const NetworkSystem& sys, const ActuatorSet& S, double tol, long max_iter) {
    AreOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    return solve_are(sys, S, opts);
}

Matrix solve_lyapunov(const Matrix& A, const Matrix& Q) {
    if (A.rows() != A.cols() || Q.rows() != A.rows() || Q.cols() != A.cols()) {
        throw Error(Errc::dimension_mismatch, "solve_lyapunov: dimension mismatch");
    }
    if (spectral_radius(A) >= 1.0 - 1e-12) {
        throw Error(Errc::unstable, "solve_lyapunov: A must be Schur stable");
    }
    // Smith squaring: P <- P + C^T P C, C <- C^2 sums the series in
    // O(log) matrix products.
    Matrix P = 0.5 * (Q + Q.transpose());
    Matrix C = A;
    for (int iter = 0; iter < 128; ++iter) {
        const Matrix term = C.transpose() * P * C;
        if (term.norm() <= 1e-16 * std::max(1.0, P.norm())) break;
        P += term;
        C = C * C;
    }
    return 0.5 * (P + P.transpose());
}

BatchMatrices batch_matrices(const NetworkSystem& sys, const ActuatorSet& S, int T) {
    if (T < 1) throw Error(Errc::invalid_argument, "batch_matrices: T must be >= 1");
    sys.validate_subset(S);
    const Eigen::Index n = sys.n();
    if (static_cast<long>(T) * n > 5000) {
        throw Error(Errc::too_large, "batch_matrices: T*n exceeds the 5000 memory cap");
    }
    const Matrix Qh = symmetric_sqrt(sys.Q());
    const Matrix QTh = symmetric_sqrt(sys.QT());

    // Powers of A, weighted per stage (terminal block uses QT^{1/2}).
    std::vector<Matrix> Apow(static_cast<std::size_t>(T) + 1);
    Apow[0] = Matrix::Identity(n, n);
    for (int t = 1; t <= T; ++t) {
        Apow[static_cast<std::size_t>(t)] = sys.A() * Apow[static_cast<std::size_t>(t - 1)];
    }

    BatchMatrices out;
    out.G.resize((T + 1) * n, n);
    for (int t = 0; t <= T; ++t) {
        const Matrix& Wt = (t == T) ? QTh : Qh;
        out.G.middleRows(t * n, n) = Wt * Apow[static_cast<std::size_t>(t)];
    }

    out.H = Matrix::Zero((T + 1) * n, static_cast<Eigen::Index>(T) * n);
    for (int t = 1; t <= T; ++t) {
        const Matrix& Wt = (t == T) ? QTh : Qh;
        for (int j = 0; j < t; ++j) {
            out.H.block(t * n, j * n, n, n) = Wt * Apow[static_cast<std::size_t>(t - 1 - j)];
        }
    }

    const Matrix B = sys.input_matrix(S);
    const Matrix Rih = S.empty() ? Matrix(0, 0) : symmetric_sqrt_inverse(sys.input_cost(S));
    const Matrix BR = S.empty() ? Matrix(n, 0) : Matrix(B * Rih);
    out.Bdiag = Matrix::Zero(static_cast<Eigen::Index>(T) * n,
                             static_cast<Eigen::Index>(T) * S.size());
    for (int t = 0; t < T; ++t) {
        out.Bdiag.block(t * n, static_cast<Eigen::Index>(t) * S.size(), n, S.size()) = BR;
    }
    return out;
}

CostSolution batch_cost_matrix(const NetworkSystem& sys, const ActuatorSet& S, int T) {
    const BatchMatrices m = batch_matrices(sys, S, T);
    const Matrix HB = m.H * m.Bdiag;
    Matrix M = Matrix::Identity(m.G.rows(), m.G.rows());
    M.noalias() += HB * HB.transpose();
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() != Eigen::Success) {
        throw Error(Errc::not_positive_definite, "batch_cost_matrix: factorization failed");
    }
    CostSolution solution;
    solution.P = symmetrized(m.G.transpose() * llt.solve(m.G));
    solution.horizon = T;
    solution.iterations = 0;
    solution.residual = 0.0;
    solution.converged = true;
    solution.method = "batch";
    return solution;
}

CostFunctionals cost_functionals(const Matrix& P, const Matrix& X0) {
    if (P.rows() != P.cols() || X0.rows() != P.rows() || X0.cols() != P.cols()) {
        throw Error(Errc::dimension_mismatch, "cost_functionals: dimension mismatch");
    }
    CostFunctionals f;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (P + P.transpose()),
                                                 Eigen::EigenvaluesOnly);
    f.lambda_max = solver.eigenvalues().maxCoeff();
    f.trace = P.trace();
    f.average = (P * X0).trace();
    return f;
}

double lqg_cost(const NetworkSystem& sys, const ActuatorSet& S, int T, const Vector& x0) {
    if (x0.size() != sys.n()) {
        throw Error(Errc::dimension_mismatch, "lqg_cost: x0 dimension != n");
    }
    const std::vector<Matrix> P = riccati_recursion(sys, S, T);
    double cost = x0.dot(P.front() * x0);
    for (int t = 1; t <= T; ++t) {
        cost += (P[static_cast<std::size_t>(t)] * sys.W()).trace();
    }
    return cost;
}

double lqg_steady_state(const NetworkSystem& sys, const ActuatorSet& S) {
    const CostSolution solution = solve_are(sys, S);
    return (solution.P * sys.W()).trace();
}

Matrix optimal_gain(const NetworkSystem& sys, const ActuatorSet& S, const Matrix& P) {
    const Matrix B = sys.input_matrix(S);
    if (B.cols() == 0) return Matrix::Zero(0, sys.n());
    const Matrix PB = P * B;
    Eigen::LDLT<Matrix> ldlt(symmetrized(sys.input_cost(S) + B.transpose() * PB));
    return ldlt.solve(PB.transpose() * sys.A());
}

SimulationResult simulate_closed_loop(const NetworkSystem& sys, const ActuatorSet& S, long T_sim,
                                      long burn_in, std::uint64_t seed) {
    if (T_sim <= burn_in || burn_in < 0) {
        throw Error(Errc::invalid_argument, "simulate_closed_loop: need 0 <= burn_in < T_sim");
    }
    const CostSolution solution = solve_are(sys, S);
    const Matrix B = sys.input_matrix(S);
    const Matrix R = sys.input_cost(S);
    const Matrix K = optimal_gain(sys, S, solution.P);
    const Matrix Wh = symmetric_sqrt(sys.W());
    const bool noisy = Wh.norm() > 0.0;

    rng::Generator gen(seed);
    Vector x = Vector::Zero(sys.n());
    Vector z(sys.n());

    const long samples = T_sim - burn_in;
    std::vector<double> stage(static_cast<std::size_t>(samples));
    for (long t = 0; t < T_sim; ++t) {
        const Vector u = S.empty() ? Vector(0) : Vector(-K * x);
        const double cost = x.dot(sys.Q() * x) + (S.empty() ? 0.0 : u.dot(R * u));
        if (t >= burn_in) stage[static_cast<std::size_t>(t - burn_in)] = cost;
        x = sys.A() * x;
        if (!S.empty()) x.noalias() += B * u;
        if (noisy) {
            for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = gen.normal();
            x.noalias() += Wh * z;
        }
        if (x.norm() > 1e12) {
            throw Error(Errc::unstable,
                        "simulate_closed_loop: state diverged; the closed loop should be stable");
        }
    }

    SimulationResult result;
    result.samples = samples;
    double mean = 0.0;
    for (double v : stage) mean += v;
    mean /= static_cast<double>(samples);
    result.average_cost = mean;

    // Batch means; stage costs are autocorrelated, so an i.i.d. standard
    // error would be optimistic.
    const long batches = std::min<long>(100, samples);
    const long per = samples / batches;
    double var = 0.0;
    for (long b = 0; b < batches; ++b) {
        double bm = 0.0;
        for (long i = b * per; i < (b + 1) * per; ++i) bm += stage[static_cast<std::size_t>(i)];
        bm /= static_cast<double>(per);
        var += (bm - mean) * (bm - mean);
    }
    if (batches > 1) {
        var /= static_cast<double>(batches - 1);
        result.std_error = std::sqrt(var / static_cast<double>(batches));
    }
    return result;
}

}  // namespace netlqr
