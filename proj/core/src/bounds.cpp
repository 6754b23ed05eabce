#include "netlqr/bounds.hpp"

#include "netlqr/lqr.hpp"
#include "netlqr/selection.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <vector>

namespace netlqr {

namespace {

double eta_tail_bound(double eta, int n_bar, double cond_V, int k) {
    return (1.0 / (cond_V * cond_V)) * ((eta * eta - 1.0) / (eta * eta)) *
           std::pow(eta, 2.0 * (static_cast<double>(n_bar) / k - 1.0));
}

bool detectability_hypothesis(const NetworkSystem& sys) {
    return is_detectable(sys.A(), symmetric_sqrt(sys.Q()), 1.0 - 1e-12);
}

}  // namespace

UnstableBoundReport unstable_lower_bound(const NetworkSystem& sys, int k) {
    if (k < 1) throw Error(Errc::invalid_argument, "unstable_lower_bound: k must be >= 1");
    const Spectrum& spec = sys.spectrum();
    const double radius = spec.spectral_radius();
    if (radius <= 1.0) {
        throw Error(Errc::not_unstable, "unstable_lower_bound: A must be Schur unstable");
    }
    if (spec.cond_V >= 1e12) {
        throw Error(Errc::defective, "unstable_lower_bound: A is numerically defective");
    }

    // Candidates: the unstable eigenvalue magnitudes (where n_bar changes)
    // plus 20 geometric intermediates in (1, radius].
    std::vector<double> grid;
    for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i) {
        const double mag = std::abs(spec.eigenvalues[i]);
        if (mag > 1.0) grid.push_back(mag);
    }
    for (int j = 1; j <= 20; ++j) {
        grid.push_back(std::pow(radius, static_cast<double>(j) / 20.0));
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-12 * a; }),
               grid.end());

    UnstableBoundReport report;
    report.k = k;
    report.cond_V = spec.cond_V;
    report.lambda_max_magnitude = radius;
    report.detectable = detectability_hypothesis(sys);
    report.bound = 0.0;
    for (double eta : grid) {
        EtaCandidate c;
        c.eta = eta;
        c.n_bar = spec.count_at_least(eta);
        c.bound = eta_tail_bound(eta, c.n_bar, spec.cond_V, k);
        report.per_eta.push_back(c);
        if (c.bound > report.bound) {
            report.bound = c.bound;
            report.eta = c.eta;
            report.n_bar = c.n_bar;
        }
    }
    return report;
}

UnstableBoundReport symmetric_unstable_bound(const NetworkSystem& sys, int k) {
    if (k < 1) throw Error(Errc::invalid_argument, "symmetric_unstable_bound: k must be >= 1");
    if (!is_symmetric(sys.A(), 1e-10)) {
        throw Error(Errc::not_symmetric, "symmetric_unstable_bound: A must be symmetric");
    }
    const Spectrum& spec = sys.spectrum();
    const double lmax = spec.spectral_radius();
    if (lmax <= 1.0) {
        throw Error(Errc::not_unstable, "symmetric_unstable_bound: A must be Schur unstable");
    }

    // Smallest-magnitude unstable eigenvalue.
    double lu = lmax;
    for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i) {
        const double mag = std::abs(spec.eigenvalues[i]);
        if (mag > 1.0) lu = std::min(lu, mag);
    }

    UnstableBoundReport report;
    report.k = k;
    report.cond_V = 1.0;
    report.lambda_max_magnitude = lmax;
    report.detectable = detectability_hypothesis(sys);

    const double full_term = (lmax * lmax - 1.0) / (lmax * lmax);
    const int n_bar_u = spec.count_at_least(lu);
    const double exp_term = eta_tail_bound(lu, n_bar_u, 1.0, k);

    report.per_eta.push_back({lmax, spec.count_at_least(lmax), full_term});
    report.per_eta.push_back({lu, n_bar_u, exp_term});
    if (full_term >= exp_term) {
        report.bound = full_term;
        report.eta = lmax;
        report.n_bar = spec.count_at_least(lmax);
    } else {
        report.bound = exp_term;
        report.eta = lu;
        report.n_bar = n_bar_u;
    }
    return report;
}

StabilityTransform stability_transform(const Matrix& A) {
    if (spectral_radius(A) >= 1.0 - 1e-12) {
        throw Error(Errc::unstable, "stability_transform: A must be Schur stable");
    }
    StabilityTransform out;
    if (is_normal(A, 1e-10)) {
        // sigma_1(A) = |lambda_1(A)| < 1 already, no transform needed.
        out.T = Matrix::Identity(A.rows(), A.cols());
        Eigen::JacobiSVD<Matrix> svd(A);
        out.sigma1_D = svd.singularValues().maxCoeff();
        out.alpha = 1.0 / (1.0 - out.sigma1_D * out.sigma1_D);
        out.normal = true;
        return out;
    }
    // T = M^{1/2} with M = A^T M A + I gives
    // D^T D = I - M^{-1}, hence sigma_1(D)^2 = 1 - 1/lambda_max(M) < 1.
    const Matrix M = solve_lyapunov(A, Matrix::Identity(A.rows(), A.cols()));
    out.T = symmetric_sqrt(M);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
    const double m_max = eig.eigenvalues().maxCoeff();
    const double m_min = eig.eigenvalues().minCoeff();
    out.sigma1_D = std::sqrt(1.0 - 1.0 / m_max);
    // sigma_1^2(T) = lambda_max(M), sigma_n^2(T) = lambda_min(M).
    out.alpha = (m_max / m_min) / (1.0 - out.sigma1_D * out.sigma1_D);
    out.normal = false;
    return out;
}

Matrix actuator_influence(const NetworkSystem& sys, const ActuatorSet& S) {
    sys.validate_subset(S);
    if (S.empty()) return Matrix::Zero(sys.n(), sys.n());
    const Matrix B = sys.input_matrix(S);
    Eigen::LDLT<Matrix> ldlt(sys.input_cost(S));
    Matrix R = B * ldlt.solve(B.transpose());
    return 0.5 * (R + R.transpose());
}

namespace {

double max_influence_eigenvalue(const NetworkSystem& sys, int k, bool& exact) {
    // lambda_1(R(S)) maximized over subsets with at most k elements,
    // enumerated while the count stays within 1e5.
    const int M = sys.catalog_size();
    std::uint64_t total = 0;
    for (int j = 1; j <= k; ++j) total += binomial(M, j);
    if (total <= 100000) {
        exact = true;
        double best = 0.0;
        std::vector<int> idx;
        for (int j = 1; j <= k; ++j) {
            idx.assign(static_cast<std::size_t>(j), 0);
            for (int i = 0; i < j; ++i) idx[static_cast<std::size_t>(i)] = i;
            while (true) {
                const Matrix R = actuator_influence(sys, ActuatorSet(idx));
                Eigen::SelfAdjointEigenSolver<Matrix> eig(R, Eigen::EigenvaluesOnly);
                best = std::max(best, eig.eigenvalues().maxCoeff());
                int pos = j - 1;
                while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == M - j + pos) --pos;
                if (pos < 0) break;
                ++idx[static_cast<std::size_t>(pos)];
                for (int i = pos + 1; i < j; ++i) {
                    idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
                }
            }
        }
        return best;
    }
    exact = false;
    const Matrix R = actuator_influence(sys, ActuatorSet::all(M));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(R, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
}

}  // namespace

StableBoundReport stable_ratio_bound(const NetworkSystem& sys, int k) {
    if (k < 1 || k > sys.catalog_size()) {
        throw Error(Errc::invalid_argument, "stable_ratio_bound: k out of range");
    }
    if (sys.spectrum().spectral_radius() >= 1.0 - 1e-12) {
        throw Error(Errc::unstable, "stable_ratio_bound: A must be Schur stable");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> qeig(sys.Q(), Eigen::EigenvaluesOnly);
    const double q_min = qeig.eigenvalues().minCoeff();
    if (q_min <= 0.0) {
        throw Error(Errc::not_positive_definite, "stable_ratio_bound: Q must be positive definite");
    }

    StableBoundReport report;
    report.k = k;
    const StabilityTransform transform = stability_transform(sys.A());
    report.alpha = transform.alpha;
    report.T_transform = transform.T;
    report.sigma1_D = transform.sigma1_D;
    report.lambda1_max = max_influence_eigenvalue(sys, k, report.lambda1_max_exact);

    Eigen::JacobiSVD<Matrix> asvd(sys.A());
    const double sn2 = std::pow(asvd.singularValues().minCoeff(), 2);
    const double tr_q = sys.Q().trace();
    const double weight = 1.0 + report.lambda1_max * q_min;
    report.bound = report.alpha * weight * tr_q / (sn2 * q_min + weight * tr_q);

    if (transform.normal) {
        const double l1 = sys.spectrum().spectral_radius();
        report.simple_bound = 1.0 / (1.0 - l1 * l1);
    }
    return report;
}

EmpiricalRatio empirical_ratio(const NetworkSystem& sys, int k) {
    if (k < 1 || k > sys.catalog_size()) {
        throw Error(Errc::invalid_argument, "empirical_ratio: k out of range");
    }
    if (sys.spectrum().spectral_radius() >= 1.0 - 1e-12) {
        throw Error(Errc::unstable, "empirical_ratio: A must be Schur stable");
    }
    EmpiricalRatio out;
    if (binomial(sys.catalog_size(), k) <= 100000) {
        auto [best, worst] = exhaustive_select(sys, k, Objective::trace);
        out.exhaustive = true;
        out.best = best.subset;
        out.worst = worst.subset;
        out.trace_best = best.objective_value;
        out.trace_worst = worst.objective_value;
    } else {
        const SelectionResult best = greedy_select(sys, k, Objective::trace, Direction::minimize);
        const SelectionResult worst = greedy_select(sys, k, Objective::trace, Direction::maximize);
        out.exhaustive = false;
        out.best = best.subset;
        out.worst = worst.subset;
        out.trace_best = best.objective_value;
        out.trace_worst = worst.objective_value;
    }
    out.ratio = out.trace_worst / out.trace_best;
    return out;
}

}  // namespace netlqr
