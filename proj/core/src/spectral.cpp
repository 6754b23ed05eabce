#include "netlqr/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>

namespace netlqr {

double Spectrum::spectral_radius() const {
    return eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
}

double Spectrum::min_magnitude() const {
    return eigenvalues.size() ? eigenvalues.cwiseAbs().minCoeff() : 0.0;
}

int Spectrum::count_at_least(double threshold) const {
    const double cut = threshold * (1.0 - 1e-12);
    int count = 0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        if (std::abs(eigenvalues[i]) >= cut) ++count;
    }
    return count;
}

namespace {

// cond of the eigenvector matrix with conjugate pairs replaced by their real
// and imaginary parts. The ratio sigma_1/sigma_n is unchanged by that
// substitution, and the SVD stays real.
double realified_cond(const ComplexMatrix& V) {
    const Eigen::Index n = V.cols();
    Matrix Vr(n, n);
    Eigen::Index j = 0;
    while (j < n) {
        const bool pair = (j + 1 < n) && (V.col(j).imag().norm() > 0) &&
                          ((V.col(j) - V.col(j + 1).conjugate()).norm() <
                           1e-8 * V.col(j).norm());
        if (pair) {
            Vr.col(j) = V.col(j).real();
            Vr.col(j + 1) = V.col(j).imag();
            j += 2;
        } else {
            Vr.col(j) = V.col(j).real();
            ++j;
        }
    }
    Eigen::JacobiSVD<Matrix> svd(Vr);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin <= 0.0 || !std::isfinite(smax / smin)) return 1e300;
    return smax / smin;
}

}  // namespace

Spectrum eigen_decomposition(const Matrix& A) {
    Spectrum s;
    s.symmetric = is_symmetric(A);
    if (s.symmetric) {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(A);
        s.eigenvalues = solver.eigenvalues().cast<std::complex<double>>();
        s.eigenvectors = solver.eigenvectors().cast<std::complex<double>>();
        s.cond_V = 1.0;
        return s;
    }
    Eigen::EigenSolver<Matrix> solver(A);
    s.eigenvalues = solver.eigenvalues();
    s.eigenvectors = solver.eigenvectors();
    s.cond_V = realified_cond(s.eigenvectors);
    return s;
}

double spectral_radius(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    return A.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_symmetric(const Matrix& A, double rel_tol) {
    if (A.rows() != A.cols()) return false;
    const double scale = std::max(A.norm(), 1e-300);
    return (A - A.transpose()).norm() <= rel_tol * scale;
}

bool is_normal(const Matrix& A, double rel_tol) {
    if (A.rows() != A.cols()) return false;
    const double scale = std::max(A.norm() * A.norm(), 1e-300);
    return (A.transpose() * A - A * A.transpose()).norm() <= rel_tol * scale;
}

Matrix symmetric_sqrt(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (M + M.transpose()));
    Vector d = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * d.asDiagonal() * solver.eigenvectors().transpose();
}

Matrix symmetric_sqrt_inverse(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (M + M.transpose()));
    const Vector& d = solver.eigenvalues();
    if (d.minCoeff() <= 0.0) {
        throw Error(Errc::not_positive_definite,
                    "symmetric_sqrt_inverse: matrix is not positive definite");
    }
    Vector di = d.cwiseSqrt().cwiseInverse();
    return solver.eigenvectors() * di.asDiagonal() * solver.eigenvectors().transpose();
}

namespace {

// Unstable eigenvalues deduplicated by value, so a repeated mode is probed
// once through the compound pencil (which sees its full eigenspace).
std::vector<std::complex<double>> modes_at_or_above(const Matrix& A, double threshold) {
    const ComplexVector eigs = A.eigenvalues();
    std::vector<std::complex<double>> out;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
        if (std::abs(eigs[i]) < threshold) continue;
        bool dup = false;
        for (const auto& seen : out) {
            if (std::abs(seen - eigs[i]) <= 1e-9 * std::max(1.0, std::abs(eigs[i]))) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(eigs[i]);
    }
    return out;
}

double min_singular_value(const ComplexMatrix& M) {
    Eigen::JacobiSVD<ComplexMatrix> svd(M);
    return svd.singularValues().minCoeff();
}

}  // namespace

bool is_stabilizable(const Matrix& A, const Matrix& B, double magnitude_threshold, double tol) {
    const Eigen::Index n = A.rows();
    const double scale = tol * std::max(1.0, A.norm());
    for (const auto& lambda : modes_at_or_above(A, magnitude_threshold)) {
        ComplexMatrix pencil(n, n + B.cols());
        pencil.leftCols(n) = A.cast<std::complex<double>>();
        pencil.leftCols(n).diagonal().array() -= lambda;
        pencil.rightCols(B.cols()) = B.cast<std::complex<double>>();
        if (min_singular_value(pencil) <= scale) return false;
    }
    return true;
}

bool is_detectable(const Matrix& A, const Matrix& C, double magnitude_threshold, double tol) {
    const Eigen::Index n = A.rows();
    const double scale = tol * std::max(1.0, A.norm());
    for (const auto& lambda : modes_at_or_above(A, magnitude_threshold)) {
        ComplexMatrix pencil(n + C.rows(), n);
        pencil.topRows(n) = A.cast<std::complex<double>>();
        pencil.topRows(n).diagonal().array() -= lambda;
        pencil.bottomRows(C.rows()) = C.cast<std::complex<double>>();
        if (min_singular_value(pencil) <= scale) return false;
    }
    return true;
}

}  // namespace netlqr
