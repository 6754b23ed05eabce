#pragma once

#include "netlqr/types.hpp"

namespace netlqr {

/// Dense eigen-decomposition of a real square matrix, plus the quantities the
/// bounds need from it. Symmetric inputs go through the self-adjoint solver,
/// so their eigenvector matrix is orthonormal and cond_V is exactly computed
/// as 1 up to roundoff.
struct Spectrum {
    ComplexVector eigenvalues;
    ComplexMatrix eigenvectors;  // unit-norm columns
    double cond_V = 0.0;         // sigma_1(V)/sigma_n(V), complex pairs realified
    bool symmetric = false;

    double spectral_radius() const;
    /// Smallest |eigenvalue|.
    double min_magnitude() const;
    /// Count of eigenvalues with |lambda| >= threshold (within a 1e-12
    /// relative slack so magnitudes sitting exactly on the threshold count).
    int count_at_least(double threshold) const;
};

Spectrum eigen_decomposition(const Matrix& A);

double spectral_radius(const Matrix& A);

bool is_symmetric(const Matrix& A, double rel_tol = 1e-10);

/// ||A^T A - A A^T||_F <= tol * ||A||_F^2.
bool is_normal(const Matrix& A, double rel_tol = 1e-10);

/// Symmetric PSD square root; eigenvalues clamped at zero.
Matrix symmetric_sqrt(const Matrix& M);

/// Inverse symmetric square root of an SPD matrix.
Matrix symmetric_sqrt_inverse(const Matrix& M);

/// PBH-type tests. Each eigenvalue of A with magnitude at or above
/// `magnitude_threshold` is probed with the smallest singular value of the
/// compound pencil ([A - lambda I, B] resp. [A - lambda I; C]); the mode is
/// controllable/observable when that value exceeds tol * max(1, ||A||_F).
/// The compound form handles repeated eigenvalues, which a per-eigenvector
/// null-space check misses.
bool is_stabilizable(const Matrix& A, const Matrix& B, double magnitude_threshold,
                     double tol = 1e-9);
bool is_detectable(const Matrix& A, const Matrix& C, double magnitude_threshold,
                   double tol = 1e-9);

}  // namespace netlqr
