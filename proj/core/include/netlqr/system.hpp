#pragma once

#include "netlqr/spectral.hpp"
#include "netlqr/types.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace netlqr {

/// Ordered actuator subset: strictly increasing catalog indices. The empty
/// set is valid (no actuation).
class ActuatorSet {
public:
    ActuatorSet() = default;
    /// Indices must already be strictly increasing.
    explicit ActuatorSet(std::vector<int> indices);

    static ActuatorSet none() { return ActuatorSet{}; }
    static ActuatorSet all(int catalog_size);
    /// Sorts the given indices; rejects duplicates or negatives.
    static ActuatorSet from_unsorted(std::vector<int> indices);

    const std::vector<int>& indices() const { return indices_; }
    int size() const { return static_cast<int>(indices_.size()); }
    bool empty() const { return indices_.empty(); }
    bool operator==(const ActuatorSet& other) const { return indices_ == other.indices_; }

    std::string to_string() const;

private:
    std::vector<int> indices_;
};

/// Immutable linear network system: dynamics matrix A, a catalog of candidate
/// input columns, and the quadratic cost / covariance data. Construction
/// validates symmetry and definiteness of the cost matrices and records the
/// invertibility margin of A. Near-singular dynamics are accepted here (only
/// the inverse-dynamics Gramian machinery requires A^{-1}); operations that
/// need the inverse reject through that margin.
class NetworkSystem {
public:
    NetworkSystem(Matrix A, std::vector<Vector> catalog, Matrix Q, Matrix QT, Matrix R_full,
                  Matrix X0, Matrix W);

    int n() const { return static_cast<int>(A_.rows()); }
    int catalog_size() const { return static_cast<int>(catalog_.size()); }
    const Matrix& A() const { return A_; }
    const std::vector<Vector>& catalog() const { return catalog_; }
    const Matrix& Q() const { return Q_; }
    const Matrix& QT() const { return QT_; }
    const Matrix& R_full() const { return R_full_; }
    const Matrix& X0() const { return X0_; }
    const Matrix& W() const { return W_; }

    /// sigma_min(A) / sigma_max(A).
    double invertibility_margin() const { return invertibility_margin_; }
    bool dynamics_invertible() const { return invertibility_margin_ >= 1e-12; }

    /// Columns of the catalog selected by S (n x |S|).
    Matrix input_matrix(const ActuatorSet& S) const;
    /// S-indexed principal submatrix of R_full (|S| x |S|).
    Matrix input_cost(const ActuatorSet& S) const;

    /// Copy of this system with a replaced dynamics matrix.
    NetworkSystem with_dynamics(Matrix A) const;

    /// Eigen-decomposition of A, computed once at construction and shared.
    const Spectrum& spectrum() const { return *spectrum_; }

    void validate_subset(const ActuatorSet& S) const;

private:
    Matrix A_;
    std::vector<Vector> catalog_;
    Matrix Q_, QT_, R_full_, X0_, W_;
    double invertibility_margin_ = 0.0;
    std::shared_ptr<const Spectrum> spectrum_;
};

/// Path network: A = (rho/3) * tridiagonal of ones (diagonal included),
/// identity catalog and unit cost/covariance matrices. For n congruent to
/// 2 mod 3 the tridiagonal has an exactly zero eigenvalue for every rho; the
/// system is still constructed (with a near-zero invertibility margin) and
/// inverse-dynamics operations reject it downstream.
NetworkSystem build_path_system(int n, double rho);

/// Erdos-Renyi system: symmetric 0/1 adjacency of G(n, p) drawn from `seed`,
/// optionally rescaled so the spectral radius equals `scale_to`. Draws with
/// an isolated node or singular adjacency are resampled (at most 100 times).
NetworkSystem build_er_system(int n, double p, std::uint64_t seed,
                              std::optional<double> scale_to = std::nullopt);

/// A * target / spectral_radius(A). Rejects matrices with zero spectral
/// radius.
Matrix spectral_scale(const Matrix& A, double target);

struct SystemDiagnostics {
    double invertibility_margin = 0.0;
    bool dynamics_invertible = false;
    bool detectable = false;     // (A, Q^{1/2})
    bool stabilizable = false;   // (A, B_S)
    bool schur_stable = false;   // all |lambda| < 1 - 1e-12
    bool diagonalizable = false; // cond(V) < 1e12
    double spectral_radius = 0.0;
    double cond_V = 0.0;
};

/// Diagnostics only; never throws. Downstream solvers consume the flags.
SystemDiagnostics validate_system(const NetworkSystem& sys, const ActuatorSet& S);

/// JSON system file I/O. Schema: { "n": int, "A": row-major n*n array,
/// "catalog": array of n-vectors or "identity", "Q"/"QT"/"R"/"X0"/"W":
/// row-major arrays or "identity" }.
NetworkSystem load_system(const std::string& path);
void save_system(const NetworkSystem& sys, const std::string& path);
std::string system_to_json(const NetworkSystem& sys);
NetworkSystem system_from_json(const std::string& text);

}  // namespace netlqr
