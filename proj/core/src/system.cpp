#include "netlqr/system.hpp"

#include "netlqr/rng.hpp"

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace netlqr {

using nlohmann::json;

ActuatorSet::ActuatorSet(std::vector<int> indices) : indices_(std::move(indices)) {
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        if (indices_[i] < 0) {
            throw Error(Errc::invalid_argument, "ActuatorSet: negative index");
        }
        if (i > 0 && indices_[i] <= indices_[i - 1]) {
            throw Error(Errc::invalid_argument,
                        "ActuatorSet: indices must be strictly increasing");
        }
    }
}

ActuatorSet ActuatorSet::all(int catalog_size) {
    std::vector<int> idx(static_cast<std::size_t>(std::max(catalog_size, 0)));
    for (int i = 0; i < catalog_size; ++i) idx[static_cast<std::size_t>(i)] = i;
    return ActuatorSet(std::move(idx));
}

ActuatorSet ActuatorSet::from_unsorted(std::vector<int> indices) {
    std::sort(indices.begin(), indices.end());
    return ActuatorSet(std::move(indices));
}

std::string ActuatorSet::to_string() const {
    std::ostringstream out;
    out << '{';
    for (std::size_t i = 0; i < indices_.size(); ++i) {
        if (i) out << ',';
        out << indices_[i];
    }
    out << '}';
    return out.str();
}

namespace {

void require_symmetric(const Matrix& M, const char* name) {
    if (!is_symmetric(M, 1e-10)) {
        throw Error(Errc::not_symmetric, std::string(name) + " must be symmetric");
    }
}

void require_psd(const Matrix& M, const char* name) {
    require_symmetric(M, name);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (M + M.transpose()),
                                                 Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10) {
        throw Error(Errc::not_positive_definite,
                    std::string(name) + " must be positive semidefinite");
    }
}

void require_pd(const Matrix& M, const char* name) {
    require_symmetric(M, name);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (M + M.transpose()),
                                                 Eigen::EigenvaluesOnly);
    const double lmin = solver.eigenvalues().minCoeff();
    const double lmax = std::abs(solver.eigenvalues().maxCoeff());
    if (lmin <= 1e-12 * std::max(1.0, lmax)) {
        throw Error(Errc::not_positive_definite,
                    std::string(name) + " must be positive definite");
    }
}

double singular_value_margin(const Matrix& A) {
    Eigen::JacobiSVD<Matrix> svd(A);
    const double smax = svd.singularValues().maxCoeff();
    if (smax <= 0.0) return 0.0;
    return svd.singularValues().minCoeff() / smax;
}

}  // namespace

NetworkSystem::NetworkSystem(Matrix A, std::vector<Vector> catalog, Matrix Q, Matrix QT,
                             Matrix R_full, Matrix X0, Matrix W)
    : A_(std::move(A)),
      catalog_(std::move(catalog)),
      Q_(std::move(Q)),
      QT_(std::move(QT)),
      R_full_(std::move(R_full)),
      X0_(std::move(X0)),
      W_(std::move(W)) {
    const auto n = A_.rows();
    if (n == 0 || A_.cols() != n) {
        throw Error(Errc::dimension_mismatch, "NetworkSystem: A must be square and nonempty");
    }
    if (catalog_.empty()) {
        throw Error(Errc::invalid_argument, "NetworkSystem: catalog must hold at least one vector");
    }
    for (const auto& b : catalog_) {
        if (b.size() != n) {
            throw Error(Errc::dimension_mismatch, "NetworkSystem: catalog vector dimension != n");
        }
    }
    const auto M = static_cast<Eigen::Index>(catalog_.size());
    if (Q_.rows() != n || Q_.cols() != n || QT_.rows() != n || QT_.cols() != n ||
        X0_.rows() != n || X0_.cols() != n || W_.rows() != n || W_.cols() != n) {
        throw Error(Errc::dimension_mismatch, "NetworkSystem: cost/covariance matrices must be n x n");
    }
    if (R_full_.rows() != M || R_full_.cols() != M) {
        throw Error(Errc::dimension_mismatch, "NetworkSystem: R must be M x M");
    }
    require_psd(Q_, "Q");
    require_pd(QT_, "QT");
    require_pd(R_full_, "R");
    require_psd(X0_, "X0");
    require_psd(W_, "W");

    invertibility_margin_ = singular_value_margin(A_);
    spectrum_ = std::make_shared<const Spectrum>(eigen_decomposition(A_));
}

void NetworkSystem::validate_subset(const ActuatorSet& S) const {
    if (!S.empty() && S.indices().back() >= catalog_size()) {
        throw Error(Errc::invalid_argument, "actuator index out of catalog range");
    }
}

Matrix NetworkSystem::input_matrix(const ActuatorSet& S) const {
    validate_subset(S);
    Matrix B(n(), S.size());
    for (int c = 0; c < S.size(); ++c) {
        B.col(c) = catalog_[static_cast<std::size_t>(S.indices()[static_cast<std::size_t>(c)])];
    }
    return B;
}

Matrix NetworkSystem::input_cost(const ActuatorSet& S) const {
    validate_subset(S);
    Matrix R(S.size(), S.size());
    for (int r = 0; r < S.size(); ++r) {
        for (int c = 0; c < S.size(); ++c) {
            R(r, c) = R_full_(S.indices()[static_cast<std::size_t>(r)],
                              S.indices()[static_cast<std::size_t>(c)]);
        }
    }
    return R;
}

NetworkSystem NetworkSystem::with_dynamics(Matrix A) const {
    return NetworkSystem(std::move(A), catalog_, Q_, QT_, R_full_, X0_, W_);
}

namespace {

std::vector<Vector> identity_catalog(int n) {
    std::vector<Vector> catalog(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        catalog[static_cast<std::size_t>(i)] = Vector::Unit(n, i);
    }
    return catalog;
}

NetworkSystem default_cost_system(Matrix A) {
    const int n = static_cast<int>(A.rows());
    const Matrix I = Matrix::Identity(n, n);
    return NetworkSystem(std::move(A), identity_catalog(n), I, I, I, I, I);
}

}  // namespace

NetworkSystem build_path_system(int n, double rho) {
    if (n < 2) throw Error(Errc::invalid_argument, "build_path_system: n must be >= 2");
    if (!(rho > 0.0)) throw Error(Errc::invalid_argument, "build_path_system: rho must be positive");
    Matrix A = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        A(i, i) = 1.0;
        if (i > 0) A(i, i - 1) = 1.0;
        if (i + 1 < n) A(i, i + 1) = 1.0;
    }
    A *= rho / 3.0;
    return default_cost_system(std::move(A));
}

NetworkSystem build_er_system(int n, double p, std::uint64_t seed, std::optional<double> scale_to) {
    if (n < 2) throw Error(Errc::invalid_argument, "build_er_system: n must be >= 2");
    if (!(p > 0.0 && p < 1.0)) {
        throw Error(Errc::invalid_argument, "build_er_system: p must lie in (0, 1)");
    }
    if (scale_to && !(*scale_to > 0.0)) {
        throw Error(Errc::invalid_argument, "build_er_system: scale_to must be positive");
    }

    constexpr int kMaxAttempts = 100;
    rng::Generator gen(seed);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        Matrix A = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (gen.uniform() < p) {
                    A(i, j) = 1.0;
                    A(j, i) = 1.0;
                }
            }
        }
        if ((A.cwiseAbs().rowwise().sum().array() == 0.0).any()) continue;  // isolated node
        if (singular_value_margin(A) < 1e-12) continue;
        if (scale_to) A = spectral_scale(A, *scale_to);
        return default_cost_system(std::move(A));
    }
    std::ostringstream msg;
    msg << "build_er_system: degenerate ensemble, no usable draw in " << kMaxAttempts
        << " attempts (n=" << n << ", p=" << p << ")";
    if ((n - 1) * p < 1.0) msg << "; expected degree below 1";
    throw Error(Errc::degenerate_ensemble, msg.str());
}

Matrix spectral_scale(const Matrix& A, double target) {
    if (!(target > 0.0)) throw Error(Errc::invalid_argument, "spectral_scale: target must be positive");
    if (A.size() == 0 || A.norm() == 0.0) {
        throw Error(Errc::invalid_argument, "spectral_scale: matrix is zero");
    }
    const double radius = spectral_radius(A);
    if (radius <= 0.0) {
        throw Error(Errc::invalid_argument, "spectral_scale: spectral radius is zero");
    }
    return A * (target / radius);
}

SystemDiagnostics validate_system(const NetworkSystem& sys, const ActuatorSet& S) {
    SystemDiagnostics d;
    d.invertibility_margin = sys.invertibility_margin();
    d.dynamics_invertible = sys.dynamics_invertible();
    const Spectrum& spec = sys.spectrum();
    d.spectral_radius = spec.spectral_radius();
    d.cond_V = spec.cond_V;
    d.diagonalizable = spec.cond_V < 1e12;
    d.schur_stable = d.spectral_radius < 1.0 - 1e-12;
    d.detectable = is_detectable(sys.A(), symmetric_sqrt(sys.Q()), 1.0 - 1e-12);
    d.stabilizable = is_stabilizable(sys.A(), sys.input_matrix(S), 1.0 - 1e-12);
    return d;
}

namespace {

json matrix_to_json(const Matrix& M) {
    if (M == Matrix::Identity(M.rows(), M.cols())) return json("identity");
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) rows.push_back(M(i, j));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const char* name) {
    if (j.is_string()) {
        if (j.get<std::string>() != "identity") {
            throw Error(Errc::io, std::string("system file: unknown matrix literal for ") + name);
        }
        return Matrix::Identity(rows, cols);
    }
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols) {
        throw Error(Errc::io, std::string("system file: ") + name + " must hold " +
                                  std::to_string(rows * cols) + " entries");
    }
    Matrix M(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j2 = 0; j2 < cols; ++j2) M(i, j2) = j.at(k++).get<double>();
    }
    return M;
}

bool catalog_is_identity(const NetworkSystem& sys) {
    if (sys.catalog_size() != sys.n()) return false;
    for (int i = 0; i < sys.n(); ++i) {
        if (sys.catalog()[static_cast<std::size_t>(i)] != Vector::Unit(sys.n(), i)) return false;
    }
    return true;
}

}  // namespace

std::string system_to_json(const NetworkSystem& sys) {
    json doc;
    doc["n"] = sys.n();
    json a = json::array();
    for (int i = 0; i < sys.n(); ++i) {
        for (int j = 0; j < sys.n(); ++j) a.push_back(sys.A()(i, j));
    }
    doc["A"] = std::move(a);
    if (catalog_is_identity(sys)) {
        doc["catalog"] = "identity";
    } else {
        json cat = json::array();
        for (const auto& b : sys.catalog()) {
            json col = json::array();
            for (Eigen::Index i = 0; i < b.size(); ++i) col.push_back(b[i]);
            cat.push_back(std::move(col));
        }
        doc["catalog"] = std::move(cat);
    }
    doc["Q"] = matrix_to_json(sys.Q());
    doc["QT"] = matrix_to_json(sys.QT());
    doc["R"] = matrix_to_json(sys.R_full());
    doc["X0"] = matrix_to_json(sys.X0());
    doc["W"] = matrix_to_json(sys.W());
    return doc.dump(2);
}

NetworkSystem system_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::io, std::string("system file: invalid JSON: ") + e.what());
    }
    if (!doc.contains("n") || !doc.contains("A")) {
        throw Error(Errc::io, "system file: missing required fields n/A");
    }
    const int n = doc.at("n").get<int>();
    if (n <= 0) throw Error(Errc::io, "system file: n must be positive");
    Matrix A = matrix_from_json(doc.at("A"), n, n, "A");

    std::vector<Vector> catalog;
    if (!doc.contains("catalog") || (doc.at("catalog").is_string() &&
                                     doc.at("catalog").get<std::string>() == "identity")) {
        catalog = identity_catalog(n);
    } else {
        for (const auto& col : doc.at("catalog")) {
            if (static_cast<int>(col.size()) != n) {
                throw Error(Errc::io, "system file: catalog vector dimension != n");
            }
            Vector b(n);
            for (int i = 0; i < n; ++i) b[i] = col.at(static_cast<std::size_t>(i)).get<double>();
            catalog.push_back(std::move(b));
        }
        if (catalog.empty()) throw Error(Errc::io, "system file: catalog is empty");
    }
    const auto M = static_cast<Eigen::Index>(catalog.size());

    auto load = [&](const char* key, Eigen::Index rows, Eigen::Index cols) {
        if (!doc.contains(key)) return Matrix(Matrix::Identity(rows, cols));
        return matrix_from_json(doc.at(key), rows, cols, key);
    };
    Matrix Q = load("Q", n, n);
    Matrix QT = load("QT", n, n);
    Matrix R = load("R", M, M);
    Matrix X0 = load("X0", n, n);
    Matrix W = load("W", n, n);
    return NetworkSystem(std::move(A), std::move(catalog), std::move(Q), std::move(QT),
                         std::move(R), std::move(X0), std::move(W));
}

NetworkSystem load_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io, "cannot open system file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return system_from_json(buffer.str());
}

void save_system(const NetworkSystem& sys, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::io, "cannot write system file: " + path);
    out << system_to_json(sys) << '\n';
}

}  // namespace netlqr
