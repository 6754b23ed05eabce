#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace netlqr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Error categories thrown by the library. Carried inside netlqr::Error so
/// callers can branch on the condition without parsing messages.
enum class Errc {
    invalid_argument,
    dimension_mismatch,
    singular_dynamics,
    not_stabilizable,
    unstable,
    not_unstable,
    not_symmetric,
    not_positive_definite,
    defective,
    domain,
    too_large,
    all_infeasible,
    infeasible_at_k,
    empty_input,
    degenerate_ensemble,
    io,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace netlqr
