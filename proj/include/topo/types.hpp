#ifndef TOPO_TYPES_HPP
#define TOPO_TYPES_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace topo {

using Real = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IntVector = Eigen::VectorXi;
using SpMat = Eigen::SparseMatrix<Real>;
using Triplet = Eigen::Triplet<Real>;

/// Thrown on malformed meshes, parameters out of range, or bad requests.
struct InvalidSpecError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a factorization meets a non-positive pivot. Carries the
/// offending DOF so disconnected structures can be diagnosed.
struct SingularSystemError : std::runtime_error {
    int pivot_dof;  // reduced index, or full index when the caller maps it
    SingularSystemError(const std::string& what, int dof)
        : std::runtime_error(what), pivot_dof(dof) {}
};

/// Thrown when a load, spring or point mass sits on an eliminated DOF.
struct DisconnectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a forward analysis does not converge (Newton, eigensolver).
struct AnalysisFailureError : std::runtime_error {
    Real last_residual;
    AnalysisFailureError(const std::string& what, Real res = 0.0)
        : std::runtime_error(what), last_residual(res) {}
};

}  // namespace topo

#endif
