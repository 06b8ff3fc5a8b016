#include "topo/solve.hpp"

#include <cmath>
#include <string>

namespace topo {

LinearSolver::LinearSolver(const SpMat& K) : n_(static_cast<int>(K.rows())) {
    if (K.rows() != K.cols()) throw InvalidSpecError("LinearSolver: matrix not square");
    if (n_ == 0) throw SingularSystemError("LinearSolver: empty system (all DOFs removed)", -1);
    ldlt_.compute(K);
    if (ldlt_.info() != Eigen::Success)
        throw SingularSystemError("LinearSolver: factorization failed", -1);

    // A positive-definite system has strictly positive pivots; a zero or
    // negative one signals a disconnected structure or a loaded void region.
    const auto& d = ldlt_.vectorD();
    const Real dmax = d.cwiseAbs().maxCoeff();
    for (int i = 0; i < n_; ++i) {
        if (!(d[i] > 1e-14 * dmax)) {
            const int orig = ldlt_.permutationPinv().indices()[i];
            throw SingularSystemError(
                "LinearSolver: non-positive pivot at reduced DOF " + std::to_string(orig), orig);
        }
    }
}

Vector LinearSolver::solve(const Vector& rhs) const {
    if (rhs.size() != n_) throw InvalidSpecError("LinearSolver::solve: dimension mismatch");
    return ldlt_.solve(rhs);
}

Vector solve_linear(const SpMat& K, const Vector& f) {
    if (f.size() != K.rows()) throw InvalidSpecError("solve_linear: dimension mismatch");
    LinearSolver solver(K);
    Vector u = solver.solve(f);
    const Real fn = f.norm();
    const Real res = (K * u - f).norm();
    if (fn > 0.0 && res > 1e-10 * fn) {
        // one step of iterative refinement before giving up
        u += solver.solve(f - K * u);
        const Real res2 = (K * u - f).norm();
        if (res2 > 1e-10 * fn)
            throw SingularSystemError("solve_linear: residual contract violated", -1);
    }
    return u;
}

}  // namespace topo
