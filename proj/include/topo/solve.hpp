#ifndef TOPO_SOLVE_HPP
#define TOPO_SOLVE_HPP

#include "topo/types.hpp"

#include <Eigen/SparseCholesky>
#include <memory>

namespace topo {

/// Direct sparse LDL^T factorization, reusable for repeated right-hand sides
/// (adjoints, eigensolver inner solves). Construction throws
/// SingularSystemError on a non-positive pivot, carrying its location.
class LinearSolver {
  public:
    explicit LinearSolver(const SpMat& K);

    Vector solve(const Vector& rhs) const;
    int dimension() const { return n_; }

  private:
    Eigen::SimplicialLDLT<SpMat> ldlt_;
    int n_;
};

/// One-shot solve with the relative-residual contract
/// ||K u - f|| <= 1e-10 ||f||. Throws SingularSystemError otherwise.
Vector solve_linear(const SpMat& K, const Vector& f);

}  // namespace topo

#endif
