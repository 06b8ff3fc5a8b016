#ifndef TOPO_OPTIMIZER_HPP
#define TOPO_OPTIMIZER_HPP

#include "topo/types.hpp"

#include <functional>
#include <vector>

namespace topo {

/// Optimality-criterion update with damping and a move limit. The Lagrange
/// multiplier of the volume constraint is found by bisection on
/// [1e-10, 1e10]; `volume_of` evaluates the volume fraction of a candidate
/// design through the active filter/projection chain.
/// Throws InvalidSpecError when no sensitivity is negative (degenerate).
Vector oc_update(const Vector& phi, const Vector& dg0_dphi, const Vector& dv_dphi, Real vmax,
                 Real move_limit, Real damping,
                 const std::function<Real(const Vector&)>& volume_of);

struct ConvergenceResult {
    Real tau_phi = 0.0;
    Real tau_g0 = 0.0;
    bool converged = false;
};

/// tau_phi = ||phi - phi_prev||_2 / sqrt(m), tau_g0 = (g^k - g^{k-1}) / g^1
/// (signed, as printed). Converged when both fall below their thresholds.
/// Throws InvalidSpecError when the first objective value is zero.
ConvergenceResult convergence_check(const Vector& phi, const Vector& phi_prev,
                                    const std::vector<Real>& g0_history, Real tol_phi = 1e-4,
                                    Real tol_g0 = 1e-8);

/// Method of moving asymptotes with the tightened parameter set: initial
/// asymptote offset 0.1 (upper-lower), expansion 1.05, contraction 0.65.
/// Bounds are fixed to [0,1]. One instance carries the asymptote state
/// across iterations.
class MmaOptimizer {
  public:
    struct Options {
        Real move_limit = 0.1;
        Real asy_init = 0.1;
        Real asy_incr = 1.05;
        Real asy_decr = 0.65;
        Real epsimin = 1e-9;  // interior-point / dual tolerance
    };

    MmaOptimizer(int n_vars, int n_cons, Options opt);
    MmaOptimizer(int n_vars, int n_cons) : MmaOptimizer(n_vars, n_cons, Options()) {}

    /// One design update. `dg0` is the objective gradient; `g_cons` the
    /// constraint values (feasible when <= 0) with gradients in the rows of
    /// `dg_cons`. Returns the new design; `relaxed_feasibility()` reports
    /// whether the elastic variables were active at the subproblem solution.
    Vector update(const Vector& phi, const Vector& dg0, const Vector& g_cons,
                  const Matrix& dg_cons);

    bool relaxed_feasibility() const { return relaxed_; }
    const Vector& lower_asymptote() const { return low_; }
    const Vector& upper_asymptote() const { return upp_; }

  private:
    int n_, m_;
    Options opt_;
    int iter_ = 0;
    Vector low_, upp_, xold1_, xold2_;
    bool relaxed_ = false;
};

}  // namespace topo

#endif
