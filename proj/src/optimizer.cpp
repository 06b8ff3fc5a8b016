#include "topo/optimizer.hpp"

#include <cmath>

namespace topo {

Vector oc_update(const Vector& phi, const Vector& dg0_dphi, const Vector& dv_dphi, Real vmax,
                 Real move_limit, Real damping,
                 const std::function<Real(const Vector&)>& volume_of) {
    if ((dg0_dphi.array() >= 0.0).all())
        throw InvalidSpecError("oc_update: no negative sensitivity, degenerate update");
    if ((dv_dphi.array() <= 0.0).any())
        throw InvalidSpecError("oc_update: volume gradient must be positive");

    const Eigen::ArrayXd x = phi.array();
    auto candidate = [&](Real lambda) -> Vector {
        Eigen::ArrayXd be = (-dg0_dphi.array() / (lambda * dv_dphi.array())).max(0.0).pow(damping);
        Eigen::ArrayXd xnew = x * be;
        xnew = xnew.min(x + move_limit).max(x - move_limit).min(1.0).max(0.0);
        return xnew.matrix();
    };

    Real l1 = 1e-10, l2 = 1e10;
    Vector best = candidate(l2);
    if (volume_of(best) > vmax) return best;  // even the stingiest multiplier overfills: clamp-bound
    best = candidate(l1);
    if (volume_of(best) <= vmax) return best;  // constraint inactive

    while ((l2 - l1) / (l1 + l2) > 1e-14) {
        const Real lmid = 0.5 * (l1 + l2);
        best = candidate(lmid);
        const Real v = volume_of(best);
        if (std::abs(v - vmax) <= 1e-10) return best;
        (v > vmax ? l1 : l2) = lmid;
    }
    return best;
}

ConvergenceResult convergence_check(const Vector& phi, const Vector& phi_prev,
                                    const std::vector<Real>& g0_history, Real tol_phi,
                                    Real tol_g0) {
    if (g0_history.empty()) throw InvalidSpecError("convergence_check: empty objective history");
    if (g0_history.front() == 0.0)
        throw InvalidSpecError("convergence_check: zero initial objective, cannot normalize");
    ConvergenceResult r;
    r.tau_phi = (phi - phi_prev).norm() / std::sqrt(Real(phi.size()));
    if (g0_history.size() >= 2) {
        const Real gk = g0_history.back();
        const Real gk1 = g0_history[g0_history.size() - 2];
        r.tau_g0 = (gk - gk1) / g0_history.front();
    } else {
        r.tau_g0 = std::numeric_limits<Real>::infinity();
    }
    r.converged = r.tau_phi < tol_phi && r.tau_g0 < tol_g0;
    return r;
}

}  // namespace topo
