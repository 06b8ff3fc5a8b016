#ifndef TOPO_RUN_LOOP_HPP
#define TOPO_RUN_LOOP_HPP

#include "topo/problem.hpp"
#include "topo/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace topo {

struct IterationRecord {
    int k = 0;
    Real g0 = 0.0;
    Real volume = 0.0;
    Real constraint2 = 0.0;  // buckling pre-buckling compliance, else 0
    Real tau_phi = 0.0;
    Real tau_g0 = 0.0;
    int n_active = 0;
    int reduced_dim = 0;
    int reintroduced = 0;
    int removed = 0;
    Real eta = 0.0;
    Real beta = 0.0;
    Real rho_t = 0.0;
    int phi_rat_flags = 0;   // modes with strain-energy ratio > 0.5
    Real eigen_min = 0.0;    // omega_1 or lambda_1 for eigen problems
    Real ks_bound = 0.0;     // Lambda^{-1}
    Real seconds = 0.0;
};

struct RunResult {
    DesignState state;  // final design
    std::vector<IterationRecord> records;
    bool converged = false;
    bool failed = false;
    std::string failure;
    int failure_exit_code = 0;  // 3 analysis failure, 4 disconnection
};

using IterationCallback = std::function<void(const IterationRecord&, const DesignState&)>;

/// One forward analysis at a fixed design point: phi -> (mu, rho) ->
/// detection/elimination -> solve -> objective and its design-space
/// gradient. Shared by the driver and the finite-difference audits.
struct ObjectiveEvaluation {
    Real g0 = 0.0;
    Vector dg0_dphi;
    Real compliance = 0.0;
};
ObjectiveEvaluation evaluate_design(const ProblemSpec& problem, const FilterOperator& filter,
                                    const Vector& phi, Real eta, Real beta, Real rho_t);

/// The per-iteration driver: (1) threshold-zero densities, (2) fictitious
/// nodal boundary conditions, (3) forward solve, (4) sensitivity analysis,
/// (5) OC or MMA design change, (6) projection of the new design onto
/// densities for the next pass. Continuation schedules update at iteration
/// boundaries before step (1). On a forward-analysis failure the iteration
/// is marked failed and the loop stops with a diagnostic.
RunResult run_loop(const ProblemSpec& problem, const IterationCallback& on_iteration = {});

}  // namespace topo

#endif
