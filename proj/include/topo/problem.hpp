#ifndef TOPO_PROBLEM_HPP
#define TOPO_PROBLEM_HPP

#include "topo/active_model.hpp"
#include "topo/boundary.hpp"
#include "topo/design.hpp"
#include "topo/material.hpp"
#include "topo/mesh.hpp"
#include "topo/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace topo {

enum class ProblemKind {
    compliance,            // linear compliance minimization (2D or 3D)
    inverter,              // force inverter, half domain
    nonlinear_compliance,  // total-Lagrangian end compliance
    vibration,             // fundamental-frequency maximization (KS bound)
    buckling               // buckling-load-factor maximization (KS bound)
};

enum class OptimizerKind { oc, mma };

struct NewtonSettings {
    Real tolerance = 1e-8;  // relative on the reduced residual norm
    int max_iterations = 30;
    int increments = 10;
    bool line_search = false;
};

struct EigenSettings {
    int n_pairs = 8;    // computed eigenpairs
    int q = 4;          // aggregated in the KS bound
    Real alpha = 16.0;  // KS aggregation parameter
    bool lumped_mass = false;
    Real tolerance = 1e-8;
};

/// Continuation of a scalar parameter across iterations; the value during
/// iteration k (1-based) is initial + increment*floor((k-1-start)/interval),
/// capped. Zero increment keeps the parameter constant.
struct ContinuationSchedule {
    std::string param;  // "eta" | "beta" | "rho_t"
    Real initial = 0.0;
    Real increment = 0.0;
    int interval = 1;
    Real cap = 0.0;
    int start_iter = 0;

    Real value_at(int iteration) const {
        if (increment <= 0.0 || interval <= 0) return initial;
        const int steps = std::max(0, iteration - 1 - start_iter) / interval;
        return std::min(initial + steps * increment, cap);
    }
};

enum class RemovalMode { none, fixed_threshold, schedule };

/// Everything needed to run one benchmark: geometry, loads, material,
/// interpolation, bounds, and the continuation schedules.
struct ProblemSpec {
    ProblemKind kind = ProblemKind::compliance;
    StructuredMesh mesh;
    BoundarySpec bcs;
    MaterialConstants mat;          // Emin as used by the standard approach
    InterpolationLaw stiffness_law; // Emin set per removal mode by the driver
    InterpolationLaw stress_law;    // buckling only
    Real thickness = 1.0;

    Real vmax = 0.5;
    Scheme scheme = Scheme::hpm;
    Real threshold = 0.5;  // A3 projection threshold
    OptimizerKind optimizer = OptimizerKind::oc;
    Real move_limit = 0.2;
    int max_iterations = 300;
    Real rmin = 2.4;  // physical units

    RemovalMode removal = RemovalMode::none;
    Real rho_t = 0.0;
    ThresholdSchedule rho_t_schedule;

    ContinuationSchedule eta_schedule;
    std::optional<ContinuationSchedule> beta_schedule;

    int output_node = -1;  // inverter objective DOF
    int output_comp = 0;
    Real cmax_factor = 2.5;  // buckling: cmax = factor * compliance of solid design
    NewtonSettings newton;
    EigenSettings eigen;

    Vector initial_phi;  // empty -> uniform vmax

    Real rho_t_at(int iteration) const {
        switch (removal) {
            case RemovalMode::none: return 0.0;
            case RemovalMode::fixed_threshold: return rho_t;
            case RemovalMode::schedule: return rho_t_schedule.value_at(iteration);
        }
        return 0.0;
    }

    bool removal_enabled() const { return removal != RemovalMode::none; }

    /// Stiffness law with the void modulus in force: Emin = 0 under removal,
    /// the material's Emin otherwise.
    InterpolationLaw effective_stiffness_law(Real eta) const {
        InterpolationLaw law = stiffness_law;
        law.eta = eta;
        law.Emin = removal_enabled() ? 0.0 : mat.Emin;
        return law;
    }
};

}  // namespace topo

#endif
