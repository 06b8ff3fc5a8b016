#ifndef TOPO_LIN_STATICS_HPP
#define TOPO_LIN_STATICS_HPP

#include "topo/active_model.hpp"
#include "topo/problem.hpp"
#include "topo/types.hpp"

namespace topo {

/// Displacement solution with per-element strain energies. u is full-length
/// with zeros on fixed and eliminated DOFs.
struct LinearSolution {
    Vector u;
    Real compliance = 0.0;
    Vector strain_energy_nd;  // u_e^T Ke0 u_e
    Vector strain_energy;     // E(rho_e) * nondimensional energy
};

struct ObjectiveResult {
    Real value = 0.0;
    Vector dg_drho;
    LinearSolution solution;
};

/// Per-element nondimensional strain energies of a displacement field.
Vector elemental_energies(const StructuredMesh& mesh, const Matrix& Ke0, const Vector& u_full);

/// g0 = u^T f with the self-adjoint sensitivity -dE/drho * u_e^T Ke0 u_e.
/// `law` is the stiffness interpolation in force; removal is encoded in `am`.
ObjectiveResult compliance_objective(const ProblemSpec& p, const Vector& rho,
                                     const InterpolationLaw& law, const ActiveModel& am);

/// g0 = l^T u for the output DOF, springs on the reduced diagonal, adjoint
/// solve K a = -l. Throws DisconnectionError when the output DOF was
/// eliminated.
ObjectiveResult inverter_objective(const ProblemSpec& p, const Vector& rho,
                                   const InterpolationLaw& law, const ActiveModel& am);

}  // namespace topo

#endif
