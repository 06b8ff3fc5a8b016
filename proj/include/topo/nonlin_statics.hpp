#ifndef TOPO_NONLIN_STATICS_HPP
#define TOPO_NONLIN_STATICS_HPP

#include "topo/active_model.hpp"
#include "topo/problem.hpp"
#include "topo/types.hpp"

namespace topo {

/// Second Piola-Kirchhoff stress of the modified Saint-Venant model
/// W = lambda/2 (J-1)^2 + mu tr(E^2), in 2D:
/// S = lambda J (J-1) C^{-1} + 2 mu E, with the material tangent dS/dE in
/// Voigt order [11, 22, 12] against engineering strain (E11, E22, 2 E12).
/// Throws AnalysisFailureError when det F <= 0.
struct Pk2Result {
    Eigen::Matrix2d S;
    Eigen::Matrix3d tangent;
};
Pk2Result pk2_stress(const Eigen::Matrix2d& F, Real lambda, Real mu);

/// Energy density of the same model (test hook for differentiating W).
Real strain_energy_density(const Eigen::Matrix2d& F, Real lambda, Real mu);

/// Internal force and tangent of the total-Lagrangian Q4 model on the
/// active set. `stiffness_scale` holds E(rho_e)/E0 per element. Outputs are
/// optional; the residual is r = f_int - f_ext with f_ext supplied by the
/// caller. Throws AnalysisFailureError naming the first inverted element.
void residual_and_tangent(const StructuredMesh& mesh, const ActiveModel& am,
                          const Vector& stiffness_scale, const MaterialConstants& mat,
                          Real thickness, const Vector& u_full, Vector* f_int_full,
                          SpMat* tangent_reduced);

struct NewtonResult {
    Vector u;           // full-length converged displacement
    int total_iterations = 0;
    Real final_residual = 0.0;  // relative
};

/// Incremental Newton-Raphson with adaptive halving of the load step (at
/// most 4 halvings; step doubles back after two clean increments).
/// Throws AnalysisFailureError carrying the last residual on failure.
NewtonResult newton_solve(const StructuredMesh& mesh, const ActiveModel& am,
                          const Vector& stiffness_scale, const MaterialConstants& mat,
                          Real thickness, const Vector& f_ext_full, const NewtonSettings& settings);

/// End compliance g0 = f_ext^T u with the adjoint sensitivity
/// dg0/drho_e = a^T dr/drho_e, K_T a = -f_ext at the converged state.
struct NonlinearObjective {
    Real value = 0.0;
    Vector dg_drho;
    Vector u;
};
NonlinearObjective end_compliance_objective(const StructuredMesh& mesh, const ActiveModel& am,
                                            const Vector& rho, const InterpolationLaw& law,
                                            const MaterialConstants& mat, Real thickness,
                                            const Vector& f_ext_full,
                                            const NewtonSettings& settings);

}  // namespace topo

#endif
