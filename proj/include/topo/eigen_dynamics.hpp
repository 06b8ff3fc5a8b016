#ifndef TOPO_EIGEN_DYNAMICS_HPP
#define TOPO_EIGEN_DYNAMICS_HPP

#include "topo/active_model.hpp"
#include "topo/material.hpp"
#include "topo/mesh.hpp"
#include "topo/solve.hpp"
#include "topo/types.hpp"

#include <optional>

namespace topo {

/// Eigenpairs of A v = theta B v with A symmetric positive definite and B
/// symmetric. Values are ascending; modes are columns, scaled to
/// v^T B v = 1. Only pairs with positive v^T B v are representable (theta >
/// 0), which covers vibration (B = M) and the compressive branch of
/// buckling (B = -G).
struct EigenSolution {
    Vector values;
    Matrix modes;      // reduced-length columns
    Vector residuals;  // ||A v - theta B v|| / ||A v||
};

/// Shift-invert (at zero) blocked subspace iteration with Rayleigh-Ritz on
/// the projected pencil; dense fallback below 2000 DOFs. `warm_start`
/// columns seed the subspace. The residual contract is
/// ||A v - theta B v|| <= tol ||A v|| per returned pair.
/// Throws InvalidSpecError when k exceeds the space dimension and
/// AnalysisFailureError on breakdown / non-convergence.
EigenSolution generalized_eigensolve(const SpMat& A, const SpMat& B, int k, Real tol = 1e-8,
                                     const Matrix* warm_start = nullptr);

struct KSResult {
    Real value = 0.0;         // Lambda
    Vector d_dvalue;          // exact gradient w.r.t. the aggregated values
    Vector weights;           // gradient w.r.t. the inverses x_i = 1/v_i; sums to 1
};

/// Lambda = 1/v_1 + (1/alpha) sum_{i<=q} exp(alpha (1/v_i - 1/v_1)) over the
/// ascending positive `values`; Lambda^{-1} lower-bounds v_1.
/// Throws InvalidSpecError for nonpositive inputs or q > count.
KSResult ks_aggregate(const Vector& values, Real alpha, int q);

struct KsSensitivity {
    Real Lambda = 0.0;
    Vector dLambda_drho;
    bool repeated_eigenvalues = false;  // aggregated pair closer than 1e-6 relative
};

/// KS-of-inverse-frequency sensitivity: per-mode d(omega_i^2)/drho_e =
/// v^T (dK/drho_e - omega_i^2 dM/drho_e) v under M-normalization, chained
/// through omega = sqrt(omega^2) and the exact KS gradient.
KsSensitivity frequency_ks_sensitivity(const StructuredMesh& mesh, const ActiveModel& am,
                                       const EigenSolution& sol, const Matrix& Ke0,
                                       const Vector& dE_drho, Real rho0, Real thickness,
                                       bool lumped, Real alpha, int q);

/// KS-of-inverse-BLF sensitivity with one adjoint solve per aggregated mode:
/// d(lambda_i)/drho_e = v^T (dK + lambda_i dG)/drho_e v - lambda_i a_i^T
/// (dK/drho_e) u, K a_i = v^T d_u G v. Modes must satisfy v^T G v = -1.
KsSensitivity blf_ks_sensitivity(const StructuredMesh& mesh, const ActiveModel& am,
                                 const EigenSolution& sol, const Matrix& Ke0,
                                 const Vector& dE_drho, const Vector& sigma_scale,
                                 const Vector& dsigma_scale, const Vector& u_full,
                                 const MaterialConstants& mat, Real thickness,
                                 const LinearSolver& stiffness_solver, Real alpha, int q);

/// Strain-energy fraction of a mode carried by elements with rho < 0.1;
/// ratios above 0.5 flag an artificial mode. `moduli` holds E(rho_e).
/// Throws InvalidSpecError when the mode carries no strain energy.
Real artificial_mode_ratio(const StructuredMesh& mesh, const Matrix& Ke0, const Vector& moduli,
                           const Vector& rho, const Vector& mode_full, Real rho_cut = 0.1);

}  // namespace topo

#endif
