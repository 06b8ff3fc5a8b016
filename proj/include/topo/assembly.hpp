#ifndef TOPO_ASSEMBLY_HPP
#define TOPO_ASSEMBLY_HPP

#include "topo/active_model.hpp"
#include "topo/boundary.hpp"
#include "topo/material.hpp"
#include "topo/mesh.hpp"
#include "topo/types.hpp"

namespace topo {

/// Collects the reduced indices of one element's DOFs; entries are -1 for
/// fixed or eliminated DOFs.
void element_reduced_dofs(const StructuredMesh& mesh, const ActiveModel& am, int e,
                          std::vector<int>& out);

/// Gathers one element's entries of a full-length DOF vector.
void gather_element(const StructuredMesh& mesh, int e, const Vector& full, Vector& out);

/// Sparse symmetric stiffness on the free active DOFs. Only active elements
/// contribute; `moduli` holds E(rho_e) per element and Ke0 is the
/// unit-modulus element matrix.
SpMat assemble_stiffness(const StructuredMesh& mesh, const ActiveModel& am, const Vector& moduli,
                         const Matrix& Ke0);

/// Adds spring stiffnesses on the reduced diagonal. Throws DisconnectionError
/// when a spring DOF was eliminated by removal.
void add_springs(SpMat& K, const StructuredMesh& mesh, const ActiveModel& am,
                 const std::vector<Spring>& springs);

/// Consistent (or lumped) mass on the free active DOFs; structural part uses
/// the linear law rho_e * rho0, point masses land on their pinned nodes.
/// Throws DisconnectionError when a point-mass DOF was eliminated.
SpMat assemble_mass(const StructuredMesh& mesh, const ActiveModel& am, const Vector& rho,
                    Real rho0, const std::vector<PointMass>& point_masses, Real thickness = 1.0,
                    bool lumped = false);

/// Stress (geometric) stiffness from the linear pre-buckling displacement u
/// (full-length). `sigma_scale` holds sigma(rho_e)/E0 per element, i.e. the
/// stress interpolation relative to the solid modulus.
SpMat stress_stiffness(const StructuredMesh& mesh, const ActiveModel& am, const Vector& sigma_scale,
                       const Vector& u_full, const MaterialConstants& mat, Real thickness = 1.0);

/// Contraction h with h_k = v^T (dG/du_k) v, assembled full-length; used by
/// the buckling adjoint right-hand sides.
Vector stress_stiffness_mode_contraction(const StructuredMesh& mesh, const ActiveModel& am,
                                         const Vector& sigma_scale, const Vector& v_full,
                                         const MaterialConstants& mat, Real thickness = 1.0);

}  // namespace topo

#endif
