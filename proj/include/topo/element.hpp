#ifndef TOPO_ELEMENT_HPP
#define TOPO_ELEMENT_HPP

#include "topo/types.hpp"

#include <array>

namespace topo {

enum class ElementKind { q4_plane_stress, h8 };

/// Plane-stress constitutive matrix, Voigt order [xx, yy, xy].
Eigen::Matrix3d plane_stress_matrix(Real E, Real nu);

/// 3D isotropic constitutive matrix, Voigt order [xx, yy, zz, yz, xz, xy].
Eigen::Matrix<Real, 6, 6> iso3d_matrix(Real E, Real nu);

/// Non-dimensional element stiffness (unit Young's modulus), full 2x2 or
/// 2x2x2 Gauss integration. Q4 includes the out-of-plane thickness.
Matrix element_stiffness(ElementKind kind, Real h_e, Real nu, Real thickness = 1.0);

/// Consistent element mass for unit mass density (Q4 scaled by thickness).
Matrix element_mass(ElementKind kind, Real h_e, Real thickness = 1.0);

/// Row-sum lumped variant of element_mass.
Matrix element_mass_lumped(ElementKind kind, Real h_e, Real thickness = 1.0);

/// Gauss point data for the Q4 reference square [-1,1]^2 (2x2 rule) with
/// physical shape-function gradients for edge length h_e.
struct Q4Quadrature {
    static constexpr int n_points = 4;
    std::array<Eigen::Matrix<Real, 2, 4>, 4> grad;  // dN/dX at each point
    std::array<Real, 4> weight;                     // includes det J
};
Q4Quadrature q4_quadrature(Real h_e);

/// Strain-displacement matrix (3x8) built from physical gradients.
Eigen::Matrix<Real, 3, 8> q4_strain_matrix(const Eigen::Matrix<Real, 2, 4>& grad);

}  // namespace topo

#endif
