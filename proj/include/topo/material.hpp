#ifndef TOPO_MATERIAL_HPP
#define TOPO_MATERIAL_HPP

#include "topo/types.hpp"

namespace topo {

/// Isotropic material data shared by all analyses. The Lame parameters are
/// the plane-stress reduced pair in 2D and the standard 3D pair otherwise,
/// so the small-strain limit of the 2D hyperelastic model coincides with
/// the plane-stress linear constitutive matrix.
struct MaterialConstants {
    Real E0 = 1.0;
    Real Emin = 0.0;
    Real nu = 0.3;
    Real rho0 = 1.0;  // solid mass density
    Real lambda_bar = 0.0;
    Real mu_bar = 0.0;

    static MaterialConstants make(Real E0, Real Emin, Real nu, int dim, Real rho0 = 1.0);
};

enum class InterpKind {
    simp,         // E = Emin + (E0-Emin) rho^eta
    ramp,         // E = Emin + (E0-Emin) rho / (1 + eta (1-rho))
    stress_power, // sigma = E0 rho^eta
    linear_mass   // rho_mass = rho0 * rho
};

struct InterpolationLaw {
    InterpKind kind = InterpKind::simp;
    Real E0 = 1.0;
    Real Emin = 0.0;
    Real eta = 3.0;
    Real rho0 = 1.0;
};

struct InterpValue {
    Real value;
    Real derivative;
};

/// Property value and d(property)/d(rho) at one density.
/// Throws InvalidSpecError for a negative penalization exponent.
InterpValue interpolate(const InterpolationLaw& law, Real rho);

/// Vectorized form; out parameters sized like rho.
void interpolate(const InterpolationLaw& law, const Vector& rho, Vector& value, Vector& derivative);

}  // namespace topo

#endif
