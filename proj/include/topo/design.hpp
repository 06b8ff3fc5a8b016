#ifndef TOPO_DESIGN_HPP
#define TOPO_DESIGN_HPP

#include "topo/filter.hpp"
#include "topo/types.hpp"

namespace topo {

/// The four design-to-density transforms compared in the propagation study.
enum class Scheme {
    sensitivity_filter,  // A1: rho = phi, filtered sensitivities
    density_filter,      // A2: rho = filter(phi)
    threshold,           // A3: rho = smoothed step of filter(phi)
    hpm                  // A4: rho = relaxed Heaviside of filter(phi)
};

/// Design variables, filtered intermediates, and relative densities at one
/// iteration, together with the projection parameters in force.
struct DesignState {
    Vector phi;
    Vector mu;
    Vector rho;
    Vector drho_dmu;  // projection linearization at mu
    Real beta = 0.0;
    Real eta = 3.0;
    Real threshold = 0.5;  // A3 only
    Scheme scheme = Scheme::hpm;
};

/// phi -> mu -> rho per scheme; fills mu, rho, drho_dmu.
void forward_map(DesignState& s, const FilterOperator& f);

/// dg/drho -> dg/dphi per scheme (A1 uses the sensitivity filter).
Vector backprop_to_phi(const DesignState& s, const FilterOperator& f, const Vector& dg_drho);

/// V = mean(rho); the gradient w.r.t. each rho_e is the constant 1/m.
Real volume_fraction(const Vector& rho);

/// m_ND = sum 4 rho (1-rho) / m.
Real non_discreteness(const Vector& rho);

}  // namespace topo

#endif
