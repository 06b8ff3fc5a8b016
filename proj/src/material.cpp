#include "topo/material.hpp"

#include <cmath>

namespace topo {

MaterialConstants MaterialConstants::make(Real E0, Real Emin, Real nu, int dim, Real rho0) {
    if (E0 <= 0.0) throw InvalidSpecError("material: E0 must be positive");
    if (Emin < 0.0 || Emin >= E0) throw InvalidSpecError("material: need 0 <= Emin < E0");
    if (nu <= -1.0 || nu >= 0.5) throw InvalidSpecError("material: Poisson ratio out of range");
    MaterialConstants m;
    m.E0 = E0;
    m.Emin = Emin;
    m.nu = nu;
    m.rho0 = rho0;
    m.mu_bar = E0 / (2.0 * (1.0 + nu));
    if (dim == 2) {
        // plane-stress reduction lambda* = 2 lambda mu / (lambda + 2 mu)
        m.lambda_bar = E0 * nu / (1.0 - nu * nu);
    } else {
        m.lambda_bar = E0 * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    }
    return m;
}

InterpValue interpolate(const InterpolationLaw& law, Real rho) {
    if (law.eta < 0.0) throw InvalidSpecError("interpolate: negative penalization exponent");
    switch (law.kind) {
        case InterpKind::simp: {
            const Real p = std::pow(rho, law.eta);
            const Real dp = law.eta == 0.0 ? 0.0 : law.eta * std::pow(rho, law.eta - 1.0);
            return {law.Emin + (law.E0 - law.Emin) * p, (law.E0 - law.Emin) * dp};
        }
        case InterpKind::ramp: {
            const Real den = 1.0 + law.eta * (1.0 - rho);
            return {law.Emin + (law.E0 - law.Emin) * rho / den,
                    (law.E0 - law.Emin) * (1.0 + law.eta) / (den * den)};
        }
        case InterpKind::stress_power: {
            const Real p = std::pow(rho, law.eta);
            const Real dp = law.eta == 0.0 ? 0.0 : law.eta * std::pow(rho, law.eta - 1.0);
            return {law.E0 * p, law.E0 * dp};
        }
        case InterpKind::linear_mass:
            return {law.rho0 * rho, law.rho0};
    }
    throw InvalidSpecError("interpolate: unknown law");
}

void interpolate(const InterpolationLaw& law, const Vector& rho, Vector& value, Vector& derivative) {
    value.resize(rho.size());
    derivative.resize(rho.size());
    for (Eigen::Index i = 0; i < rho.size(); ++i) {
        const auto v = interpolate(law, rho[i]);
        value[i] = v.value;
        derivative[i] = v.derivative;
    }
}

}  // namespace topo
