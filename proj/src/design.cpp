#include "topo/design.hpp"

#include "topo/projection.hpp"

namespace topo {

void forward_map(DesignState& s, const FilterOperator& f) {
    switch (s.scheme) {
        case Scheme::sensitivity_filter:
            s.mu = s.phi;
            s.rho = s.phi;
            s.drho_dmu = Vector::Ones(s.phi.size());
            return;
        case Scheme::density_filter: {
            s.mu = apply_filter(f, s.phi);
            s.rho = s.mu;
            s.drho_dmu = Vector::Ones(s.phi.size());
            return;
        }
        case Scheme::threshold: {
            s.mu = apply_filter(f, s.phi);
            auto p = threshold_project(s.mu, s.beta, s.threshold);
            s.rho = std::move(p.rho);
            s.drho_dmu = std::move(p.drho_dmu);
            return;
        }
        case Scheme::hpm: {
            s.mu = apply_filter(f, s.phi);
            auto p = heaviside_project(s.mu, s.beta);
            s.rho = std::move(p.rho);
            s.drho_dmu = std::move(p.drho_dmu);
            return;
        }
    }
}

Vector backprop_to_phi(const DesignState& s, const FilterOperator& f, const Vector& dg_drho) {
    if (s.scheme == Scheme::sensitivity_filter)
        return sensitivity_filter(f, s.phi, dg_drho);
    return chain_rule_backprop(f, s.drho_dmu, dg_drho);
}

Real volume_fraction(const Vector& rho) {
    return rho.size() == 0 ? 0.0 : rho.mean();
}

Real non_discreteness(const Vector& rho) {
    if (rho.size() == 0) return 0.0;
    return 4.0 * rho.dot(Vector::Ones(rho.size()) - rho) / Real(rho.size());
}

}  // namespace topo
