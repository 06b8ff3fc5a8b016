#ifndef TOPO_FILTER_HPP
#define TOPO_FILTER_HPP

#include "topo/mesh.hpp"
#include "topo/types.hpp"

#include <utility>
#include <vector>

namespace topo {

/// Linear hat-weight filter on element centroids. Stores, per element, the
/// neighbors with strictly positive weight w = 1 - d/r_min and the weight sum.
struct FilterOperator {
    Real rmin = 0.0;
    std::vector<std::vector<std::pair<int, Real>>> neighbors;
    Vector weight_sum;

    int size() const { return static_cast<int>(neighbors.size()); }
};

FilterOperator build_filter(const StructuredMesh& mesh, Real rmin);

/// mu_e = sum_i w_ie phi_i / sum_i w_ie. Throws on length mismatch.
Vector apply_filter(const FilterOperator& f, const Vector& phi);

/// Transpose of apply_filter: out_i = sum_e (w_ie / W_e) t_e.
Vector apply_filter_transpose(const FilterOperator& f, const Vector& t);

/// dg/dphi from dg/drho and the projection linearization drho/dmu.
Vector chain_rule_backprop(const FilterOperator& f, const Vector& drho_dmu, const Vector& dg_drho);

/// Classic sensitivity filter: weighted convolution of phi-scaled
/// sensitivities, divided by max(phi_i, gamma) * W_i.
Vector sensitivity_filter(const FilterOperator& f, const Vector& phi, const Vector& dg_drho,
                          Real gamma = 1e-3);

}  // namespace topo

#endif
