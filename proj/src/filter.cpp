#include "topo/filter.hpp"

#include <cmath>

namespace topo {

FilterOperator build_filter(const StructuredMesh& mesh, Real rmin) {
    if (rmin <= 0.0) throw InvalidSpecError("build_filter: rmin must be positive");
    FilterOperator f;
    f.rmin = rmin;
    f.neighbors.resize(mesh.elem_count);
    f.weight_sum.resize(mesh.elem_count);

    // Offset template in index space; centroid spacing equals h.
    const int reach = static_cast<int>(std::ceil(rmin / mesh.h)) - 1;
    struct Offset {
        int di, dj, dk;
        Real w;
    };
    std::vector<Offset> offsets;
    const int kreach = mesh.dim == 3 ? reach : 0;
    for (int di = -reach; di <= reach; ++di)
        for (int dj = -reach; dj <= reach; ++dj)
            for (int dk = -kreach; dk <= kreach; ++dk) {
                const Real dist = mesh.h * std::sqrt(Real(di * di + dj * dj + dk * dk));
                if (dist < rmin) offsets.push_back({di, dj, dk, 1.0 - dist / rmin});
            }

    for (int e = 0; e < mesh.elem_count; ++e) {
        const auto idx = mesh.elem_index(e);
        auto& list = f.neighbors[e];
        list.reserve(offsets.size());
        Real wsum = 0.0;
        for (const auto& o : offsets) {
            const int i = idx[0] + o.di, j = idx[1] + o.dj, k = idx[2] + o.dk;
            if (i < 0 || i >= mesh.dims[0] || j < 0 || j >= mesh.dims[1]) continue;
            if (mesh.dim == 3 && (k < 0 || k >= mesh.dims[2])) continue;
            list.emplace_back(mesh.elem_id(i, j, k), o.w);
            wsum += o.w;
        }
        f.weight_sum[e] = wsum;
    }
    return f;
}

Vector apply_filter(const FilterOperator& f, const Vector& phi) {
    if (phi.size() != f.size()) throw InvalidSpecError("apply_filter: length mismatch");
    Vector mu(phi.size());
    for (int e = 0; e < f.size(); ++e) {
        Real acc = 0.0;
        for (const auto& [i, w] : f.neighbors[e]) acc += w * phi[i];
        mu[e] = acc / f.weight_sum[e];
    }
    return mu;
}

Vector apply_filter_transpose(const FilterOperator& f, const Vector& t) {
    if (t.size() != f.size()) throw InvalidSpecError("apply_filter_transpose: length mismatch");
    Vector out = Vector::Zero(t.size());
    for (int e = 0; e < f.size(); ++e) {
        const Real te = t[e] / f.weight_sum[e];
        for (const auto& [i, w] : f.neighbors[e]) out[i] += w * te;
    }
    return out;
}

Vector chain_rule_backprop(const FilterOperator& f, const Vector& drho_dmu, const Vector& dg_drho) {
    if (drho_dmu.size() != f.size() || dg_drho.size() != f.size())
        throw InvalidSpecError("chain_rule_backprop: length mismatch");
    return apply_filter_transpose(f, drho_dmu.cwiseProduct(dg_drho));
}

Vector sensitivity_filter(const FilterOperator& f, const Vector& phi, const Vector& dg_drho,
                          Real gamma) {
    if (phi.size() != f.size() || dg_drho.size() != f.size())
        throw InvalidSpecError("sensitivity_filter: length mismatch");
    Vector out(phi.size());
    for (int e = 0; e < f.size(); ++e) {
        Real acc = 0.0;
        for (const auto& [i, w] : f.neighbors[e]) acc += w * phi[i] * dg_drho[i];
        out[e] = acc / (std::max(phi[e], gamma) * f.weight_sum[e]);
    }
    return out;
}

}  // namespace topo
