#include "topo/active_model.hpp"

#include <algorithm>
#include <cmath>

namespace topo {

bool ActiveModel::all_active() const {
    return std::all_of(element_active.begin(), element_active.end(),
                       [](uint8_t a) { return a != 0; });
}

std::pair<Vector, std::vector<uint8_t>> detect_and_zero(const Vector& rho, Real rho_t) {
    if (rho_t < 0.0 || rho_t >= 1.0) throw InvalidSpecError("detect_and_zero: threshold outside [0,1)");
    Vector out = rho;
    std::vector<uint8_t> active(rho.size(), 1);
    for (Eigen::Index e = 0; e < rho.size(); ++e)
        if (rho[e] <= rho_t) {
            out[e] = 0.0;
            active[e] = 0;
        }
    return {std::move(out), std::move(active)};
}

ActiveModel build_active_model(const StructuredMesh& mesh, const std::vector<uint8_t>& element_active,
                               const std::vector<uint8_t>& fixed_dofs, Real rho_t) {
    if (static_cast<int>(element_active.size()) != mesh.elem_count)
        throw InvalidSpecError("build_active_model: mask length mismatch");
    const int ndof = mesh.total_dofs();
    if (static_cast<int>(fixed_dofs.size()) != ndof)
        throw InvalidSpecError("build_active_model: fixed mask length mismatch");

    ActiveModel am;
    am.rho_t = rho_t;
    am.element_active = element_active;
    am.dof_eliminated.assign(ndof, 1);

    std::vector<uint8_t> node_touched(mesh.node_count, 0);
    const int npe = mesh.nodes_per_elem();
    for (int e = 0; e < mesh.elem_count; ++e) {
        if (!element_active[e]) continue;
        for (int a = 0; a < npe; ++a) node_touched[mesh.conn(e, a)] = 1;
    }
    for (int n = 0; n < mesh.node_count; ++n)
        if (node_touched[n])
            for (int c = 0; c < mesh.dofs_per_node; ++c) am.dof_eliminated[mesh.dof(n, c)] = 0;

    am.full_to_red.assign(ndof, -1);
    am.red_to_full.clear();
    for (int d = 0; d < ndof; ++d) {
        if (fixed_dofs[d] || am.dof_eliminated[d]) continue;
        am.full_to_red[d] = static_cast<int>(am.red_to_full.size());
        am.red_to_full.push_back(d);
    }
    am.n_active = static_cast<int>(am.red_to_full.size());
    return am;
}

ActiveModel full_active_model(const StructuredMesh& mesh, const std::vector<uint8_t>& fixed_dofs) {
    return build_active_model(mesh, std::vector<uint8_t>(mesh.elem_count, 1), fixed_dofs);
}

Vector reduce_vector(const ActiveModel& am, const Vector& full) {
    if (full.size() != static_cast<Eigen::Index>(am.full_to_red.size()))
        throw InvalidSpecError("reduce_vector: length mismatch");
    Vector red(am.n_active);
    for (int r = 0; r < am.n_active; ++r) red[r] = full[am.red_to_full[r]];
    return red;
}

Vector expand_vector(const ActiveModel& am, const Vector& reduced) {
    if (reduced.size() != am.n_active) throw InvalidSpecError("expand_vector: length mismatch");
    Vector full = Vector::Zero(am.full_to_red.size());
    for (int r = 0; r < am.n_active; ++r) full[am.red_to_full[r]] = reduced[r];
    return full;
}

ReintroductionDelta reintroduction_delta(const ActiveModel& previous, const ActiveModel& current) {
    if (previous.element_active.size() != current.element_active.size())
        throw InvalidSpecError("reintroduction_delta: mesh mismatch");
    ReintroductionDelta d;
    for (size_t e = 0; e < current.element_active.size(); ++e) {
        if (current.element_active[e] && !previous.element_active[e]) ++d.reintroduced;
        if (!current.element_active[e] && previous.element_active[e]) ++d.removed;
    }
    return d;
}

Real ThresholdSchedule::value_at(int iteration) const {
    // 1-based iterations; the first `interval` iterations past start_iter run
    // at the initial value.
    if (increment <= 0.0 || interval <= 0) return std::min(initial, cap);
    const int steps = std::max(0, iteration - 1 - start_iter) / interval;
    return std::min(initial + steps * increment, cap);
}

}  // namespace topo
