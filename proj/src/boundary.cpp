#include "topo/boundary.hpp"

namespace topo {

void BoundarySpec::validate(const StructuredMesh& mesh) const {
    auto check_node = [&](int node, int comp, const char* what) {
        if (node < 0 || node >= mesh.node_count || comp < 0 || comp >= mesh.dofs_per_node)
            throw InvalidSpecError(std::string(what) + ": node or component out of range");
    };
    for (const auto& f : fixed) check_node(f.node, f.comp, "fixed DOF");
    for (const auto& l : loads) check_node(l.node, l.comp, "load");
    for (const auto& s : springs) {
        check_node(s.node, s.comp, "spring");
        if (s.stiffness <= 0.0) throw InvalidSpecError("spring: stiffness must be positive");
    }
    for (const auto& pm : point_masses) {
        if (pm.magnitude < 0.0) throw InvalidSpecError("point mass: magnitude must be nonnegative");
        for (int c : pm.comps) check_node(pm.node, c, "point mass");
    }
}

std::vector<uint8_t> BoundarySpec::fixed_mask(const StructuredMesh& mesh) const {
    std::vector<uint8_t> mask(mesh.total_dofs(), 0);
    for (const auto& f : fixed) mask[mesh.dof(f.node, f.comp)] = 1;
    return mask;
}

Vector BoundarySpec::load_vector(const StructuredMesh& mesh) const {
    Vector f = Vector::Zero(mesh.total_dofs());
    for (const auto& l : loads) f[mesh.dof(l.node, l.comp)] += l.value;
    return f;
}

}  // namespace topo
