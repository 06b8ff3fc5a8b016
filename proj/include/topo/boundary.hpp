#ifndef TOPO_BOUNDARY_HPP
#define TOPO_BOUNDARY_HPP

#include "topo/mesh.hpp"
#include "topo/types.hpp"

#include <vector>

namespace topo {

struct FixedDof {
    int node;
    int comp;
};

struct PointLoad {
    int node;
    int comp;
    Real value;
};

struct Spring {
    int node;
    int comp;
    Real stiffness;
};

struct PointMass {
    int node;
    Real magnitude;
    std::vector<int> comps;  // active components
};

/// Supports, loads, springs and nonstructural masses for one benchmark.
struct BoundarySpec {
    std::vector<FixedDof> fixed;
    std::vector<PointLoad> loads;
    std::vector<Spring> springs;
    std::vector<PointMass> point_masses;

    void validate(const StructuredMesh& mesh) const;

    /// Full-length boolean mask of structurally fixed DOFs.
    std::vector<uint8_t> fixed_mask(const StructuredMesh& mesh) const;

    /// Full-length load vector.
    Vector load_vector(const StructuredMesh& mesh) const;
};

}  // namespace topo

#endif
