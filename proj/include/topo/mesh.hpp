#ifndef TOPO_MESH_HPP
#define TOPO_MESH_HPP

#include "topo/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace topo {

/// Uniform structured grid of Q4 (2D) or H8 (3D) elements.
///
/// Elements and nodes are numbered row-major over the dimension tuple:
/// in 2D element (ix,iy) has id ix*ny + iy, node (ix,iy) has id
/// ix*(ny+1) + iy; the 3D ids append a fastest-running z index. Element
/// connectivity lists the corner nodes counterclockwise on the bottom
/// face, then (in 3D) the top face in the same order.
struct StructuredMesh {
    std::array<int, 3> dims{0, 0, 0};  // element counts, dims[2]=0 in 2D
    int dim = 2;                       // spatial dimension
    Real h = 1.0;                      // element edge length
    int elem_count = 0;
    int node_count = 0;
    int dofs_per_node = 2;
    Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic> conn;  // m x (4|8)

    int nodes_per_elem() const { return dim == 2 ? 4 : 8; }
    int total_dofs() const { return node_count * dofs_per_node; }

    int node_id(int ix, int iy, int iz = 0) const;
    int elem_id(int ix, int iy, int iz = 0) const;
    std::array<int, 3> elem_index(int e) const;

    /// Centroid coordinates of element e.
    Eigen::Vector3d centroid(int e) const;
    /// Coordinates of node id.
    Eigen::Vector3d node_coords(int node) const;

    int dof(int node, int comp) const { return node * dofs_per_node + comp; }
};

/// Builds the mesh, its connectivity and the node->DOF map.
/// Throws InvalidSpecError for non-positive dimensions or edge length.
StructuredMesh build_mesh(std::span<const int> dims, Real h_e, int dofs_per_node);

inline StructuredMesh build_mesh_2d(int nx, int ny, Real h_e = 1.0) {
    const int d[2] = {nx, ny};
    return build_mesh(d, h_e, 2);
}

inline StructuredMesh build_mesh_3d(int nx, int ny, int nz, Real h_e = 1.0) {
    const int d[3] = {nx, ny, nz};
    return build_mesh(d, h_e, 3);
}

}  // namespace topo

#endif
