#include "topo/mesh.hpp"

namespace topo {

int StructuredMesh::node_id(int ix, int iy, int iz) const {
    const int nny = dims[1] + 1;
    if (dim == 2) return ix * nny + iy;
    const int nnz = dims[2] + 1;
    return (ix * nny + iy) * nnz + iz;
}

int StructuredMesh::elem_id(int ix, int iy, int iz) const {
    if (dim == 2) return ix * dims[1] + iy;
    return (ix * dims[1] + iy) * dims[2] + iz;
}

std::array<int, 3> StructuredMesh::elem_index(int e) const {
    if (dim == 2) return {e / dims[1], e % dims[1], 0};
    const int nyz = dims[1] * dims[2];
    return {e / nyz, (e % nyz) / dims[2], e % dims[2]};
}

Eigen::Vector3d StructuredMesh::centroid(int e) const {
    const auto idx = elem_index(e);
    return {(idx[0] + 0.5) * h, (idx[1] + 0.5) * h, dim == 3 ? (idx[2] + 0.5) * h : 0.0};
}

Eigen::Vector3d StructuredMesh::node_coords(int node) const {
    if (dim == 2) {
        const int nny = dims[1] + 1;
        return {Real(node / nny) * h, Real(node % nny) * h, 0.0};
    }
    const int nny = dims[1] + 1, nnz = dims[2] + 1;
    const int ix = node / (nny * nnz);
    const int iy = (node % (nny * nnz)) / nnz;
    const int iz = node % nnz;
    return {ix * h, iy * h, iz * h};
}

StructuredMesh build_mesh(std::span<const int> dims, Real h_e, int dofs_per_node) {
    if (dims.size() != 2 && dims.size() != 3)
        throw InvalidSpecError("build_mesh: need 2 or 3 dimensions");
    for (int d : dims)
        if (d < 1) throw InvalidSpecError("build_mesh: all dimensions must be >= 1");
    if (h_e <= 0.0) throw InvalidSpecError("build_mesh: element edge length must be positive");

    StructuredMesh m;
    m.dim = static_cast<int>(dims.size());
    m.dims = {dims[0], dims[1], m.dim == 3 ? dims[2] : 0};
    m.h = h_e;
    m.dofs_per_node = dofs_per_node;

    if (m.dim == 2) {
        m.elem_count = dims[0] * dims[1];
        m.node_count = (dims[0] + 1) * (dims[1] + 1);
        m.conn.resize(m.elem_count, 4);
        for (int ix = 0; ix < dims[0]; ++ix)
            for (int iy = 0; iy < dims[1]; ++iy) {
                const int e = m.elem_id(ix, iy);
                m.conn(e, 0) = m.node_id(ix, iy);
                m.conn(e, 1) = m.node_id(ix + 1, iy);
                m.conn(e, 2) = m.node_id(ix + 1, iy + 1);
                m.conn(e, 3) = m.node_id(ix, iy + 1);
            }
    } else {
        m.elem_count = dims[0] * dims[1] * dims[2];
        m.node_count = (dims[0] + 1) * (dims[1] + 1) * (dims[2] + 1);
        m.conn.resize(m.elem_count, 8);
        for (int ix = 0; ix < dims[0]; ++ix)
            for (int iy = 0; iy < dims[1]; ++iy)
                for (int iz = 0; iz < dims[2]; ++iz) {
                    const int e = m.elem_id(ix, iy, iz);
                    m.conn(e, 0) = m.node_id(ix, iy, iz);
                    m.conn(e, 1) = m.node_id(ix + 1, iy, iz);
                    m.conn(e, 2) = m.node_id(ix + 1, iy + 1, iz);
                    m.conn(e, 3) = m.node_id(ix, iy + 1, iz);
                    m.conn(e, 4) = m.node_id(ix, iy, iz + 1);
                    m.conn(e, 5) = m.node_id(ix + 1, iy, iz + 1);
                    m.conn(e, 6) = m.node_id(ix + 1, iy + 1, iz + 1);
                    m.conn(e, 7) = m.node_id(ix, iy + 1, iz + 1);
                }
    }
    return m;
}

}  // namespace topo
