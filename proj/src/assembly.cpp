#include "topo/assembly.hpp"

#include "topo/element.hpp"

#include <string>

namespace topo {

void element_reduced_dofs(const StructuredMesh& mesh, const ActiveModel& am, int e,
                          std::vector<int>& out) {
    const int npe = mesh.nodes_per_elem();
    out.resize(npe * mesh.dofs_per_node);
    int k = 0;
    for (int a = 0; a < npe; ++a) {
        const int node = mesh.conn(e, a);
        for (int c = 0; c < mesh.dofs_per_node; ++c) out[k++] = am.full_to_red[mesh.dof(node, c)];
    }
}

void gather_element(const StructuredMesh& mesh, int e, const Vector& full, Vector& out) {
    const int npe = mesh.nodes_per_elem();
    out.resize(npe * mesh.dofs_per_node);
    int k = 0;
    for (int a = 0; a < npe; ++a)
        for (int c = 0; c < mesh.dofs_per_node; ++c) out[k++] = full[mesh.dof(mesh.conn(e, a), c)];
}

SpMat assemble_stiffness(const StructuredMesh& mesh, const ActiveModel& am, const Vector& moduli,
                         const Matrix& Ke0) {
    if (moduli.size() != mesh.elem_count) throw InvalidSpecError("assemble_stiffness: moduli length");
    if (static_cast<int>(am.element_active.size()) != mesh.elem_count)
        throw InvalidSpecError("assemble_stiffness: inconsistent active model");
    const int ed = mesh.nodes_per_elem() * mesh.dofs_per_node;

    std::vector<Triplet> trips;
    trips.reserve(static_cast<size_t>(mesh.elem_count) * ed * ed / 2);
    std::vector<int> dofs;
    for (int e = 0; e < mesh.elem_count; ++e) {
        if (!am.element_active[e]) continue;
        const Real Ee = moduli[e];
        if (Ee == 0.0) continue;
        element_reduced_dofs(mesh, am, e, dofs);
        for (int i = 0; i < ed; ++i) {
            if (dofs[i] < 0) continue;
            for (int j = 0; j < ed; ++j) {
                if (dofs[j] < 0) continue;
                trips.emplace_back(dofs[i], dofs[j], Ee * Ke0(i, j));
            }
        }
    }
    SpMat K(am.n_active, am.n_active);
    K.setFromTriplets(trips.begin(), trips.end());
    return K;
}

void add_springs(SpMat& K, const StructuredMesh& mesh, const ActiveModel& am,
                 const std::vector<Spring>& springs) {
    for (const auto& s : springs) {
        const int d = mesh.dof(s.node, s.comp);
        const int r = am.full_to_red[d];
        if (r < 0)
            throw DisconnectionError("spring attached to eliminated or fixed DOF " + std::to_string(d));
        K.coeffRef(r, r) += s.stiffness;
    }
}

SpMat assemble_mass(const StructuredMesh& mesh, const ActiveModel& am, const Vector& rho,
                    Real rho0, const std::vector<PointMass>& point_masses, Real thickness,
                    bool lumped) {
    const ElementKind kind =
        mesh.dim == 2 ? ElementKind::q4_plane_stress : ElementKind::h8;
    const Matrix Me0 = lumped ? element_mass_lumped(kind, mesh.h, thickness)
                              : element_mass(kind, mesh.h, thickness);
    const int ed = mesh.nodes_per_elem() * mesh.dofs_per_node;

    std::vector<Triplet> trips;
    std::vector<int> dofs;
    for (int e = 0; e < mesh.elem_count; ++e) {
        if (!am.element_active[e]) continue;
        const Real dens = rho0 * rho[e];
        if (dens == 0.0) continue;
        element_reduced_dofs(mesh, am, e, dofs);
        for (int i = 0; i < ed; ++i) {
            if (dofs[i] < 0) continue;
            for (int j = 0; j < ed; ++j) {
                if (dofs[j] < 0) continue;
                const Real v = dens * Me0(i, j);
                if (v != 0.0) trips.emplace_back(dofs[i], dofs[j], v);
            }
        }
    }
    for (const auto& pm : point_masses) {
        for (int c : pm.comps) {
            const int d = mesh.dof(pm.node, c);
            const int r = am.full_to_red[d];
            if (r < 0)
                throw DisconnectionError("point mass on eliminated or fixed DOF " + std::to_string(d));
            trips.emplace_back(r, r, pm.magnitude);
        }
    }
    SpMat M(am.n_active, am.n_active);
    M.setFromTriplets(trips.begin(), trips.end());
    return M;
}

namespace {

// v^T G_e v for the 2D geometric form at one Gauss point decomposes into the
// stress contracted with sigma-independent mode products m = (m_xx, m_yy, m_xy).
Eigen::Vector3d mode_products(const Eigen::Matrix<Real, 2, 4>& grad,
                              const Eigen::Matrix<Real, 8, 1>& v) {
    Eigen::Vector2d gx = Eigen::Vector2d::Zero();  // grad of v_x
    Eigen::Vector2d gy = Eigen::Vector2d::Zero();  // grad of v_y
    for (int a = 0; a < 4; ++a) {
        gx += grad.col(a) * v[2 * a];
        gy += grad.col(a) * v[2 * a + 1];
    }
    return {gx[0] * gx[0] + gy[0] * gy[0], gx[1] * gx[1] + gy[1] * gy[1],
            gx[0] * gx[1] + gy[0] * gy[1]};
}

}  // namespace

SpMat stress_stiffness(const StructuredMesh& mesh, const ActiveModel& am, const Vector& sigma_scale,
                       const Vector& u_full, const MaterialConstants& mat, Real thickness) {
    if (mesh.dim != 2) throw InvalidSpecError("stress_stiffness: implemented for 2D meshes");
    const auto D = plane_stress_matrix(mat.E0, mat.nu);
    const auto quad = q4_quadrature(mesh.h);

    std::vector<Triplet> trips;
    std::vector<int> dofs;
    Eigen::Matrix<Real, 8, 1> ue;
    for (int e = 0; e < mesh.elem_count; ++e) {
        if (!am.element_active[e] || sigma_scale[e] == 0.0) continue;
        const int npe = 4;
        for (int a = 0; a < npe; ++a)
            for (int c = 0; c < 2; ++c) ue[2 * a + c] = u_full[mesh.dof(mesh.conn(e, a), c)];

        Matrix Ge = Matrix::Zero(8, 8);
        for (int g = 0; g < Q4Quadrature::n_points; ++g) {
            const auto B = q4_strain_matrix(quad.grad[g]);
            const Eigen::Vector3d sig = sigma_scale[e] * (D * (B * ue));
            Eigen::Matrix2d S;
            S << sig[0], sig[2], sig[2], sig[1];
            const Real w = quad.weight[g] * thickness;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    const Real gab = w * quad.grad[g].col(a).dot(S * quad.grad[g].col(b));
                    for (int c = 0; c < 2; ++c) Ge(2 * a + c, 2 * b + c) += gab;
                }
        }
        element_reduced_dofs(mesh, am, e, dofs);
        for (int i = 0; i < 8; ++i) {
            if (dofs[i] < 0) continue;
            for (int j = 0; j < 8; ++j)
                if (dofs[j] >= 0) trips.emplace_back(dofs[i], dofs[j], Ge(i, j));
        }
    }
    SpMat G(am.n_active, am.n_active);
    G.setFromTriplets(trips.begin(), trips.end());
    return G;
}

Vector stress_stiffness_mode_contraction(const StructuredMesh& mesh, const ActiveModel& am,
                                         const Vector& sigma_scale, const Vector& v_full,
                                         const MaterialConstants& mat, Real thickness) {
    if (mesh.dim != 2)
        throw InvalidSpecError("stress_stiffness_mode_contraction: implemented for 2D meshes");
    const auto D = plane_stress_matrix(mat.E0, mat.nu);
    const auto quad = q4_quadrature(mesh.h);

    Vector h = Vector::Zero(mesh.total_dofs());
    Eigen::Matrix<Real, 8, 1> ve;
    for (int e = 0; e < mesh.elem_count; ++e) {
        if (!am.element_active[e] || sigma_scale[e] == 0.0) continue;
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 2; ++c) ve[2 * a + c] = v_full[mesh.dof(mesh.conn(e, a), c)];

        Eigen::Matrix<Real, 8, 1> he = Eigen::Matrix<Real, 8, 1>::Zero();
        for (int g = 0; g < Q4Quadrature::n_points; ++g) {
            const auto B = q4_strain_matrix(quad.grad[g]);
            Eigen::Vector3d m = mode_products(quad.grad[g], ve);
            // v^T G v = sigma . (m_xx, m_yy, 2 m_xy); sigma = scale * D B u
            m[2] *= 2.0;
            he += quad.weight[g] * thickness * sigma_scale[e] * (B.transpose() * (D * m));
        }
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 2; ++c) h[mesh.dof(mesh.conn(e, a), c)] += he[2 * a + c];
    }
    return h;
}

}  // namespace topo
