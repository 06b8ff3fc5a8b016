#include "topo/lin_statics.hpp"

#include "topo/assembly.hpp"
#include "topo/element.hpp"
#include "topo/solve.hpp"

namespace topo {

namespace {

Matrix base_element_matrix(const ProblemSpec& p) {
    return p.mesh.dim == 2
               ? element_stiffness(ElementKind::q4_plane_stress, p.mesh.h, p.mat.nu, p.thickness)
               : element_stiffness(ElementKind::h8, p.mesh.h, p.mat.nu);
}

}  // namespace

Vector elemental_energies(const StructuredMesh& mesh, const Matrix& Ke0, const Vector& u_full) {
    Vector s(mesh.elem_count);
    Vector ue;
    for (int e = 0; e < mesh.elem_count; ++e) {
        gather_element(mesh, e, u_full, ue);
        s[e] = ue.dot(Ke0 * ue);
    }
    return s;
}

ObjectiveResult compliance_objective(const ProblemSpec& p, const Vector& rho,
                                     const InterpolationLaw& law, const ActiveModel& am) {
    const Matrix Ke0 = base_element_matrix(p);
    Vector E, dE;
    interpolate(law, rho, E, dE);
    for (int e = 0; e < p.mesh.elem_count; ++e)
        if (!am.element_active[e]) E[e] = dE[e] = 0.0;

    const SpMat K = assemble_stiffness(p.mesh, am, E, Ke0);
    const Vector f_full = p.bcs.load_vector(p.mesh);
    const Vector f = reduce_vector(am, f_full);
    // a load on a removed region must fail loudly, not drop silently
    for (const auto& l : p.bcs.loads)
        if (am.full_to_red[p.mesh.dof(l.node, l.comp)] < 0)
            throw DisconnectionError("load applied to eliminated or fixed DOF");

    const Vector u_red = solve_linear(K, f);

    ObjectiveResult res;
    res.solution.u = expand_vector(am, u_red);
    res.solution.compliance = f.dot(u_red);
    res.value = res.solution.compliance;
    res.solution.strain_energy_nd = elemental_energies(p.mesh, Ke0, res.solution.u);
    res.solution.strain_energy = E.cwiseProduct(res.solution.strain_energy_nd);
    res.dg_drho = Vector::Zero(p.mesh.elem_count);
    for (int e = 0; e < p.mesh.elem_count; ++e)
        if (am.element_active[e]) res.dg_drho[e] = -dE[e] * res.solution.strain_energy_nd[e];
    return res;
}

ObjectiveResult inverter_objective(const ProblemSpec& p, const Vector& rho,
                                   const InterpolationLaw& law, const ActiveModel& am) {
    const Matrix Ke0 = base_element_matrix(p);
    Vector E, dE;
    interpolate(law, rho, E, dE);
    for (int e = 0; e < p.mesh.elem_count; ++e)
        if (!am.element_active[e]) E[e] = dE[e] = 0.0;

    SpMat K = assemble_stiffness(p.mesh, am, E, Ke0);
    add_springs(K, p.mesh, am, p.bcs.springs);

    const int out_dof = p.mesh.dof(p.output_node, p.output_comp);
    const int out_red = am.full_to_red[out_dof];
    if (out_red < 0) throw DisconnectionError("inverter output DOF eliminated");
    for (const auto& l : p.bcs.loads)
        if (am.full_to_red[p.mesh.dof(l.node, l.comp)] < 0)
            throw DisconnectionError("input load applied to eliminated or fixed DOF");

    const Vector f = reduce_vector(am, p.bcs.load_vector(p.mesh));
    LinearSolver solver(K);
    const Vector u_red = solver.solve(f);
    Vector l = Vector::Zero(am.n_active);
    l[out_red] = 1.0;
    const Vector a_red = solver.solve(-l);

    ObjectiveResult res;
    res.solution.u = expand_vector(am, u_red);
    res.solution.compliance = f.dot(u_red);
    res.value = u_red[out_red];
    res.solution.strain_energy_nd = elemental_energies(p.mesh, Ke0, res.solution.u);
    res.solution.strain_energy = E.cwiseProduct(res.solution.strain_energy_nd);

    // dg/drho_e = a^T dK/drho_e u, element-local since springs are
    // density-independent
    const Vector a_full = expand_vector(am, a_red);
    res.dg_drho = Vector::Zero(p.mesh.elem_count);
    Vector ue, ae;
    for (int e = 0; e < p.mesh.elem_count; ++e) {
        if (!am.element_active[e]) continue;
        gather_element(p.mesh, e, res.solution.u, ue);
        gather_element(p.mesh, e, a_full, ae);
        res.dg_drho[e] = dE[e] * ae.dot(Ke0 * ue);
    }
    return res;
}

}  // namespace topo
