#include "topo/study.hpp"

#include "topo/active_model.hpp"
#include "topo/assembly.hpp"
#include "topo/element.hpp"
#include "topo/lin_statics.hpp"
#include "topo/material.hpp"
#include "topo/solve.hpp"

#include <cmath>

namespace topo {

DesignState build_study_design(Scheme scheme, const FilterOperator& filter,
                               const StudySetup& setup) {
    DesignState s;
    s.scheme = scheme;
    s.beta = (scheme == Scheme::threshold || scheme == Scheme::hpm) ? setup.beta : 0.0;
    s.eta = setup.eta;
    s.threshold = setup.threshold;
    s.phi = Vector::Zero(setup.nx * setup.ny);
    // the HPM variant drops the two layers nearest the centerline, so that
    // filtering + sharp projection recovers the same topology as the others;
    // without projection (beta = 0) no compensation is needed
    const int solid_rows =
        (scheme == Scheme::hpm && setup.beta > 0.0) ? setup.ny / 2 - 2 : setup.ny / 2;
    for (int ix = 0; ix < setup.nx; ++ix)
        for (int iy = 0; iy < solid_rows; ++iy) s.phi[ix * setup.ny + iy] = 1.0;
    forward_map(s, filter);
    return s;
}

PropagationReport propagation_maps(Scheme scheme, const StudySetup& setup) {
    PropagationReport rep;
    rep.scheme = scheme;
    rep.mesh = build_mesh_2d(setup.nx, setup.ny, 1.0);
    const auto filter = build_filter(rep.mesh, setup.rmin_elems * rep.mesh.h);
    DesignState design = build_study_design(scheme, filter, setup);
    rep.rho = design.rho;

    // full-mesh compliance solve; a tiny void modulus regularizes the exactly
    // empty upper half
    const Real emin = 1e-9;
    const InterpolationLaw law{InterpKind::simp, 1.0, emin, setup.eta, 1.0};
    const Matrix Ke0 = element_stiffness(ElementKind::q4_plane_stress, rep.mesh.h, 0.3);
    BoundarySpec bcs;
    for (int iy = 0; iy <= setup.ny; ++iy)
        for (int c = 0; c < 2; ++c) bcs.fixed.push_back({rep.mesh.node_id(0, iy), c});
    bcs.loads.push_back({rep.mesh.node_id(setup.nx, setup.ny / 2), 1, -1.0});

    Vector E(rep.mesh.elem_count), dE(rep.mesh.elem_count);
    interpolate(law, rep.rho, E, dE);
    const auto am = full_active_model(rep.mesh, bcs.fixed_mask(rep.mesh));
    const SpMat K = assemble_stiffness(rep.mesh, am, E, Ke0);
    const Vector f_full = bcs.load_vector(rep.mesh);
    const Vector u = expand_vector(am, solve_linear(K, reduce_vector(am, f_full)));

    rep.energy_nd = elemental_energies(rep.mesh, Ke0, u);
    rep.energy = E.cwiseProduct(rep.energy_nd);
    rep.dc_drho = -dE.cwiseProduct(rep.energy_nd);
    rep.dc_dphi = backprop_to_phi(design, filter, rep.dc_drho);

    rep.max_energy_nd = rep.energy_nd.cwiseAbs().maxCoeff();
    rep.max_energy = rep.energy.cwiseAbs().maxCoeff();
    rep.max_dc_drho = rep.dc_drho.cwiseAbs().maxCoeff();
    rep.max_dc_dphi = rep.dc_dphi.cwiseAbs().maxCoeff();

    // region of potential topological growth: treat the max-normalized
    // sensitivity magnitudes as design variables and map them to densities
    DesignState growth = design;
    growth.phi = rep.dc_dphi.cwiseAbs() / (rep.max_dc_dphi > 0.0 ? rep.max_dc_dphi : 1.0);
    if (scheme == Scheme::sensitivity_filter) {
        rep.growth = growth.phi;  // rho = phi: the transform is the identity
    } else {
        forward_map(growth, filter);
        rep.growth = growth.rho;
    }
    return rep;
}

Real support_reach(const StructuredMesh& mesh, const Vector& map, const Vector& rho,
                   Real eps_rel) {
    const Real cutoff = eps_rel * map.cwiseAbs().maxCoeff();
    std::vector<int> solid;
    for (int e = 0; e < mesh.elem_count; ++e)
        if (rho[e] >= 0.5) solid.push_back(e);
    if (solid.empty()) throw InvalidSpecError("support_reach: empty solid set");

    Real reach = 0.0;
    for (int e = 0; e < mesh.elem_count; ++e) {
        if (std::abs(map[e]) <= cutoff) continue;
        Real dmin = std::numeric_limits<Real>::max();
        const auto ce = mesh.centroid(e);
        for (int s : solid) dmin = std::min(dmin, (mesh.centroid(s) - ce).norm());
        reach = std::max(reach, dmin);
    }
    return reach;
}

}  // namespace topo
