#include "doctest.h"

#include "topo/design.hpp"
#include "topo/filter.hpp"
#include "topo/lin_statics.hpp"
#include "topo/element.hpp"
#include "support/oracles.hpp"

using namespace topo;

namespace {

ProblemSpec cantilever_problem(int nx, int ny, Real E0 = 1.0) {
    ProblemSpec p;
    p.kind = ProblemKind::compliance;
    p.mesh = build_mesh_2d(nx, ny);
    p.mat = MaterialConstants::make(E0, 1e-6 * E0, 0.3, 2);
    p.stiffness_law = {InterpKind::simp, E0, 1e-6 * E0, 3.0, 1.0};
    for (int iy = 0; iy <= ny; ++iy)
        for (int c = 0; c < 2; ++c) p.bcs.fixed.push_back({p.mesh.node_id(0, iy), c});
    p.bcs.loads.push_back({p.mesh.node_id(nx, ny / 2), 1, -1.0});
    return p;
}

ProblemSpec inverter_problem(int nx, int ny) {
    // lower half-domain inverter: symmetry rollers on the top edge
    ProblemSpec p;
    p.kind = ProblemKind::inverter;
    p.mesh = build_mesh_2d(nx, ny);
    p.mat = MaterialConstants::make(1.0, 1e-3, 0.3, 2);
    p.stiffness_law = {InterpKind::simp, 1.0, 1e-3, 3.0, 1.0};
    for (int ix = 0; ix <= nx; ++ix) p.bcs.fixed.push_back({p.mesh.node_id(ix, ny), 1});
    p.bcs.fixed.push_back({p.mesh.node_id(0, 0), 0});
    p.bcs.fixed.push_back({p.mesh.node_id(0, 0), 1});
    const int in_node = p.mesh.node_id(0, ny);
    const int out_node = p.mesh.node_id(nx, ny);
    p.bcs.loads.push_back({in_node, 0, 1.0});
    p.bcs.springs.push_back({in_node, 0, 1.0});
    p.bcs.springs.push_back({out_node, 0, 1e-3});
    p.output_node = out_node;
    p.output_comp = 0;
    return p;
}

}  // namespace

TEST_CASE("solid cantilever compliance matches the dense oracle") {
    auto p = cantilever_problem(6, 3, 200e9);
    const Vector rho = Vector::Ones(p.mesh.elem_count);
    const auto am = full_active_model(p.mesh, p.bcs.fixed_mask(p.mesh));
    const auto res = compliance_objective(p, rho, p.stiffness_law, am);

    const Matrix ke0 = element_stiffness(ElementKind::q4_plane_stress, p.mesh.h, 0.3);
    Vector moduli(p.mesh.elem_count);
    for (int e = 0; e < p.mesh.elem_count; ++e)
        moduli[e] = interpolate(p.stiffness_law, rho[e]).value;
    const Matrix Kfull = oracle::dense_full_stiffness(p.mesh, moduli, ke0);
    const Vector f = p.bcs.load_vector(p.mesh);
    const Vector u = oracle::dense_constrained_solve(Kfull, f, p.bcs.fixed_mask(p.mesh));
    CHECK(res.value == doctest::Approx(f.dot(u)).epsilon(1e-8));
    CHECK(res.value > 0.0);
}

TEST_CASE("doubling the modulus halves the compliance") {
    auto p1 = cantilever_problem(5, 2, 1.0);
    auto p2 = cantilever_problem(5, 2, 2.0);
    const Vector rho = oracle::random_vector(p1.mesh.elem_count, 0.3, 1.0, 3);
    const auto am = full_active_model(p1.mesh, p1.bcs.fixed_mask(p1.mesh));
    const Real c1 = compliance_objective(p1, rho, p1.stiffness_law, am).value;
    const Real c2 = compliance_objective(p2, rho, p2.stiffness_law, am).value;
    CHECK(c1 == doctest::Approx(2.0 * c2).epsilon(1e-12));
}

TEST_CASE("compliance gradient matches finite differences on a 12x6 mesh") {
    auto p = cantilever_problem(12, 6);
    const auto f = build_filter(p.mesh, 2.0);
    const auto am = full_active_model(p.mesh, p.bcs.fixed_mask(p.mesh));
    const Vector phi0 = oracle::random_vector(p.mesh.elem_count, 0.3, 0.9, 8);

    auto eval = [&](const Vector& phi) {
        DesignState s;
        s.scheme = Scheme::hpm;
        s.beta = 6.0;
        s.phi = phi;
        forward_map(s, f);
        return compliance_objective(p, s.rho, p.stiffness_law, am);
    };
    DesignState s;
    s.scheme = Scheme::hpm;
    s.beta = 6.0;
    s.phi = phi0;
    forward_map(s, f);
    const auto res = eval(phi0);
    const Vector analytic = backprop_to_phi(s, f, res.dg_drho);
    const Vector fd = oracle::central_fd(
        [&](const Vector& phi) { return eval(phi).value; }, phi0, 1e-6);
    CHECK(oracle::gradient_error(analytic, fd) < 1e-5);
}

TEST_CASE("compliance sensitivities are nonpositive and vanish on removed elements") {
    auto p = cantilever_problem(8, 4);
    Vector rho = oracle::smooth_random_field(p.mesh, 0.0, 1.0, 12);
    for (int ix = 0; ix < 8; ++ix)
        for (int iy = 0; iy < 2; ++iy) rho[p.mesh.elem_id(ix, iy)] = 1.0;
    // route the load into the solid bottom strip
    p.bcs.loads.clear();
    p.bcs.loads.push_back({p.mesh.node_id(8, 0), 1, -1.0});

    auto [zeroed, active] = detect_and_zero(rho, 0.25);
    const auto am = build_active_model(p.mesh, active, p.bcs.fixed_mask(p.mesh), 0.25);
    auto law = p.stiffness_law;
    law.Emin = 0.0;
    const auto res = compliance_objective(p, zeroed, law, am);
    for (int e = 0; e < p.mesh.elem_count; ++e) {
        CHECK(res.dg_drho[e] <= 0.0);
        if (!am.element_active[e]) CHECK(res.dg_drho[e] == 0.0);
    }
}

TEST_CASE("compliance decreases under componentwise density increase") {
    auto p = cantilever_problem(6, 3);
    const auto am = full_active_model(p.mesh, p.bcs.fixed_mask(p.mesh));
    for (unsigned seed = 0; seed < 5; ++seed) {
        const Vector lo = oracle::random_vector(p.mesh.elem_count, 0.2, 0.7, 100 + seed);
        const Vector hi =
            lo + oracle::random_vector(p.mesh.elem_count, 0.0, 0.3, 200 + seed);
        const Real c_lo = compliance_objective(p, lo, p.stiffness_law, am).value;
        const Real c_hi = compliance_objective(p, hi, p.stiffness_law, am).value;
        CHECK(c_hi <= c_lo + 1e-12 * std::abs(c_lo));
    }
}

TEST_CASE("inverter with l = f reproduces the compliance path") {
    auto p = inverter_problem(6, 3);
    // aim the objective at the loaded input DOF so l = f
    p.output_node = p.mesh.node_id(0, 3);
    p.output_comp = 0;
    p.bcs.springs.clear();  // springs belong to both K's; keep the pair equal
    const Vector rho = oracle::random_vector(p.mesh.elem_count, 0.3, 1.0, 9);
    const auto am = full_active_model(p.mesh, p.bcs.fixed_mask(p.mesh));

    const auto inv = inverter_objective(p, rho, p.stiffness_law, am);

    // compliance path on the same system
    const auto comp = compliance_objective(p, rho, p.stiffness_law, am);
    CHECK(std::abs(inv.value - comp.value) <= 1e-12 * std::abs(comp.value));
    CHECK((inv.dg_drho - comp.dg_drho).cwiseAbs().maxCoeff() <
          1e-10 * comp.dg_drho.cwiseAbs().maxCoeff());
}

TEST_CASE("inverter gradient matches finite differences on a 12x6 half domain") {
    auto p = inverter_problem(12, 6);
    const auto f = build_filter(p.mesh, 2.0);
    const auto am = full_active_model(p.mesh, p.bcs.fixed_mask(p.mesh));
    const Vector phi0 = oracle::random_vector(p.mesh.elem_count, 0.3, 0.9, 31);

    auto eval = [&](const Vector& phi) {
        DesignState s;
        s.scheme = Scheme::hpm;
        s.beta = 6.0;
        s.phi = phi;
        forward_map(s, f);
        return inverter_objective(p, s.rho, p.stiffness_law, am);
    };
    DesignState s;
    s.scheme = Scheme::hpm;
    s.beta = 6.0;
    s.phi = phi0;
    forward_map(s, f);
    const auto res = eval(phi0);
    const Vector analytic = backprop_to_phi(s, f, res.dg_drho);
    const Vector fd = oracle::central_fd(
        [&](const Vector& phi) { return eval(phi).value; }, phi0, 1e-6);
    CHECK(oracle::gradient_error(analytic, fd) < 1e-5);
}

TEST_CASE("eliminated output DOF raises a disconnection error") {
    auto p = inverter_problem(4, 2);
    Vector rho = Vector::Ones(p.mesh.elem_count);
    // remove the column of elements at the output end
    rho[p.mesh.elem_id(3, 0)] = rho[p.mesh.elem_id(3, 1)] = 0.0;
    auto [zeroed, active] = detect_and_zero(rho, 0.0);
    // rho = 0 is removed even at threshold zero
    const auto am = build_active_model(p.mesh, active, p.bcs.fixed_mask(p.mesh));
    CHECK_THROWS_AS(inverter_objective(p, zeroed, p.stiffness_law, am), DisconnectionError);
}
