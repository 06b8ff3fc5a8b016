#include "topo/checkgrad.hpp"

#include "topo/io.hpp"
#include "topo/run_loop.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace topo {

namespace {

struct AuditSetup {
    RunConfig cfg;
    Real eta;
    Real beta;
    Real tolerance;
};

AuditSetup audit_setup(const std::string& problem) {
    AuditSetup a;
    if (problem == "compliance") {
        a.cfg = parse_config("preset = cantilever2d\ndims = 12 6\nrmin = 2.0\nrhot = none\n");
        a.eta = 3.0;
        a.beta = 8.0;
        a.tolerance = 1e-5;
    } else if (problem == "inverter") {
        a.cfg = parse_config("preset = inverter\ndims = 12 6\nrmin = 2.0\nrhot = none\n");
        a.eta = 3.0;
        a.beta = 8.0;
        a.tolerance = 1e-5;
    } else if (problem == "nonlinear") {
        a.cfg = parse_config(
            "preset = nonlinear-cantilever\ndims = 8 2\nrmin = 1.6\nrhot = none\n"
            "load_scale = 10\n");
        a.eta = 3.0;
        a.beta = 8.0;
        a.tolerance = 1e-4;
    } else if (problem == "vibration") {
        a.cfg = parse_config("preset = clamped-vibration\ndims = 8 4\nrmin = 1.6\nrhot = none\n");
        a.eta = 6.0;
        a.beta = 8.0;
        a.tolerance = 1e-4;
    } else if (problem == "buckling") {
        a.cfg = parse_config("preset = column-buckling\ndims = 12 12\nrmin = 1.6\nrhot = none\n");
        a.eta = 3.0;
        a.beta = 4.0;
        a.tolerance = 1e-3;
    } else {
        throw InvalidSpecError("run_gradient_audit: unknown problem '" + problem + "'");
    }
    return a;
}

}  // namespace

GradientAudit run_gradient_audit(const std::string& problem) {
    const auto tic = std::chrono::steady_clock::now();
    const auto setup = audit_setup(problem);
    const ProblemSpec p = make_problem(setup.cfg);
    const FilterOperator filter = build_filter(p.mesh, p.rmin);

    // deterministic smooth design away from the box bounds
    std::mt19937 rng(1234u);
    std::uniform_real_distribution<Real> dist(0.3, 0.8);
    Vector raw(p.mesh.elem_count);
    for (int e = 0; e < p.mesh.elem_count; ++e) raw[e] = dist(rng);
    const Vector phi0 = apply_filter(filter, raw);

    const auto base = evaluate_design(p, filter, phi0, setup.eta, setup.beta, 0.0);

    const Real step = 1e-6;
    Vector fd(p.mesh.elem_count);
    Vector phi = phi0;
    for (int i = 0; i < p.mesh.elem_count; ++i) {
        const Real xi = phi[i];
        phi[i] = xi + step;
        const Real gp = evaluate_design(p, filter, phi, setup.eta, setup.beta, 0.0).g0;
        phi[i] = xi - step;
        const Real gm = evaluate_design(p, filter, phi, setup.eta, setup.beta, 0.0).g0;
        phi[i] = xi;
        fd[i] = (gp - gm) / (2.0 * step);
    }

    GradientAudit audit;
    audit.name = problem;
    audit.tolerance = setup.tolerance;
    audit.n_vars = p.mesh.elem_count;
    const Real scale = fd.cwiseAbs().maxCoeff();
    audit.max_rel_error = scale > 0.0
                              ? (base.dg0_dphi - fd).cwiseAbs().maxCoeff() / scale
                              : base.dg0_dphi.cwiseAbs().maxCoeff();
    audit.seconds = std::chrono::duration<Real>(std::chrono::steady_clock::now() - tic).count();
    return audit;
}

std::vector<GradientAudit> run_all_gradient_audits() {
    std::vector<GradientAudit> out;
    for (const char* name : {"compliance", "inverter", "nonlinear", "vibration", "buckling"})
        out.push_back(run_gradient_audit(name));
    return out;
}

}  // namespace topo
