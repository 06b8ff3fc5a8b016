#include "topo/run_loop.hpp"

#include "topo/assembly.hpp"
#include "topo/eigen_dynamics.hpp"
#include "topo/element.hpp"
#include "topo/lin_statics.hpp"
#include "topo/nonlin_statics.hpp"
#include "topo/optimizer.hpp"
#include "topo/solve.hpp"

#include <chrono>
#include <cmath>
#include <set>

namespace topo {

namespace {

struct ForwardResult {
    Real g0 = 0.0;
    Vector dg0_drho;
    Real compliance = 0.0;   // pre-buckling compliance when applicable
    Vector dc_drho;          // its gradient (buckling constraint)
    Real eigen_min = 0.0;
    Real ks_bound = 0.0;
    int phi_rat_flags = 0;
    Matrix modes_full;       // warm start for the next eigensolve
};

Matrix base_element_matrix(const ProblemSpec& p) {
    return p.mesh.dim == 2
               ? element_stiffness(ElementKind::q4_plane_stress, p.mesh.h, p.mat.nu, p.thickness)
               : element_stiffness(ElementKind::h8, p.mesh.h, p.mat.nu);
}

// Elements incident to point-mass nodes stay in the analysis so the
// nonstructural mass is never orphaned.
void pin_point_mass_elements(const ProblemSpec& p, const Vector& rho, Vector& zeroed,
                             std::vector<uint8_t>& active) {
    if (p.bcs.point_masses.empty()) return;
    std::set<int> pinned_nodes;
    for (const auto& pm : p.bcs.point_masses) pinned_nodes.insert(pm.node);
    for (int e = 0; e < p.mesh.elem_count; ++e) {
        if (active[e]) continue;
        for (int a = 0; a < p.mesh.nodes_per_elem(); ++a)
            if (pinned_nodes.count(p.mesh.conn(e, a))) {
                active[e] = 1;
                zeroed[e] = rho[e];
                break;
            }
    }
}

ForwardResult forward_analysis(const ProblemSpec& p, const Vector& rho, Real eta,
                               const ActiveModel& am, const Matrix& Ke0,
                               const Matrix* warm_modes) {
    const InterpolationLaw law = p.effective_stiffness_law(eta);
    ForwardResult fr;
    switch (p.kind) {
        case ProblemKind::compliance: {
            auto res = compliance_objective(p, rho, law, am);
            fr.g0 = res.value;
            fr.dg0_drho = std::move(res.dg_drho);
            fr.compliance = res.solution.compliance;
            return fr;
        }
        case ProblemKind::inverter: {
            auto res = inverter_objective(p, rho, law, am);
            fr.g0 = res.value;
            fr.dg0_drho = std::move(res.dg_drho);
            fr.compliance = res.solution.compliance;
            return fr;
        }
        case ProblemKind::nonlinear_compliance: {
            auto res = end_compliance_objective(p.mesh, am, rho, law, p.mat, p.thickness,
                                                p.bcs.load_vector(p.mesh), p.newton);
            fr.g0 = res.value;
            fr.dg0_drho = std::move(res.dg_drho);
            fr.compliance = res.value;
            return fr;
        }
        case ProblemKind::vibration: {
            Vector E, dE;
            interpolate(law, rho, E, dE);
            for (int e = 0; e < p.mesh.elem_count; ++e)
                if (!am.element_active[e]) E[e] = dE[e] = 0.0;
            const SpMat K = assemble_stiffness(p.mesh, am, E, Ke0);
            const SpMat M = assemble_mass(p.mesh, am, rho, p.mat.rho0, p.bcs.point_masses,
                                          p.thickness, p.eigen.lumped_mass);
            Matrix warm;
            if (warm_modes && warm_modes->rows() == p.mesh.total_dofs()) {
                warm.resize(am.n_active, warm_modes->cols());
                for (int j = 0; j < warm_modes->cols(); ++j)
                    warm.col(j) = reduce_vector(am, warm_modes->col(j));
            }
            const auto sol = generalized_eigensolve(K, M, p.eigen.n_pairs, p.eigen.tolerance,
                                                    warm.size() ? &warm : nullptr);
            const auto sens = frequency_ks_sensitivity(p.mesh, am, sol, Ke0, dE, p.mat.rho0,
                                                       p.thickness, p.eigen.lumped_mass,
                                                       p.eigen.alpha, p.eigen.q);
            fr.g0 = sens.Lambda;
            fr.dg0_drho = sens.dLambda_drho;
            fr.eigen_min = std::sqrt(sol.values[0]);
            fr.ks_bound = 1.0 / sens.Lambda;
            fr.modes_full.resize(p.mesh.total_dofs(), sol.modes.cols());
            for (int j = 0; j < sol.modes.cols(); ++j) {
                fr.modes_full.col(j) = expand_vector(am, sol.modes.col(j));
                const Real ratio = artificial_mode_ratio(p.mesh, Ke0, E, rho,
                                                         fr.modes_full.col(j));
                if (ratio > 0.5) ++fr.phi_rat_flags;
            }
            return fr;
        }
        case ProblemKind::buckling: {
            Vector E, dE;
            interpolate(law, rho, E, dE);
            InterpolationLaw stress_law = p.stress_law;
            stress_law.eta = eta;
            Vector sig, dsig;  // sigma(rho)/E0
            interpolate(stress_law, rho, sig, dsig);
            sig /= p.mat.E0;
            dsig /= p.mat.E0;
            for (int e = 0; e < p.mesh.elem_count; ++e)
                if (!am.element_active[e]) E[e] = dE[e] = sig[e] = dsig[e] = 0.0;

            const SpMat K = assemble_stiffness(p.mesh, am, E, Ke0);
            for (const auto& l : p.bcs.loads)
                if (am.full_to_red[p.mesh.dof(l.node, l.comp)] < 0)
                    throw DisconnectionError("buckling load applied to eliminated DOF");
            LinearSolver solver(K);
            const Vector f_red = reduce_vector(am, p.bcs.load_vector(p.mesh));
            const Vector u_red = solver.solve(f_red);
            const Vector u_full = expand_vector(am, u_red);

            fr.compliance = f_red.dot(u_red);
            const Vector s_nd = elemental_energies(p.mesh, Ke0, u_full);
            fr.dc_drho = Vector::Zero(p.mesh.elem_count);
            for (int e = 0; e < p.mesh.elem_count; ++e)
                if (am.element_active[e]) fr.dc_drho[e] = -dE[e] * s_nd[e];

            const SpMat G = stress_stiffness(p.mesh, am, sig, u_full, p.mat, p.thickness);
            const SpMat B = (-G).eval();
            Matrix warm;
            if (warm_modes && warm_modes->rows() == p.mesh.total_dofs()) {
                warm.resize(am.n_active, warm_modes->cols());
                for (int j = 0; j < warm_modes->cols(); ++j)
                    warm.col(j) = reduce_vector(am, warm_modes->col(j));
            }
            const auto sol = generalized_eigensolve(K, B, p.eigen.n_pairs, p.eigen.tolerance,
                                                    warm.size() ? &warm : nullptr);
            const auto sens =
                blf_ks_sensitivity(p.mesh, am, sol, Ke0, dE, sig, dsig, u_full, p.mat,
                                   p.thickness, solver, p.eigen.alpha, p.eigen.q);
            fr.g0 = sens.Lambda;
            fr.dg0_drho = sens.dLambda_drho;
            fr.eigen_min = sol.values[0];
            fr.ks_bound = 1.0 / sens.Lambda;
            fr.modes_full.resize(p.mesh.total_dofs(), sol.modes.cols());
            for (int j = 0; j < sol.modes.cols(); ++j) {
                fr.modes_full.col(j) = expand_vector(am, sol.modes.col(j));
                const Real ratio = artificial_mode_ratio(p.mesh, Ke0, E, rho,
                                                         fr.modes_full.col(j));
                if (ratio > 0.5) ++fr.phi_rat_flags;
            }
            return fr;
        }
    }
    throw InvalidSpecError("run_loop: unknown problem kind");
}

}  // namespace

ObjectiveEvaluation evaluate_design(const ProblemSpec& p, const FilterOperator& filter,
                                    const Vector& phi, Real eta, Real beta, Real rho_t) {
    DesignState state;
    state.scheme = p.scheme;
    state.threshold = p.threshold;
    state.beta = beta;
    state.eta = eta;
    state.phi = phi;
    forward_map(state, filter);

    const auto fixed = p.bcs.fixed_mask(p.mesh);
    Vector rho_analysis = state.rho;
    std::vector<uint8_t> active(p.mesh.elem_count, 1);
    if (p.removal_enabled()) {
        auto [zeroed, mask] = detect_and_zero(state.rho, rho_t);
        rho_analysis = std::move(zeroed);
        active = std::move(mask);
        pin_point_mass_elements(p, state.rho, rho_analysis, active);
    }
    const auto am = build_active_model(p.mesh, active, fixed, rho_t);
    const Matrix Ke0 = base_element_matrix(p);
    const auto fr = forward_analysis(p, rho_analysis, eta, am, Ke0, nullptr);

    ObjectiveEvaluation out;
    out.g0 = fr.g0;
    out.compliance = fr.compliance;
    out.dg0_dphi = backprop_to_phi(state, filter, fr.dg0_drho);
    return out;
}

RunResult run_loop(const ProblemSpec& p, const IterationCallback& on_iteration) {
    p.bcs.validate(p.mesh);
    const int m = p.mesh.elem_count;
    const auto fixed = p.bcs.fixed_mask(p.mesh);
    const Matrix Ke0 = base_element_matrix(p);
    const FilterOperator filt = build_filter(p.mesh, p.rmin);

    RunResult out;
    out.state.scheme = p.scheme;
    out.state.threshold = p.threshold;
    if (p.initial_phi.size() == m) {
        out.state.phi = p.initial_phi;
    } else {
        // uniform initial guess seeded in density space: the projection
        // inflates uniform variables, so bisect the level that lands the
        // volume exactly on the bound, keeping the first iterate feasible
        Real lo = 0.0, hi = 1.0;
        const Real beta1 = p.beta_schedule ? p.beta_schedule->value_at(1) : 0.0;
        for (int it = 0; it < 80; ++it) {
            const Real c = 0.5 * (lo + hi);
            DesignState probe;
            probe.scheme = p.scheme;
            probe.threshold = p.threshold;
            probe.beta = beta1;
            probe.phi = Vector::Constant(m, c);
            forward_map(probe, filt);
            (volume_fraction(probe.rho) > p.vmax ? hi : lo) = c;
        }
        out.state.phi = Vector::Constant(m, 0.5 * (lo + hi));
    }

    // buckling compliance bound from the fully solid column
    Real cmax = 0.0;
    if (p.kind == ProblemKind::buckling) {
        const auto am_full = full_active_model(p.mesh, fixed);
        ProblemSpec solid = p;
        solid.kind = ProblemKind::compliance;
        const auto res =
            compliance_objective(solid, Vector::Ones(m), p.effective_stiffness_law(1.0), am_full);
        cmax = p.cmax_factor * res.value;
    }

    MmaOptimizer::Options mma_opt;
    mma_opt.move_limit = p.optimizer == OptimizerKind::mma ? std::min(p.move_limit, 0.1) : 0.1;
    const int n_cons = p.kind == ProblemKind::buckling ? 2 : 1;
    MmaOptimizer mma(m, n_cons, mma_opt);

    std::vector<Real> g0_history;
    ActiveModel am_prev = full_active_model(p.mesh, fixed);
    Matrix warm_modes;

    for (int k = 1; k <= p.max_iterations; ++k) {
        const auto tic = std::chrono::steady_clock::now();
        IterationRecord rec;
        rec.k = k;
        rec.eta = p.eta_schedule.value_at(k);
        rec.beta = p.beta_schedule ? p.beta_schedule->value_at(k) : out.state.beta;
        rec.rho_t = p.rho_t_at(k);

        out.state.beta = rec.beta;
        out.state.eta = rec.eta;
        forward_map(out.state, filt);

        // (1) detection, (2) elimination
        Vector rho_analysis = out.state.rho;
        std::vector<uint8_t> active(m, 1);
        if (p.removal_enabled()) {
            auto [zeroed, mask] = detect_and_zero(out.state.rho, rec.rho_t);
            rho_analysis = std::move(zeroed);
            active = std::move(mask);
            pin_point_mass_elements(p, out.state.rho, rho_analysis, active);
        }
        const auto am = build_active_model(p.mesh, active, fixed, rec.rho_t);
        const auto delta = reintroduction_delta(am_prev, am);
        rec.reintroduced = delta.reintroduced;
        rec.removed = delta.removed;
        rec.n_active = am.n_active;
        rec.reduced_dim = am.n_active;

        // (3) forward solve + (4) sensitivities
        ForwardResult fr;
        try {
            fr = forward_analysis(p, rho_analysis, rec.eta, am, Ke0,
                                  warm_modes.size() ? &warm_modes : nullptr);
        } catch (const DisconnectionError& err) {
            out.failed = true;
            out.failure = err.what();
            out.failure_exit_code = 4;
            out.records.push_back(rec);
            return out;
        } catch (const std::runtime_error& err) {
            out.failed = true;
            out.failure = err.what();
            out.failure_exit_code = 3;
            out.records.push_back(rec);
            return out;
        }
        if (fr.modes_full.size()) warm_modes = fr.modes_full;

        rec.g0 = fr.g0;
        rec.volume = volume_fraction(out.state.rho);
        rec.constraint2 = fr.compliance;
        rec.phi_rat_flags = fr.phi_rat_flags;
        rec.eigen_min = fr.eigen_min;
        rec.ks_bound = fr.ks_bound;
        g0_history.push_back(fr.g0);

        // backprop to the design variables
        const Vector dg0_dphi = backprop_to_phi(out.state, filt, fr.dg0_drho);
        Vector dV_dphi;
        if (p.scheme == Scheme::sensitivity_filter)
            dV_dphi = Vector::Constant(m, 1.0 / m);
        else
            dV_dphi = chain_rule_backprop(filt, out.state.drho_dmu, Vector::Constant(m, 1.0 / m));

        // (5) design change
        Vector phi_new;
        if (p.optimizer == OptimizerKind::oc) {
            auto volume_of = [&](const Vector& cand) {
                DesignState tmp = out.state;
                tmp.phi = cand;
                forward_map(tmp, filt);
                return volume_fraction(tmp.rho);
            };
            phi_new = oc_update(out.state.phi, dg0_dphi, dV_dphi, p.vmax, p.move_limit, 0.5,
                                volume_of);
        } else {
            Vector gcons(n_cons);
            Matrix dgcons(n_cons, m);
            gcons[0] = rec.volume / p.vmax - 1.0;
            dgcons.row(0) = (dV_dphi / p.vmax).transpose();
            if (n_cons == 2) {
                gcons[1] = fr.compliance / cmax - 1.0;
                const Vector dc_dphi = backprop_to_phi(out.state, filt, fr.dc_drho);
                dgcons.row(1) = (dc_dphi / cmax).transpose();
            }
            const Real scale = dg0_dphi.cwiseAbs().maxCoeff();
            const Vector dg0_scaled = scale > 0.0 ? (dg0_dphi / scale).eval() : dg0_dphi;
            phi_new = mma.update(out.state.phi, dg0_scaled, gcons, dgcons);
        }

        const auto conv = convergence_check(phi_new, out.state.phi, g0_history);
        rec.tau_phi = conv.tau_phi;
        rec.tau_g0 = conv.tau_g0;

        // (6) project the new design onto densities (next forward_map does it;
        // commit the variables here)
        out.state.phi = phi_new;
        am_prev = am;

        rec.seconds =
            std::chrono::duration<Real>(std::chrono::steady_clock::now() - tic).count();
        out.records.push_back(rec);
        if (on_iteration) on_iteration(rec, out.state);

        if (conv.converged) {
            out.converged = true;
            break;
        }
    }
    forward_map(out.state, filt);
    return out;
}

}  // namespace topo
