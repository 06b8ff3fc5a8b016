#include "topo/io.hpp"

#include <cmath>

namespace topo {

namespace {

Scheme scheme_from_string(const std::string& s) {
    if (s == "A1") return Scheme::sensitivity_filter;
    if (s == "A2") return Scheme::density_filter;
    if (s == "A3") return Scheme::threshold;
    return Scheme::hpm;
}

void apply_removal(const RunConfig& cfg, ProblemSpec& p) {
    if (cfg.rhot_mode == "none") {
        p.removal = RemovalMode::none;
    } else if (cfg.rhot_mode == "fixed") {
        p.removal = RemovalMode::fixed_threshold;
        p.rho_t = cfg.rhot;
    } else {
        p.removal = RemovalMode::schedule;
        p.rho_t_schedule = cfg.rhot_schedule;
    }
}

void apply_common(const RunConfig& cfg, ProblemSpec& p, Real default_vmax, int default_iters,
                  OptimizerKind default_opt, Real default_emin_scale) {
    p.vmax = cfg.vmax > 0.0 ? cfg.vmax : default_vmax;
    p.max_iterations = cfg.max_iters >= 0 ? cfg.max_iters : default_iters;
    p.scheme = scheme_from_string(cfg.scheme);
    p.rmin = cfg.rmin_elems * p.mesh.h;
    if (!cfg.optimizer.empty())
        p.optimizer = cfg.optimizer == "oc" ? OptimizerKind::oc : OptimizerKind::mma;
    else
        p.optimizer = default_opt;
    p.move_limit = p.optimizer == OptimizerKind::oc ? 0.2 : 0.1;
    apply_removal(cfg, p);

    const Real emin_scale = cfg.emin_scale >= 0.0 ? cfg.emin_scale : default_emin_scale;
    p.mat.Emin = emin_scale * p.mat.E0;
    p.stiffness_law.Emin = p.mat.Emin;

    if (auto it = cfg.raw.find("initial_field"); it != cfg.raw.end()) {
        const auto field = read_density_field(it->second);
        if (field.values.size() != p.mesh.elem_count)
            throw ConfigError("initial_field: length does not match the mesh");
        p.initial_phi = field.values;
    }
}

std::vector<int> dims_or(const RunConfig& cfg, std::vector<int> fallback) {
    if (cfg.dims.empty()) return fallback;
    if (cfg.dims.size() != fallback.size())
        throw ConfigError("dims: expected " + std::to_string(fallback.size()) +
                          " entries for this preset");
    return cfg.dims;
}

ProblemSpec cantilever2d(const RunConfig& cfg) {
    ProblemSpec p;
    p.kind = ProblemKind::compliance;
    const auto d = dims_or(cfg, {160, 40});
    p.mesh = build_mesh_2d(d[0], d[1], 1.0);
    p.mat = MaterialConstants::make(200e9, 0.0, 0.3, 2);
    p.stiffness_law = {InterpKind::simp, p.mat.E0, 0.0, 3.0, 1.0};
    for (int iy = 0; iy <= d[1]; ++iy)
        for (int c = 0; c < 2; ++c) p.bcs.fixed.push_back({p.mesh.node_id(0, iy), c});
    p.bcs.loads.push_back({p.mesh.node_id(d[0], d[1] / 2), 1, -1e7 * cfg.load_scale});
    p.eta_schedule = cfg.eta_schedule.value_or(ContinuationSchedule{"eta", 2.0, 0.5, 25, 6.0, 0});
    p.beta_schedule = cfg.beta_schedule.value_or(ContinuationSchedule{"beta", 32.0, 0.0, 1, 32.0, 0});
    apply_common(cfg, p, 0.5, 400, OptimizerKind::oc, 1e-6);
    return p;
}

ProblemSpec cantilever3d(const RunConfig& cfg) {
    ProblemSpec p;
    p.kind = ProblemKind::compliance;
    const auto d = dims_or(cfg, {48, 16, 16});
    p.mesh = build_mesh_3d(d[0], d[1], d[2], 1.0);
    p.mat = MaterialConstants::make(200e9, 0.0, 0.3, 3);
    p.stiffness_law = {InterpKind::simp, p.mat.E0, 0.0, 3.0, 1.0};
    for (int iy = 0; iy <= d[1]; ++iy)
        for (int iz = 0; iz <= d[2]; ++iz)
            for (int c = 0; c < 3; ++c) p.bcs.fixed.push_back({p.mesh.node_id(0, iy, iz), c});
    p.bcs.loads.push_back({p.mesh.node_id(d[0], d[1] / 2, d[2] / 2), 1, -1e7 * cfg.load_scale});
    p.eta_schedule = cfg.eta_schedule.value_or(ContinuationSchedule{"eta", 3.0, 0.0, 1, 3.0, 0});
    p.beta_schedule = cfg.beta_schedule.value_or(ContinuationSchedule{"beta", 32.0, 0.0, 1, 32.0, 0});
    apply_common(cfg, p, 0.16, 200, OptimizerKind::oc, 1e-6);
    if (cfg.rmin_elems == 2.4 && cfg.raw.find("rmin") == cfg.raw.end())
        p.rmin = 2.0 * std::sqrt(3.0) * p.mesh.h;
    return p;
}

ProblemSpec inverter(const RunConfig& cfg) {
    ProblemSpec p;
    p.kind = ProblemKind::inverter;
    const auto d = dims_or(cfg, {120, 60});
    const int nx = d[0], ny = d[1];
    p.mesh = build_mesh_2d(nx, ny, 1.0);
    p.mat = MaterialConstants::make(1.0, 0.0, 0.3, 2);
    p.stiffness_law = {InterpKind::simp, 1.0, 0.0, 3.0, 1.0};
    // lower half modeled; symmetry rollers on the top edge
    for (int ix = 0; ix <= nx; ++ix) p.bcs.fixed.push_back({p.mesh.node_id(ix, ny), 1});
    p.bcs.fixed.push_back({p.mesh.node_id(0, 0), 0});
    p.bcs.fixed.push_back({p.mesh.node_id(0, 0), 1});
    const int in_node = p.mesh.node_id(0, ny);
    const int out_node = p.mesh.node_id(nx, ny);
    p.bcs.loads.push_back({in_node, 0, 1.0 * cfg.load_scale});
    p.bcs.springs.push_back({in_node, 0, 1.0});
    p.bcs.springs.push_back({out_node, 0, 1e-3});
    p.output_node = out_node;
    p.output_comp = 0;
    p.eta_schedule = cfg.eta_schedule.value_or(ContinuationSchedule{"eta", 2.0, 0.2, 20, 8.0, 0});
    p.beta_schedule = cfg.beta_schedule.value_or(ContinuationSchedule{"beta", 50.0, 0.0, 1, 50.0, 0});
    apply_common(cfg, p, 0.3, 400, OptimizerKind::mma, 1e-3);
    return p;
}

ProblemSpec nonlinear_cantilever(const RunConfig& cfg) {
    ProblemSpec p;
    p.kind = ProblemKind::nonlinear_compliance;
    const auto d = dims_or(cfg, {100, 25});
    p.mesh = build_mesh_2d(d[0], d[1], 1.0 / d[0]);  // L = 1
    p.thickness = 0.1;
    p.mat = MaterialConstants::make(3e9, 0.0, 0.4, 2);
    p.stiffness_law = {InterpKind::simp, p.mat.E0, 0.0, 3.0, 1.0};
    for (int iy = 0; iy <= d[1]; ++iy)
        for (int c = 0; c < 2; ++c) p.bcs.fixed.push_back({p.mesh.node_id(0, iy), c});
    p.bcs.loads.push_back({p.mesh.node_id(d[0], d[1] / 2), 1, -12e3 * cfg.load_scale});
    // longer first continuation step, then regular increments
    p.eta_schedule = cfg.eta_schedule.value_or(ContinuationSchedule{"eta", 2.5, 0.5, 30, 6.0, 30});
    p.beta_schedule = cfg.beta_schedule.value_or(ContinuationSchedule{"beta", 50.0, 0.0, 1, 50.0, 0});
    p.newton.increments = 10;
    p.newton.tolerance = 1e-8;
    apply_common(cfg, p, 0.5, 200, OptimizerKind::mma, 1e-6);
    return p;
}

ProblemSpec clamped_vibration(const RunConfig& cfg) {
    ProblemSpec p;
    p.kind = ProblemKind::vibration;
    const auto d = dims_or(cfg, {180, 60});
    const int nx = d[0], ny = d[1];
    p.mesh = build_mesh_2d(nx, ny, 1.0 / ny);  // Ly = 1
    p.mat = MaterialConstants::make(1.0, 0.0, 0.3, 2, 1.0);
    p.stiffness_law = {InterpKind::ramp, 1.0, 0.0, 0.0, 1.0};
    for (int iy = 0; iy <= ny; ++iy)
        for (int c = 0; c < 2; ++c) {
            p.bcs.fixed.push_back({p.mesh.node_id(0, iy), c});
            p.bcs.fixed.push_back({p.mesh.node_id(nx, iy), c});
        }
    const Real vmax = cfg.vmax > 0.0 ? cfg.vmax : 0.3;
    const Real domain_area = (nx * p.mesh.h) * (ny * p.mesh.h);
    p.bcs.point_masses.push_back(
        {p.mesh.node_id(nx / 2, ny / 2), 0.15 * vmax * domain_area * p.mat.rho0, {0, 1}});
    p.eta_schedule = cfg.eta_schedule.value_or(ContinuationSchedule{"eta", 0.0, 1.0, 20, 24.0, 0});
    p.beta_schedule = cfg.beta_schedule.value_or(ContinuationSchedule{"beta", 40.0, 0.0, 1, 40.0, 0});
    p.eigen = {8, 4, 16.0, false, 1e-8};
    apply_common(cfg, p, 0.3, 350, OptimizerKind::mma, 1e-6);
    return p;
}

ProblemSpec column_buckling(const RunConfig& cfg) {
    ProblemSpec p;
    p.kind = ProblemKind::buckling;
    const auto d = dims_or(cfg, {180, 90});
    const int nx = d[0], ny = d[1];
    p.mesh = build_mesh_2d(nx, ny, 1.0 / ny);  // Ly = 1
    p.mat = MaterialConstants::make(1.0, 0.0, 0.3, 2);
    p.stiffness_law = {InterpKind::simp, 1.0, 0.0, 3.0, 1.0};
    p.stress_law = {InterpKind::stress_power, 1.0, 0.0, 3.0, 1.0};
    for (int ix = 0; ix <= nx; ++ix)
        for (int c = 0; c < 2; ++c) p.bcs.fixed.push_back({p.mesh.node_id(ix, 0), c});
    // compressive patch of one element width centered on the top edge
    const Real f_total = -1e-3 * cfg.load_scale;
    const int cx = nx / 2;
    p.bcs.loads.push_back({p.mesh.node_id(cx, ny), 1, 0.75 * f_total});
    p.bcs.loads.push_back({p.mesh.node_id(cx - 1, ny), 1, 0.125 * f_total});
    p.bcs.loads.push_back({p.mesh.node_id(cx + 1, ny), 1, 0.125 * f_total});
    p.eta_schedule = cfg.eta_schedule.value_or(ContinuationSchedule{"eta", 3.0, 0.2, 15, 6.0, 100});
    p.beta_schedule = cfg.beta_schedule.value_or(ContinuationSchedule{"beta", 4.0, 2.0, 50, 24.0, 0});
    p.eigen = {16, 12, 16.0, false, 1e-8};
    p.cmax_factor = 2.5;
    apply_common(cfg, p, 0.25, 300, OptimizerKind::mma, 1e-6);
    return p;
}

}  // namespace

ProblemSpec make_problem(const RunConfig& cfg) {
    if (cfg.preset == "cantilever2d") return cantilever2d(cfg);
    if (cfg.preset == "cantilever3d") return cantilever3d(cfg);
    if (cfg.preset == "inverter") return inverter(cfg);
    if (cfg.preset == "nonlinear-cantilever") return nonlinear_cantilever(cfg);
    if (cfg.preset == "clamped-vibration") return clamped_vibration(cfg);
    if (cfg.preset == "column-buckling") return column_buckling(cfg);
    throw ConfigError("unknown preset '" + cfg.preset + "'");
}

}  // namespace topo
