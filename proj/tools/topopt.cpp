#include "CLI11.hpp"

#include "topo/checkgrad.hpp"
#include "topo/io.hpp"
#include "topo/run_loop.hpp"
#include "topo/study.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace topo;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<int> field_dims(const StructuredMesh& mesh) {
    if (mesh.dim == 2) return {mesh.dims[0], mesh.dims[1]};
    return {mesh.dims[0], mesh.dims[1], mesh.dims[2]};
}

int cmd_run(const std::string& config_path, const std::string& preset, const std::string& out_dir,
            const std::vector<std::string>& overrides, int snapshot_every) {
    RunConfig cfg;
    if (!config_path.empty())
        cfg = parse_config(slurp(config_path));
    else if (!preset.empty())
        cfg = parse_config("preset = " + preset + "\n");
    else
        throw ConfigError("run: need --config or --preset");
    for (const auto& ov : overrides) apply_override(cfg, ov);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (snapshot_every >= 0) cfg.snapshot_every = snapshot_every;

    const ProblemSpec problem = make_problem(cfg);
    fs::create_directories(cfg.out_dir);
    {
        std::ofstream echo(fs::path(cfg.out_dir) / "config.echo");
        echo << config_echo(cfg);
    }

    const auto dims = field_dims(problem.mesh);
    IterationCallback snapshot;
    if (cfg.snapshot_every > 0) {
        snapshot = [&](const IterationRecord& rec, const DesignState& state) {
            if (rec.k % cfg.snapshot_every != 0) return;
            const auto path =
                fs::path(cfg.out_dir) / ("rho_" + std::to_string(rec.k) + ".field");
            write_density_field(path.string(), state.rho, dims);
        };
    }

    const RunResult result = run_loop(problem, snapshot);
    write_iteration_log((fs::path(cfg.out_dir) / "log.csv").string(), result.records);
    write_density_field((fs::path(cfg.out_dir) / "final.field").string(), result.state.rho, dims);
    if (problem.mesh.dim == 2)
        export_image((fs::path(cfg.out_dir) / "final.pgm").string(), result.state.rho, dims);
    export_vtk((fs::path(cfg.out_dir) / "final.vtk").string(), problem.mesh, result.state.rho);

    if (result.failed) {
        std::cerr << "analysis failed at iteration " << result.records.size() << ": "
                  << result.failure << "\n";
        return result.failure_exit_code;
    }
    const auto& last = result.records.back();
    std::cout << "iterations: " << last.k << (result.converged ? " (converged)" : "") << "\n"
              << "g0: " << last.g0 << "\n"
              << "V: " << last.volume << "\n"
              << "n_active: " << last.n_active << "\n";
    return 0;
}

int cmd_study(const std::string& out_dir) {
    fs::create_directories(out_dir);
    const StudySetup setup;
    const char* names[] = {"A1", "A2", "A3", "A4"};
    const Scheme schemes[] = {Scheme::sensitivity_filter, Scheme::density_filter,
                              Scheme::threshold, Scheme::hpm};
    for (int i = 0; i < 4; ++i) {
        const auto rep = propagation_maps(schemes[i]);
        const std::vector<int> dims = {rep.mesh.dims[0], rep.mesh.dims[1]};
        const std::string base = (fs::path(out_dir) / names[i]).string();
        write_density_field(base + "_rho.field", rep.rho, dims);
        write_density_field(base + "_energy_nd.field", rep.energy_nd, dims);
        write_density_field(base + "_energy.field", rep.energy, dims);
        write_density_field(base + "_dc_drho.field", rep.dc_drho, dims);
        write_density_field(base + "_dc_dphi.field", rep.dc_dphi, dims);
        write_density_field(base + "_growth.field", rep.growth, dims);
        export_image(base + "_rho.pgm", rep.rho, dims);
        Vector growth_clamped = rep.growth.cwiseMax(0.0).cwiseMin(1.0);
        export_image(base + "_growth.pgm", growth_clamped, dims);
        const Real reach = support_reach(rep.mesh, rep.growth, rep.rho);
        std::cout << names[i] << ": growth support reach " << reach << " (element lengths), "
                  << "2*rmin = " << 2 * setup.rmin_elems << "\n";
    }
    return 0;
}

int cmd_checkgrad(const std::string& problem) {
    std::vector<GradientAudit> audits;
    if (problem == "all")
        audits = run_all_gradient_audits();
    else
        audits.push_back(run_gradient_audit(problem));
    bool ok = true;
    for (const auto& a : audits) {
        std::cout << a.name << ": max rel error " << a.max_rel_error << " (tolerance "
                  << a.tolerance << ", " << a.n_vars << " variables, " << a.seconds << " s) "
                  << (a.passed() ? "PASS" : "FAIL") << "\n";
        ok = ok && a.passed();
    }
    return ok ? 0 : 3;
}

int cmd_report(const std::string& log_path) {
    const auto records = read_iteration_log(log_path);
    if (records.empty()) {
        std::cout << "empty log\n";
        return 0;
    }
    const auto& last = records.back();
    Real seconds = 0.0;
    int min_active = records.front().n_active, max_active = 0, reintro_events = 0;
    for (const auto& r : records) {
        seconds += r.seconds;
        min_active = std::min(min_active, r.n_active);
        max_active = std::max(max_active, r.n_active);
        if (r.reintroduced > 0) ++reintro_events;
    }
    std::cout << "iterations: " << last.k << "\n"
              << "final g0: " << last.g0 << "\n"
              << "final V: " << last.volume << "\n"
              << "tau_phi: " << last.tau_phi << ", tau_g0: " << last.tau_g0 << "\n"
              << "n_active range: [" << min_active << ", " << max_active << "]\n"
              << "iterations with reintroduction: " << reintro_events << "\n"
              << "total seconds: " << seconds << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"density-based topology optimization with adaptive element removal"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir, problem = "all", log_path;
    std::vector<std::string> overrides;
    int snapshot_every = -1;

    auto* run = app.add_subcommand("run", "run one benchmark");
    run->add_option("--config", config_path, "config file");
    run->add_option("--preset", preset, "preset name");
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--override", overrides, "key=value override (repeatable)");
    run->add_option("--snapshot-every", snapshot_every, "write a density snapshot every k iterations");

    auto* study = app.add_subcommand("study", "sensitivity/topology propagation study");
    study->add_option("--out", out_dir, "output directory")->required();

    auto* checkgrad = app.add_subcommand("checkgrad", "finite-difference gradient audit");
    checkgrad->add_option("--problem", problem,
                          "all | compliance | inverter | nonlinear | vibration | buckling");

    auto* report = app.add_subcommand("report", "summarize an iteration log");
    report->add_option("--log", log_path, "log.csv path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, preset, out_dir, overrides, snapshot_every);
        if (study->parsed()) return cmd_study(out_dir);
        if (checkgrad->parsed()) return cmd_checkgrad(problem);
        if (report->parsed()) return cmd_report(log_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidSpecError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DisconnectionError& e) {
        std::cerr << "disconnection error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "analysis failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
