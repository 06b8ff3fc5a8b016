#include "doctest.h"

#include "topo/io.hpp"
#include "topo/run_loop.hpp"
#include "support/oracles.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace topo;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("minimal config fills defaults and validates") {
    const auto cfg = parse_config("preset = cantilever2d\n");
    const auto p = make_problem(cfg);
    CHECK(p.vmax == doctest::Approx(0.5));
    CHECK(p.mesh.dims[0] == 160);
    CHECK(p.mesh.dims[1] == 40);
    CHECK(p.optimizer == OptimizerKind::oc);
    CHECK(p.removal == RemovalMode::none);
}

TEST_CASE("config rejects bad input") {
    CHECK_THROWS_AS(parse_config("preset = cantilever2d\nrhot = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("preset = cantilever2d\nnot_a_key = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("preset = cantilever2d\neta = 2:-0.5:25:6\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("vmax = 0.5\n"), ConfigError);  // missing preset
    CHECK_THROWS_AS(parse_config("preset = cantilever2d\nvmax\n"), ConfigError);
}

TEST_CASE("config echo round trips") {
    const std::string text =
        "preset = inverter\ndims = 40 20\nrhot = 0.1\neta = 2:0.2:20:8\nvmax = 0.3\n"
        "optimizer = mma\nmax_iters = 50\n";
    const auto cfg = parse_config(text);
    const auto cfg2 = parse_config(config_echo(cfg));
    CHECK(cfg2.preset == cfg.preset);
    CHECK(cfg2.dims == cfg.dims);
    CHECK(cfg2.rhot == cfg.rhot);
    CHECK(cfg2.vmax == cfg.vmax);
    CHECK(cfg2.max_iters == cfg.max_iters);
    CHECK(config_echo(cfg2) == config_echo(cfg));
}

TEST_CASE("overrides apply on top of a config") {
    auto cfg = parse_config("preset = cantilever2d\nvmax = 0.5\n");
    apply_override(cfg, "vmax=0.4");
    apply_override(cfg, "rhot=0.05");
    CHECK(cfg.vmax == doctest::Approx(0.4));
    CHECK(cfg.rhot_mode == "fixed");
    CHECK_THROWS_AS(apply_override(cfg, "nonsense"), ConfigError);
}

TEST_CASE("density fields round trip bit for bit") {
    Vector field(6);
    field << 0.0, 0.25, 1.0 / 3.0, 0.5, 0.999999999999, 1.0;
    std::stringstream ss;
    write_density_field(ss, field, {3, 2});
    const auto back = read_density_field(ss);
    REQUIRE(back.dims == std::vector<int>{3, 2});
    for (int i = 0; i < 6; ++i) CHECK(back.values[i] == field[i]);

    // 3D round trip
    Vector f3 = oracle::random_vector(2 * 2 * 2, 0.0, 1.0, 3);
    std::stringstream s3;
    write_density_field(s3, f3, {2, 2, 2});
    const auto b3 = read_density_field(s3);
    REQUIRE(b3.dims == std::vector<int>{2, 2, 2});
    for (int i = 0; i < 8; ++i) CHECK(b3.values[i] == f3[i]);

    CHECK_THROWS_AS(write_density_field(ss, field, {4, 2}), InvalidSpecError);
    std::stringstream bad("dims: 2 2\n0 0 0\n");
    CHECK_THROWS_AS(read_density_field(bad), InvalidSpecError);
}

TEST_CASE("2x2 field writes four values after the header in id order") {
    Vector field(4);
    field << 0.0, 0.25, 0.5, 1.0;
    std::stringstream ss;
    write_density_field(ss, field, {2, 2});
    std::string header;
    std::getline(ss, header);
    CHECK(header == "dims: 2 2");
    Real v;
    std::vector<Real> vals;
    while (ss >> v) vals.push_back(v);
    REQUIRE(vals.size() == 4);
    CHECK(vals[0] == 0.0);
    CHECK(vals[1] == 0.25);
    CHECK(vals[2] == 0.5);
    CHECK(vals[3] == 1.0);
}

TEST_CASE("iteration log round trips and is numeric CSV") {
    IterationRecord r;
    r.k = 1;
    r.g0 = 123.456;
    r.volume = 0.5;
    r.n_active = 42;
    r.reduced_dim = 42;
    r.eta = 3.0;
    r.beta = 32.0;
    r.rho_t = 0.01;
    r.seconds = 0.125;
    std::stringstream ss;
    write_iteration_log(ss, {r});
    std::string line;
    int lines = 0;
    while (std::getline(ss, line)) ++lines;
    CHECK(lines == 2);

    const auto path = temp_path("topo_test_log.csv");
    write_iteration_log(path, {r});
    const auto back = read_iteration_log(path);
    REQUIRE(back.size() == 1);
    CHECK(back[0].g0 == r.g0);
    CHECK(back[0].n_active == 42);
    std::remove(path.c_str());
}

TEST_CASE("PGM payload anchors") {
    const auto path = temp_path("topo_test.pgm");

    export_image(path, Vector::Ones(4), {2, 2});
    auto bytes = slurp_binary(path);
    // header P5, dims, 255, then payload of zeros (solid = black)
    REQUIRE(bytes.size() >= 4);
    const std::string payload1 = bytes.substr(bytes.size() - 4);
    for (char c : payload1) CHECK(static_cast<unsigned char>(c) == 0);

    export_image(path, Vector::Zero(4), {2, 2});
    bytes = slurp_binary(path);
    const std::string payload0 = bytes.substr(bytes.size() - 4);
    for (char c : payload0) CHECK(static_cast<unsigned char>(c) == 255);

    Vector two(2);
    two << 0.0, 1.0;
    export_image(path, two, {2, 1});
    bytes = slurp_binary(path);
    CHECK(static_cast<unsigned char>(bytes[bytes.size() - 2]) == 255);
    CHECK(static_cast<unsigned char>(bytes[bytes.size() - 1]) == 0);

    CHECK_THROWS_AS(export_image(path, Vector::Ones(8), {2, 2, 2}), InvalidSpecError);
    std::remove(path.c_str());
}

TEST_CASE("PGM bytes are deterministic") {
    const auto p1 = temp_path("topo_det1.pgm");
    const auto p2 = temp_path("topo_det2.pgm");
    const Vector field = oracle::random_vector(12, 0.0, 1.0, 77);
    export_image(p1, field, {4, 3});
    export_image(p2, field, {4, 3});
    CHECK(slurp_binary(p1) == slurp_binary(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("VTK structured points carries cell and point data") {
    const auto mesh = build_mesh_2d(3, 2, 0.5);
    const Vector rho = oracle::random_vector(mesh.elem_count, 0.0, 1.0, 9);
    const Vector u = oracle::random_vector(mesh.total_dofs(), -1.0, 1.0, 10);
    const auto path = temp_path("topo_test.vtk");
    export_vtk(path, mesh, rho, &u);

    std::ifstream f(path);
    std::string line;
    int cell_count = -1, point_count = -1;
    std::vector<Real> cells;
    bool in_cells = false;
    while (std::getline(f, line)) {
        if (line.rfind("CELL_DATA", 0) == 0) cell_count = std::stoi(line.substr(10));
        if (line.rfind("POINT_DATA", 0) == 0) {
            point_count = std::stoi(line.substr(11));
            in_cells = false;
        }
        if (in_cells && !line.empty() && line.find("LOOKUP") == std::string::npos)
            cells.push_back(std::stod(line));
        if (line.rfind("SCALARS", 0) == 0) in_cells = true;
    }
    CHECK(cell_count == mesh.elem_count);
    CHECK(point_count == mesh.node_count);
    REQUIRE(static_cast<int>(cells.size()) == mesh.elem_count);
    // x-fastest cell ordering; values must match the source bit for bit
    int idx = 0;
    for (int iy = 0; iy < mesh.dims[1]; ++iy)
        for (int ix = 0; ix < mesh.dims[0]; ++ix)
            CHECK(cells[idx++] == rho[mesh.elem_id(ix, iy)]);
    std::remove(path.c_str());

    // single element: exactly one cell datum
    const auto tiny = build_mesh_2d(1, 1);
    const auto tiny_path = temp_path("topo_tiny.vtk");
    export_vtk(tiny_path, tiny, Vector::Constant(1, 0.7));
    std::ifstream tf(tiny_path);
    bool saw = false;
    while (std::getline(tf, line))
        if (line.rfind("CELL_DATA", 0) == 0) {
            CHECK(std::stoi(line.substr(10)) == 1);
            saw = true;
        }
    CHECK(saw);
    std::remove(tiny_path.c_str());
}

TEST_CASE("identical configs produce identical logs and fields") {
    const std::string cfg_text = "preset = cantilever2d\ndims = 12 4\nmax_iters = 6\nrhot = 0.01\n";
    auto run_once = [&](const std::string& tag) {
        const auto p = make_problem(parse_config(cfg_text));
        const auto res = run_loop(p);
        const auto field_path = temp_path("topo_det_field_" + tag);
        write_density_field(field_path, res.state.rho, {12, 4});
        return slurp_binary(field_path);
    };
    CHECK(run_once("a") == run_once("b"));
}
