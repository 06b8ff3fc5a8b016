#include "doctest.h"

#include "topo/io.hpp"
#include "topo/run_loop.hpp"
#include "support/oracles.hpp"

using namespace topo;

namespace {

ProblemSpec small_cantilever(const std::string& extra = "") {
    RunConfig cfg = parse_config("preset = cantilever2d\ndims = 16 6\nmax_iters = 12\n" + extra);
    return make_problem(cfg);
}

}  // namespace

TEST_CASE("zero iterations returns the initial state and an empty log") {
    auto p = small_cantilever("");
    p.max_iterations = 0;
    const auto res = run_loop(p);
    CHECK(res.records.empty());
    CHECK(!res.failed);
    CHECK(res.state.phi.size() == p.mesh.elem_count);
    // uniform seed, already feasible in density space
    CHECK((res.state.phi.array() == res.state.phi[0]).all());
}

TEST_CASE("standard approach keeps every DOF active") {
    const auto p = small_cantilever("rhot = none\n");
    const auto res = run_loop(p);
    REQUIRE(!res.failed);
    REQUIRE(res.records.size() == 12);
    const int expected = res.records.front().n_active;
    for (const auto& r : res.records) {
        CHECK(r.n_active == expected);
        CHECK(r.reduced_dim == expected);
        CHECK(r.removed == 0);
        CHECK(r.reintroduced == 0);
    }
}

TEST_CASE("removal reduces the active count once topology forms") {
    const auto p = make_problem(parse_config(
        "preset = cantilever2d\ndims = 24 12\nvmax = 0.3\nrhot = 0.01\nmax_iters = 60\n"));
    const auto res = run_loop(p);
    REQUIRE(!res.failed);
    const int total = res.records.front().n_active;
    CHECK(res.records.back().n_active < total);
}

TEST_CASE("volume feasibility and box bounds at every accepted iterate") {
    const auto p = small_cantilever("rhot = 0.01\nmax_iters = 25\n");
    std::vector<Real> volumes;
    const auto res = run_loop(p, [&](const IterationRecord& rec, const DesignState& s) {
        volumes.push_back(rec.volume);
        CHECK(s.phi.minCoeff() >= 0.0);
        CHECK(s.phi.maxCoeff() <= 1.0);
    });
    REQUIRE(!res.failed);
    for (Real v : volumes) CHECK(v <= p.vmax + 1e-6);
}

TEST_CASE("OC compliance is non-increasing at fixed parameters") {
    // constant eta/beta, no removal: each accepted OC step may not worsen g0
    const auto p = small_cantilever("rhot = none\neta = 3\nbeta = 8\nmax_iters = 10\n");
    const auto res = run_loop(p);
    REQUIRE(!res.failed);
    for (size_t i = 1; i < res.records.size(); ++i)
        CHECK(res.records[i].g0 <= res.records[i - 1].g0 * (1.0 + 1e-10));
}

TEST_CASE("iteration records replay the continuation schedules exactly") {
    const auto p = small_cantilever("rhot = schedule\nrhot_schedule = 0:0.02:5:0.08\n"
                                    "eta = 2:0.5:4:6\nmax_iters = 20\n");
    const auto res = run_loop(p);
    REQUIRE(!res.failed);
    for (const auto& r : res.records) {
        CHECK(r.eta == p.eta_schedule.value_at(r.k));
        CHECK(r.rho_t == p.rho_t_schedule.value_at(r.k));
        CHECK(r.beta == p.beta_schedule->value_at(r.k));
    }
}

TEST_CASE("runs are deterministic") {
    const auto p = small_cantilever("rhot = 0.01\n");
    const auto a = run_loop(p);
    const auto b = run_loop(p);
    REQUIRE(a.records.size() == b.records.size());
    for (size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].g0 == b.records[i].g0);
        CHECK(a.records[i].tau_phi == b.records[i].tau_phi);
        CHECK(a.records[i].n_active == b.records[i].n_active);
    }
    CHECK((a.state.rho - b.state.rho).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("evaluate_design reproduces the first recorded objective") {
    auto p = small_cantilever("rhot = 0.01\n");
    const Vector phi0 = Vector::Constant(p.mesh.elem_count, 0.12);
    p.initial_phi = phi0;
    const auto res = run_loop(p);
    REQUIRE(!res.failed);
    const FilterOperator filt = build_filter(p.mesh, p.rmin);
    const auto eval = evaluate_design(p, filt, phi0, p.eta_schedule.value_at(1),
                                      p.beta_schedule->value_at(1), p.rho_t_at(1));
    CHECK(eval.g0 == doctest::Approx(res.records.front().g0).epsilon(1e-12));
}

TEST_CASE("an unsolvable design stops the loop with a diagnostic") {
    auto p = small_cantilever("rhot = 0.3\nbeta = 0\n");
    // start from a design that sits entirely below the threshold
    p.initial_phi = Vector::Constant(p.mesh.elem_count, 0.05);
    const auto res = run_loop(p);
    CHECK(res.failed);
    CHECK(!res.failure.empty());
    CHECK((res.failure_exit_code == 3 || res.failure_exit_code == 4));
}

TEST_CASE("mini paired run: removal tracks the standard objective") {
    // desk-scale analogue of the paired-run claim, small enough for a unit test
    const std::string base = "preset = cantilever2d\ndims = 24 8\nmax_iters = 60\n";
    const auto ref = run_loop(make_problem(parse_config(base + "rhot = none\n")));
    const auto rem = run_loop(make_problem(parse_config(base + "rhot = 0.01\n")));
    REQUIRE(!ref.failed);
    REQUIRE(!rem.failed);
    const Real g_ref = ref.records.back().g0;
    const Real g_rem = rem.records.back().g0;
    CHECK(std::abs(g_rem - g_ref) / std::abs(g_ref) < 0.05);
}
