#include "doctest.h"

#include "topo/design.hpp"
#include "topo/filter.hpp"
#include "topo/projection.hpp"
#include "support/oracles.hpp"

#include <cmath>

using namespace topo;

namespace {

FilterOperator strip_filter(int n, Real rmin) {
    const auto mesh = build_mesh_2d(n, 1);
    return build_filter(mesh, rmin);
}

}  // namespace

TEST_CASE("sub-spacing radius keeps only the element itself") {
    const auto mesh = build_mesh_2d(4, 3);
    const auto f = build_filter(mesh, 0.9);
    for (int e = 0; e < mesh.elem_count; ++e) {
        REQUIRE(f.neighbors[e].size() == 1);
        CHECK(f.neighbors[e][0].first == e);
        CHECK(f.neighbors[e][0].second == doctest::Approx(1.0));
    }
}

TEST_CASE("hat weight at one element spacing, rmin = 1.5 h") {
    const auto f = strip_filter(3, 1.5);
    bool found = false;
    for (const auto& [i, w] : f.neighbors[1])
        if (i == 0) {
            found = true;
            CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
        }
    CHECK(found);
}

TEST_CASE("interior neighborhood size is 21 for rmin = 2.5 h on 40x20") {
    const auto mesh = build_mesh_2d(40, 20);
    const auto f = build_filter(mesh, 2.5);
    const int interior = mesh.elem_id(20, 10);
    CHECK(f.neighbors[interior].size() == 21);
}

TEST_CASE("filtering preserves constants and convex bounds") {
    const auto mesh = build_mesh_2d(12, 7);
    const auto f = build_filter(mesh, 2.5);
    const Vector c = Vector::Constant(mesh.elem_count, 0.37);
    CHECK((apply_filter(f, c) - c).cwiseAbs().maxCoeff() < 1e-14);

    const Vector phi = oracle::random_vector(mesh.elem_count, 0.0, 1.0, 17);
    const Vector mu = apply_filter(f, phi);
    CHECK(mu.minCoeff() >= phi.minCoeff() - 1e-14);
    CHECK(mu.maxCoeff() <= phi.maxCoeff() + 1e-14);
}

TEST_CASE("hand-computed center value on a 3-element strip") {
    const auto f = strip_filter(3, 1.5);
    Vector phi(3);
    phi << 0, 1, 0;
    const Vector mu = apply_filter(f, phi);
    CHECK(mu[1] == doctest::Approx(1.0 / (1.0 + 2.0 / 3.0)).epsilon(1e-14));
}

TEST_CASE("Heaviside projection anchors") {
    Vector mu = oracle::random_vector(100, 0.0, 1.0, 3);
    auto p0 = heaviside_project(mu, 0.0);
    CHECK((p0.rho - mu).cwiseAbs().maxCoeff() < 1e-15);

    for (Real beta : {1.0, 8.0, 32.0}) {
        CHECK(heaviside(1.0, beta) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(heaviside(0.0, beta) == 0.0);
    }
    CHECK(heaviside(0.1, 32.0) ==
          doctest::Approx(1.0 - std::exp(-3.2) + 0.1 * std::exp(-32.0)).epsilon(1e-15));
    CHECK_THROWS_AS(heaviside_project(mu, -1.0), InvalidSpecError);
}

TEST_CASE("Heaviside projection is increasing in mu") {
    // strictly at moderate beta; at beta = 40 the top saturates to 1.0 in
    // double precision, so only monotonicity is checkable there
    for (Real beta : {0.0, 4.0, 8.0}) {
        Real prev = -1.0;
        for (Real m = 0.0; m <= 1.0; m += 0.01) {
            const Real r = heaviside(m, beta);
            CHECK(r > prev);
            prev = r;
        }
    }
    Real prev = -1.0;
    for (Real m = 0.0; m <= 1.0; m += 0.01) {
        const Real r = heaviside(m, 40.0);
        CHECK(r >= prev);
        prev = r;
    }
}

TEST_CASE("projection derivatives match central differences up to beta = 64") {
    const Real step = 1e-7;
    for (Real beta : {0.5, 8.0, 64.0}) {
        for (Real m : {0.05, 0.3, 0.7, 0.95}) {
            const Real fd = (heaviside(m + step, beta) - heaviside(m - step, beta)) / (2 * step);
            CHECK(heaviside_derivative(m, beta) == doctest::Approx(fd).epsilon(1e-6));
            const Real fdt = (smoothed_threshold(m + step, beta, 0.5) -
                              smoothed_threshold(m - step, beta, 0.5)) /
                             (2 * step);
            CHECK(smoothed_threshold_derivative(m, beta, 0.5) == doctest::Approx(fdt).epsilon(1e-6));
        }
    }
}

TEST_CASE("threshold projection anchors") {
    CHECK(smoothed_threshold(0.5, 17.0, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(smoothed_threshold(0.0, 40.0, 0.5) < 1e-8);
    CHECK(smoothed_threshold(1.0, 40.0, 0.5) > 1.0 - 1e-8);
    Vector mu(1);
    mu << 0.5;
    CHECK_THROWS_AS(threshold_project(mu, 1.0, 1.5), InvalidSpecError);
    CHECK_THROWS_AS(threshold_project(mu, -1.0, 0.5), InvalidSpecError);
}

TEST_CASE("backprop is linear and zero-preserving") {
    const auto mesh = build_mesh_2d(10, 6);
    const auto f = build_filter(mesh, 2.5);
    const Vector zero = Vector::Zero(mesh.elem_count);
    const Vector ones = Vector::Ones(mesh.elem_count);
    CHECK(chain_rule_backprop(f, ones, zero).cwiseAbs().maxCoeff() == 0.0);

    const Vector a = oracle::random_vector(mesh.elem_count, -1.0, 1.0, 5);
    const Vector b = oracle::random_vector(mesh.elem_count, -1.0, 1.0, 6);
    const Vector lhs = chain_rule_backprop(f, ones, a + 2.0 * b);
    const Vector rhs = chain_rule_backprop(f, ones, a) + 2.0 * chain_rule_backprop(f, ones, b);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("backprop is the identity for sub-spacing radius at beta = 0") {
    const auto mesh = build_mesh_2d(5, 4);
    const auto f = build_filter(mesh, 1.0);
    const Vector s = oracle::random_vector(mesh.elem_count, -2.0, 2.0, 7);
    const Vector out = chain_rule_backprop(f, Vector::Ones(mesh.elem_count), s);
    CHECK((out - s).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("backprop support reaches exactly the filter radius") {
    const auto mesh = build_mesh_2d(40, 20);
    const Real rmin = 2.5;
    const auto f = build_filter(mesh, rmin);
    Vector delta = Vector::Zero(mesh.elem_count);
    const int src = mesh.elem_id(20, 10);
    delta[src] = 1.0;
    const Vector out = chain_rule_backprop(f, Vector::Ones(mesh.elem_count), delta);
    for (int e = 0; e < mesh.elem_count; ++e) {
        const Real d = (mesh.centroid(e) - mesh.centroid(src)).norm();
        if (out[e] != 0.0) CHECK(d < rmin);
        if (d < rmin - 1e-12) CHECK(out[e] > 0.0);
    }
}

TEST_CASE("one backprop plus one forward pass spans two filter radii") {
    const auto mesh = build_mesh_2d(40, 20);
    const Real rmin = 2.5;
    const auto f = build_filter(mesh, rmin);
    Vector delta = Vector::Zero(mesh.elem_count);
    const int src = mesh.elem_id(20, 10);
    delta[src] = 1.0;

    DesignState s;
    s.scheme = Scheme::hpm;
    s.beta = 40.0;
    s.phi = chain_rule_backprop(f, Vector::Ones(mesh.elem_count), delta).cwiseAbs();
    forward_map(s, f);
    for (int e = 0; e < mesh.elem_count; ++e) {
        const Real d = (mesh.centroid(e) - mesh.centroid(src)).norm();
        if (s.rho[e] != 0.0) CHECK(d < 2 * rmin);
        if (d <= 2 * (rmin - mesh.h)) CHECK(s.rho[e] > 0.0);
    }
}

TEST_CASE("sensitivity filter reduces to the input when phi = 1 and rmin <= h") {
    const auto mesh = build_mesh_2d(6, 4);
    const auto f = build_filter(mesh, 0.8);
    const Vector s = oracle::random_vector(mesh.elem_count, -1.0, 1.0, 11);
    const Vector out = sensitivity_filter(f, Vector::Ones(mesh.elem_count), s);
    CHECK((out - s).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("sensitivity filter keeps uniform fields uniform") {
    const auto mesh = build_mesh_2d(9, 5);
    const auto f = build_filter(mesh, 2.2);
    const Vector phi = Vector::Constant(mesh.elem_count, 0.4);
    const Vector s = Vector::Constant(mesh.elem_count, -2.5);
    const Vector out = sensitivity_filter(f, phi, s);
    CHECK((out - s).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sensitivity filter on a 3-element strip, hand computation") {
    const auto f = strip_filter(3, 1.5);
    Vector phi(3), s(3);
    phi << 0.5, 1.0, 0.5;
    s << 2.0, -3.0, 4.0;
    const Vector out = sensitivity_filter(f, phi, s);
    CHECK(out[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(out[1] == doctest::Approx(-1.2).epsilon(1e-14));
    CHECK(out[2] == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("chain rule gradient matches finite differences") {
    const auto mesh = build_mesh_2d(12, 6);
    const auto f = build_filter(mesh, 2.0);
    const Vector c = oracle::random_vector(mesh.elem_count, -1.0, 1.0, 23);
    const Vector phi0 = oracle::random_vector(mesh.elem_count, 0.2, 0.8, 24);
    const Real beta = 8.0;

    auto g = [&](const Vector& phi) {
        DesignState s;
        s.scheme = Scheme::hpm;
        s.beta = beta;
        s.phi = phi;
        forward_map(s, f);
        return c.dot(s.rho);
    };
    DesignState s;
    s.scheme = Scheme::hpm;
    s.beta = beta;
    s.phi = phi0;
    forward_map(s, f);
    const Vector analytic = backprop_to_phi(s, f, c);
    const Vector fd = oracle::central_fd(g, phi0, 1e-6);
    CHECK(oracle::gradient_error(analytic, fd) < 1e-5);
}

TEST_CASE("forward maps are componentwise monotone for A2-A4") {
    const auto mesh = build_mesh_2d(8, 5);
    const auto f = build_filter(mesh, 2.0);
    for (Scheme sch : {Scheme::density_filter, Scheme::threshold, Scheme::hpm}) {
        const Vector lo = oracle::random_vector(mesh.elem_count, 0.0, 0.7, 31);
        Vector hi = lo + oracle::random_vector(mesh.elem_count, 0.0, 0.3, 32);
        DesignState a, b;
        a.scheme = b.scheme = sch;
        a.beta = b.beta = 16.0;
        a.phi = lo;
        b.phi = hi;
        forward_map(a, f);
        forward_map(b, f);
        CHECK((b.mu - a.mu).minCoeff() >= -1e-14);
        CHECK((b.rho - a.rho).minCoeff() >= -1e-14);
    }
}

TEST_CASE("A2 equals A4 at beta = 0") {
    const auto mesh = build_mesh_2d(10, 5);
    const auto f = build_filter(mesh, 2.4);
    const Vector phi = oracle::random_vector(mesh.elem_count, 0.0, 1.0, 41);
    DesignState a2, a4;
    a2.scheme = Scheme::density_filter;
    a4.scheme = Scheme::hpm;
    a4.beta = 0.0;
    a2.phi = a4.phi = phi;
    forward_map(a2, f);
    forward_map(a4, f);
    CHECK((a2.rho - a4.rho).cwiseAbs().maxCoeff() < 1e-15);

    const Vector s = oracle::random_vector(mesh.elem_count, -1.0, 1.0, 42);
    CHECK((backprop_to_phi(a2, f, s) - backprop_to_phi(a4, f, s)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("volume fraction and non-discreteness anchors") {
    Vector rho(4);
    rho << 1.0, 0.0, 0.5, 0.25;
    CHECK(volume_fraction(rho) == doctest::Approx(0.4375).epsilon(1e-15));
    CHECK(volume_fraction(Vector::Ones(7)) == doctest::Approx(1.0));
    CHECK(volume_fraction(Vector::Constant(5, 0.5)) == doctest::Approx(0.5));

    Vector zero_one(6);
    zero_one << 0, 1, 1, 0, 1, 0;
    CHECK(non_discreteness(zero_one) == doctest::Approx(0.0));
    CHECK(non_discreteness(Vector::Constant(9, 0.5)) == doctest::Approx(1.0));
    Vector pair(2);
    pair << 0.1, 0.9;
    CHECK(non_discreteness(pair) == doctest::Approx(0.36).epsilon(1e-14));
}
