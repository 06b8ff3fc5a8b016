#include "doctest.h"

#include "topo/element.hpp"
#include "topo/material.hpp"
#include "topo/mesh.hpp"
#include "support/oracles.hpp"

#include <Eigen/Eigenvalues>

using namespace topo;

TEST_CASE("smallest grid: 1x1") {
    const auto m = build_mesh_2d(1, 1, 1.0);
    CHECK(m.node_count == 4);
    CHECK(m.elem_count == 1);
    CHECK(m.total_dofs() == 8);
}

TEST_CASE("2x2 grid shares the center node") {
    const auto m = build_mesh_2d(2, 2);
    CHECK(m.node_count == 9);
    CHECK(m.elem_count == 4);
    const int center = m.node_id(1, 1);
    int touching = 0;
    for (int e = 0; e < 4; ++e)
        for (int a = 0; a < 4; ++a)
            if (m.conn(e, a) == center) ++touching;
    CHECK(touching == 4);
}

TEST_CASE("2x1x1 grid, 3 DOFs per node") {
    const auto m = build_mesh_3d(2, 1, 1);
    CHECK(m.node_count == 12);
    CHECK(m.elem_count == 2);
    CHECK(m.total_dofs() == 36);
}

TEST_CASE("connectivity is deterministic and distinct per element") {
    const auto a = build_mesh_2d(5, 3, 0.7);
    const auto b = build_mesh_2d(5, 3, 0.7);
    CHECK(a.conn == b.conn);
    for (int e = 0; e < a.elem_count; ++e)
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) CHECK(a.conn(e, i) != a.conn(e, j));
}

TEST_CASE("mesh rejects degenerate input") {
    const int bad[2] = {0, 3};
    CHECK_THROWS_AS(build_mesh(bad, 1.0, 2), InvalidSpecError);
    const int ok[2] = {2, 2};
    CHECK_THROWS_AS(build_mesh(ok, -1.0, 2), InvalidSpecError);
}

TEST_CASE("Q4 stiffness is symmetric PSD with three rigid modes") {
    const Matrix ke = element_stiffness(ElementKind::q4_plane_stress, 1.0, 0.3);
    CHECK((ke - ke.transpose()).cwiseAbs().maxCoeff() < 1e-14);

    Eigen::SelfAdjointEigenSolver<Matrix> es(ke);
    const Real scale = ke.cwiseAbs().maxCoeff();
    int null_dim = 0;
    for (int i = 0; i < 8; ++i) {
        CHECK(es.eigenvalues()[i] > -1e-12 * scale);
        if (std::abs(es.eigenvalues()[i]) < 1e-10 * scale) ++null_dim;
    }
    CHECK(null_dim == 3);

    Vector rigid_x(8);
    rigid_x << 1, 0, 1, 0, 1, 0, 1, 0;
    CHECK((ke * rigid_x).cwiseAbs().maxCoeff() < 1e-12 * scale);
}

TEST_CASE("Q4 stiffness matches the independent quadrature oracle") {
    for (Real h : {1.0, 0.25}) {
        const Matrix ke = element_stiffness(ElementKind::q4_plane_stress, h, 0.3);
        const Matrix ref = oracle::q4_stiffness(1.0, 0.3, h, 1.0);
        CHECK((ke - ref).cwiseAbs().maxCoeff() < 1e-13 * ref.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("Q4 stiffness scales linearly with the modulus") {
    const Matrix k1 = element_stiffness(ElementKind::q4_plane_stress, 1.0, 0.3);
    const Matrix k2 = oracle::q4_stiffness(3.5, 0.3, 1.0, 1.0);
    CHECK((3.5 * k1 - k2).cwiseAbs().maxCoeff() < 1e-12 * k2.cwiseAbs().maxCoeff());
}

TEST_CASE("H8 stiffness is symmetric PSD with six rigid modes") {
    const Matrix ke = element_stiffness(ElementKind::h8, 1.0, 0.3);
    CHECK((ke - ke.transpose()).cwiseAbs().maxCoeff() < 1e-13);
    Eigen::SelfAdjointEigenSolver<Matrix> es(ke);
    const Real scale = ke.cwiseAbs().maxCoeff();
    int null_dim = 0;
    for (int i = 0; i < 24; ++i) {
        CHECK(es.eigenvalues()[i] > -1e-12 * scale);
        if (std::abs(es.eigenvalues()[i]) < 1e-10 * scale) ++null_dim;
    }
    CHECK(null_dim == 6);
}

TEST_CASE("consistent Q4 mass reproduces the element mass") {
    const Real h = 0.5, t = 0.7;
    const Matrix me = element_mass(ElementKind::q4_plane_stress, h, t);
    Vector ones_x(8);
    ones_x << 1, 0, 1, 0, 1, 0, 1, 0;
    CHECK(ones_x.dot(me * ones_x) == doctest::Approx(h * h * t).epsilon(1e-12));
    const Matrix ml = element_mass_lumped(ElementKind::q4_plane_stress, h, t);
    CHECK(ml.diagonal().sum() == doctest::Approx(2 * h * h * t).epsilon(1e-12));
}

TEST_CASE("plane-stress Lame pair reproduces the constitutive matrix") {
    const auto mat = MaterialConstants::make(210e9, 0.0, 0.3, 2);
    const auto d = plane_stress_matrix(mat.E0, mat.nu);
    CHECK(mat.lambda_bar + 2 * mat.mu_bar == doctest::Approx(d(0, 0)).epsilon(1e-12));
    CHECK(mat.lambda_bar == doctest::Approx(d(0, 1)).epsilon(1e-12));
    CHECK(mat.mu_bar == doctest::Approx(d(2, 2)).epsilon(1e-12));
}

TEST_CASE("interpolation laws hit their anchors") {
    InterpolationLaw simp{InterpKind::simp, 1.0, 0.0, 3.0, 1.0};
    CHECK(interpolate(simp, 0.5).value == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(interpolate(simp, 1.0).value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(interpolate(simp, 0.0).value == doctest::Approx(0.0).epsilon(1e-14));

    InterpolationLaw ramp{InterpKind::ramp, 2.0, 0.5, 0.0, 1.0};
    for (Real r : {0.0, 0.3, 1.0})
        CHECK(interpolate(ramp, r).value == doctest::Approx(0.5 + 1.5 * r).epsilon(1e-14));

    InterpolationLaw ramp24{InterpKind::ramp, 1.0, 0.0, 24.0, 1.0};
    CHECK(interpolate(ramp24, 0.5).value == doctest::Approx(0.5 / 13.0).epsilon(1e-14));

    InterpolationLaw bad{InterpKind::simp, 1.0, 0.0, -1.0, 1.0};
    CHECK_THROWS_AS(interpolate(bad, 0.5), InvalidSpecError);
}

TEST_CASE("interpolation derivatives match finite differences away from zero") {
    const Real fd_step = 1e-7;
    for (InterpKind kind : {InterpKind::simp, InterpKind::ramp, InterpKind::stress_power,
                            InterpKind::linear_mass}) {
        InterpolationLaw law{kind, 3.0, 0.01, 3.0, 2.0};
        for (Real r : {0.2, 0.5, 0.9}) {
            const Real fd =
                (interpolate(law, r + fd_step).value - interpolate(law, r - fd_step).value) /
                (2 * fd_step);
            CHECK(interpolate(law, r).derivative ==
                  doctest::Approx(fd).epsilon(1e-6));
        }
    }
}
