#include "topo/element.hpp"

#include <cmath>

namespace topo {

namespace {

constexpr Real kGauss = 0.5773502691896257;  // 1/sqrt(3)

// Shape function derivatives of the bilinear quad w.r.t. (xi, eta).
Eigen::Matrix<Real, 2, 4> q4_dN(Real xi, Real eta) {
    Eigen::Matrix<Real, 2, 4> d;
    d << -(1 - eta), (1 - eta), (1 + eta), -(1 + eta),
         -(1 - xi), -(1 + xi), (1 + xi), (1 - xi);
    return 0.25 * d;
}

Eigen::Vector4d q4_N(Real xi, Real eta) {
    return 0.25 * Eigen::Vector4d{(1 - xi) * (1 - eta), (1 + xi) * (1 - eta),
                                  (1 + xi) * (1 + eta), (1 - xi) * (1 + eta)};
}

// Trilinear hex: derivatives w.r.t. (xi, eta, zeta), standard ordering.
Eigen::Matrix<Real, 3, 8> h8_dN(Real xi, Real eta, Real ze) {
    const Real sx[8] = {-1, 1, 1, -1, -1, 1, 1, -1};
    const Real sy[8] = {-1, -1, 1, 1, -1, -1, 1, 1};
    const Real sz[8] = {-1, -1, -1, -1, 1, 1, 1, 1};
    Eigen::Matrix<Real, 3, 8> d;
    for (int a = 0; a < 8; ++a) {
        d(0, a) = 0.125 * sx[a] * (1 + sy[a] * eta) * (1 + sz[a] * ze);
        d(1, a) = 0.125 * sy[a] * (1 + sx[a] * xi) * (1 + sz[a] * ze);
        d(2, a) = 0.125 * sz[a] * (1 + sx[a] * xi) * (1 + sy[a] * eta);
    }
    return d;
}

Eigen::Matrix<Real, 8, 1> h8_N(Real xi, Real eta, Real ze) {
    const Real sx[8] = {-1, 1, 1, -1, -1, 1, 1, -1};
    const Real sy[8] = {-1, -1, 1, 1, -1, -1, 1, 1};
    const Real sz[8] = {-1, -1, -1, -1, 1, 1, 1, 1};
    Eigen::Matrix<Real, 8, 1> n;
    for (int a = 0; a < 8; ++a)
        n[a] = 0.125 * (1 + sx[a] * xi) * (1 + sy[a] * eta) * (1 + sz[a] * ze);
    return n;
}

}  // namespace

Eigen::Matrix3d plane_stress_matrix(Real E, Real nu) {
    Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
    const Real c = E / (1.0 - nu * nu);
    d(0, 0) = d(1, 1) = c;
    d(0, 1) = d(1, 0) = c * nu;
    d(2, 2) = c * (1.0 - nu) / 2.0;
    return d;
}

Eigen::Matrix<Real, 6, 6> iso3d_matrix(Real E, Real nu) {
    Eigen::Matrix<Real, 6, 6> d = Eigen::Matrix<Real, 6, 6>::Zero();
    const Real lam = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    const Real mu = E / (2.0 * (1.0 + nu));
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) d(i, j) = lam;
        d(i, i) = lam + 2.0 * mu;
        d(i + 3, i + 3) = mu;
    }
    return d;
}

Q4Quadrature q4_quadrature(Real h_e) {
    Q4Quadrature q;
    const Real pts[2] = {-kGauss, kGauss};
    const Real detJ = h_e * h_e / 4.0;  // J = diag(h/2)
    int g = 0;
    for (Real xi : pts)
        for (Real eta : pts) {
            q.grad[g] = (2.0 / h_e) * q4_dN(xi, eta);
            q.weight[g] = detJ;
            ++g;
        }
    return q;
}

Eigen::Matrix<Real, 3, 8> q4_strain_matrix(const Eigen::Matrix<Real, 2, 4>& grad) {
    Eigen::Matrix<Real, 3, 8> b = Eigen::Matrix<Real, 3, 8>::Zero();
    for (int a = 0; a < 4; ++a) {
        b(0, 2 * a) = grad(0, a);
        b(1, 2 * a + 1) = grad(1, a);
        b(2, 2 * a) = grad(1, a);
        b(2, 2 * a + 1) = grad(0, a);
    }
    return b;
}

Matrix element_stiffness(ElementKind kind, Real h_e, Real nu, Real thickness) {
    if (nu <= -1.0 || nu >= 0.5) throw InvalidSpecError("element_stiffness: Poisson ratio out of range");
    if (h_e <= 0.0) throw InvalidSpecError("element_stiffness: edge length must be positive");
    if (kind == ElementKind::q4_plane_stress) {
        const auto d = plane_stress_matrix(1.0, nu);
        const auto quad = q4_quadrature(h_e);
        Matrix ke = Matrix::Zero(8, 8);
        for (int g = 0; g < 4; ++g) {
            const auto b = q4_strain_matrix(quad.grad[g]);
            ke += quad.weight[g] * thickness * b.transpose() * d * b;
        }
        return ke;
    }
    const auto d = iso3d_matrix(1.0, nu);
    const Real pts[2] = {-kGauss, kGauss};
    const Real detJ = h_e * h_e * h_e / 8.0;
    Matrix ke = Matrix::Zero(24, 24);
    for (Real xi : pts)
        for (Real eta : pts)
            for (Real ze : pts) {
                const auto dn = (2.0 / h_e) * h8_dN(xi, eta, ze);
                Eigen::Matrix<Real, 6, 24> b = Eigen::Matrix<Real, 6, 24>::Zero();
                for (int a = 0; a < 8; ++a) {
                    b(0, 3 * a) = dn(0, a);
                    b(1, 3 * a + 1) = dn(1, a);
                    b(2, 3 * a + 2) = dn(2, a);
                    b(3, 3 * a + 1) = dn(2, a);
                    b(3, 3 * a + 2) = dn(1, a);
                    b(4, 3 * a) = dn(2, a);
                    b(4, 3 * a + 2) = dn(0, a);
                    b(5, 3 * a) = dn(1, a);
                    b(5, 3 * a + 1) = dn(0, a);
                }
                ke += detJ * b.transpose() * d * b;
            }
    return ke;
}

Matrix element_mass(ElementKind kind, Real h_e, Real thickness) {
    const Real pts[2] = {-kGauss, kGauss};
    if (kind == ElementKind::q4_plane_stress) {
        const Real detJ = h_e * h_e / 4.0;
        Matrix me = Matrix::Zero(8, 8);
        for (Real xi : pts)
            for (Real eta : pts) {
                const auto n = q4_N(xi, eta);
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b)
                        for (int c = 0; c < 2; ++c)
                            me(2 * a + c, 2 * b + c) += detJ * thickness * n[a] * n[b];
            }
        return me;
    }
    const Real detJ = h_e * h_e * h_e / 8.0;
    Matrix me = Matrix::Zero(24, 24);
    for (Real xi : pts)
        for (Real eta : pts)
            for (Real ze : pts) {
                const auto n = h8_N(xi, eta, ze);
                for (int a = 0; a < 8; ++a)
                    for (int b = 0; b < 8; ++b)
                        for (int c = 0; c < 3; ++c)
                            me(3 * a + c, 3 * b + c) += detJ * n[a] * n[b];
            }
    return me;
}

Matrix element_mass_lumped(ElementKind kind, Real h_e, Real thickness) {
    const Matrix consistent = element_mass(kind, h_e, thickness);
    Matrix lumped = Matrix::Zero(consistent.rows(), consistent.cols());
    for (Eigen::Index i = 0; i < consistent.rows(); ++i)
        lumped(i, i) = consistent.row(i).sum();
    return lumped;
}

}  // namespace topo
