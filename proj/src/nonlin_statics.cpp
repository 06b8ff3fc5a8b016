#include "topo/nonlin_statics.hpp"

#include "topo/assembly.hpp"
#include "topo/element.hpp"
#include "topo/solve.hpp"

#include <cmath>
#include <string>

namespace topo {

Real strain_energy_density(const Eigen::Matrix2d& F, Real lambda, Real mu) {
    const Eigen::Matrix2d C = F.transpose() * F;
    const Eigen::Matrix2d E = 0.5 * (C - Eigen::Matrix2d::Identity());
    const Real J = F.determinant();
    return 0.5 * lambda * (J - 1.0) * (J - 1.0) + mu * (E * E).trace();
}

Pk2Result pk2_stress(const Eigen::Matrix2d& F, Real lambda, Real mu) {
    const Real J = F.determinant();
    if (J <= 0.0) throw AnalysisFailureError("pk2_stress: non-positive Jacobian (inverted element)", J);
    const Eigen::Matrix2d C = F.transpose() * F;
    const Eigen::Matrix2d E = 0.5 * (C - Eigen::Matrix2d::Identity());
    const Eigen::Matrix2d Cinv = C.inverse();

    Pk2Result out;
    out.S = lambda * J * (J - 1.0) * Cinv + 2.0 * mu * E;

    // dS/dE = lambda (2J^2 - J) Cinv x Cinv
    //       - lambda (J^2 - J) (Cinv ⊠ Cinv)_sym + 2 mu I_sym,
    // assembled in Voigt order [11, 22, 12] vs engineering strain.
    const Real c11 = Cinv(0, 0), c22 = Cinv(1, 1), c12 = Cinv(0, 1);
    const Real k1 = lambda * (2.0 * J * J - J);
    const Real k2 = lambda * (J * J - J);
    Eigen::Matrix3d A;  // Cinv_ij Cinv_kl
    A << c11 * c11, c11 * c22, c11 * c12,
         c22 * c11, c22 * c22, c22 * c12,
         c12 * c11, c12 * c22, c12 * c12;
    Eigen::Matrix3d B;  // (Cinv_ik Cinv_lj + Cinv_il Cinv_kj) in Voigt slots
    B << 2 * c11 * c11, 2 * c12 * c12, 2 * c11 * c12,
         2 * c12 * c12, 2 * c22 * c22, 2 * c22 * c12,
         2 * c11 * c12, 2 * c22 * c12, c11 * c22 + c12 * c12;
    Eigen::Matrix3d Isym = Eigen::Matrix3d::Zero();
    Isym(0, 0) = Isym(1, 1) = 1.0;
    Isym(2, 2) = 0.5;
    out.tangent = k1 * A - k2 * B + 2.0 * mu * Isym;
    return out;
}

namespace {

// delta E (Voigt, engineering shear) = BL * delta u for the current F.
Eigen::Matrix<Real, 3, 8> nonlinear_strain_matrix(const Eigen::Matrix<Real, 2, 4>& grad,
                                                  const Eigen::Matrix2d& F) {
    Eigen::Matrix<Real, 3, 8> bl;
    for (int a = 0; a < 4; ++a)
        for (int i = 0; i < 2; ++i) {
            bl(0, 2 * a + i) = F(i, 0) * grad(0, a);
            bl(1, 2 * a + i) = F(i, 1) * grad(1, a);
            bl(2, 2 * a + i) = F(i, 0) * grad(1, a) + F(i, 1) * grad(0, a);
        }
    return bl;
}

}  // namespace

void residual_and_tangent(const StructuredMesh& mesh, const ActiveModel& am,
                          const Vector& stiffness_scale, const MaterialConstants& mat,
                          Real thickness, const Vector& u_full, Vector* f_int_full,
                          SpMat* tangent_reduced) {
    if (mesh.dim != 2)
        throw InvalidSpecError("residual_and_tangent: total-Lagrangian model is 2D");
    const auto quad = q4_quadrature(mesh.h);

    if (f_int_full) *f_int_full = Vector::Zero(mesh.total_dofs());
    std::vector<Triplet> trips;
    std::vector<int> dofs;
    Vector ue;
    for (int e = 0; e < mesh.elem_count; ++e) {
        if (!am.element_active[e] || stiffness_scale[e] == 0.0) continue;
        gather_element(mesh, e, u_full, ue);

        Eigen::Matrix<Real, 8, 1> fe = Eigen::Matrix<Real, 8, 1>::Zero();
        Matrix ke = Matrix::Zero(8, 8);
        for (int g = 0; g < Q4Quadrature::n_points; ++g) {
            const auto& grad = quad.grad[g];
            Eigen::Matrix2d H = Eigen::Matrix2d::Zero();  // displacement gradient
            for (int a = 0; a < 4; ++a) {
                H(0, 0) += ue[2 * a] * grad(0, a);
                H(0, 1) += ue[2 * a] * grad(1, a);
                H(1, 0) += ue[2 * a + 1] * grad(0, a);
                H(1, 1) += ue[2 * a + 1] * grad(1, a);
            }
            const Eigen::Matrix2d F = Eigen::Matrix2d::Identity() + H;
            if (F.determinant() <= 0.0)
                throw AnalysisFailureError(
                    "residual_and_tangent: inverted element " + std::to_string(e), F.determinant());
            const auto pk2 = pk2_stress(F, mat.lambda_bar, mat.mu_bar);
            const auto bl = nonlinear_strain_matrix(grad, F);
            const Eigen::Vector3d sv{pk2.S(0, 0), pk2.S(1, 1), pk2.S(0, 1)};
            const Real w = quad.weight[g] * thickness * stiffness_scale[e];

            if (f_int_full) fe += w * (bl.transpose() * sv);
            if (tangent_reduced) {
                ke += w * (bl.transpose() * pk2.tangent * bl);
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) {
                        const Real gab = w * grad.col(a).dot(pk2.S * grad.col(b));
                        ke(2 * a, 2 * b) += gab;
                        ke(2 * a + 1, 2 * b + 1) += gab;
                    }
            }
        }
        if (f_int_full)
            for (int a = 0; a < 4; ++a)
                for (int c = 0; c < 2; ++c)
                    (*f_int_full)[mesh.dof(mesh.conn(e, a), c)] += fe[2 * a + c];
        if (tangent_reduced) {
            element_reduced_dofs(mesh, am, e, dofs);
            for (int i = 0; i < 8; ++i) {
                if (dofs[i] < 0) continue;
                for (int j = 0; j < 8; ++j)
                    if (dofs[j] >= 0) trips.emplace_back(dofs[i], dofs[j], ke(i, j));
            }
        }
    }
    if (tangent_reduced) {
        tangent_reduced->resize(am.n_active, am.n_active);
        tangent_reduced->setFromTriplets(trips.begin(), trips.end());
    }
}

NewtonResult newton_solve(const StructuredMesh& mesh, const ActiveModel& am,
                          const Vector& stiffness_scale, const MaterialConstants& mat,
                          Real thickness, const Vector& f_ext_full, const NewtonSettings& settings) {
    NewtonResult result;
    result.u = Vector::Zero(mesh.total_dofs());
    const Vector f_red_total = reduce_vector(am, f_ext_full);
    const Real f_scale = f_red_total.norm();
    if (f_scale == 0.0) return result;

    const Real base_step = 1.0 / std::max(1, settings.increments);
    Real load = 0.0;
    Real step = base_step;
    int halvings = 0;
    int clean_steps = 0;

    Vector u = result.u;
    while (load < 1.0 - 1e-12) {
        const Real target = std::min(1.0, load + step);
        Vector u_trial = u;
        bool converged = false;
        Real rel_res = 0.0;
        try {
            const Vector f_target = target * f_red_total;
            for (int it = 0; it < settings.max_iterations; ++it) {
                Vector f_int;
                SpMat kt;
                residual_and_tangent(mesh, am, stiffness_scale, mat, thickness, u_trial, &f_int,
                                     &kt);
                const Vector r = reduce_vector(am, f_int) - f_target;
                rel_res = r.norm() / (target * f_scale);
                ++result.total_iterations;
                if (rel_res <= settings.tolerance) {
                    converged = true;
                    break;
                }
                LinearSolver solver(kt);
                Vector du = solver.solve(-r);
                if (settings.line_search) {
                    // backtracking on the residual norm
                    Real alpha = 1.0;
                    for (int ls = 0; ls < 8; ++ls) {
                        Vector u_ls = u_trial + alpha * expand_vector(am, du);
                        try {
                            Vector f_ls;
                            residual_and_tangent(mesh, am, stiffness_scale, mat, thickness, u_ls,
                                                 &f_ls, nullptr);
                            if ((reduce_vector(am, f_ls) - f_target).norm() < r.norm()) break;
                        } catch (const AnalysisFailureError&) {
                        }
                        alpha *= 0.5;
                    }
                    du *= alpha;
                }
                u_trial += expand_vector(am, du);
            }
        } catch (const SingularSystemError&) {
            converged = false;
        } catch (const AnalysisFailureError&) {
            converged = false;
        }

        if (converged) {
            u = u_trial;
            load = target;
            result.final_residual = rel_res;
            if (++clean_steps >= 2 && step < base_step) {
                step = std::min(base_step, 2.0 * step);
                clean_steps = 0;
            }
        } else {
            if (++halvings > 4)
                throw AnalysisFailureError("newton_solve: no convergence after 4 step halvings",
                                           rel_res);
            step *= 0.5;
            clean_steps = 0;
        }
    }
    result.u = u;
    return result;
}

NonlinearObjective end_compliance_objective(const StructuredMesh& mesh, const ActiveModel& am,
                                            const Vector& rho, const InterpolationLaw& law,
                                            const MaterialConstants& mat, Real thickness,
                                            const Vector& f_ext_full,
                                            const NewtonSettings& settings) {
    Vector E, dE;
    interpolate(law, rho, E, dE);
    Vector scale = E / mat.E0;
    Vector dscale = dE / mat.E0;
    for (int e = 0; e < mesh.elem_count; ++e)
        if (!am.element_active[e]) scale[e] = dscale[e] = 0.0;

    const auto newton = newton_solve(mesh, am, scale, mat, thickness, f_ext_full, settings);

    NonlinearObjective obj;
    obj.u = newton.u;
    obj.value = f_ext_full.dot(newton.u);

    SpMat kt;
    residual_and_tangent(mesh, am, scale, mat, thickness, newton.u, nullptr, &kt);
    LinearSolver solver(kt);
    const Vector a_red = solver.solve(-reduce_vector(am, f_ext_full));
    const Vector a_full = expand_vector(am, a_red);

    // dr/drho_e = (dscale_e/scale_e) * f_int_e; contract per element with a
    obj.dg_drho = Vector::Zero(mesh.elem_count);
    const auto quad = q4_quadrature(mesh.h);
    Vector ue, ae;
    for (int e = 0; e < mesh.elem_count; ++e) {
        if (!am.element_active[e] || dscale[e] == 0.0) continue;
        gather_element(mesh, e, newton.u, ue);
        gather_element(mesh, e, a_full, ae);
        Eigen::Matrix<Real, 8, 1> fe = Eigen::Matrix<Real, 8, 1>::Zero();
        for (int g = 0; g < Q4Quadrature::n_points; ++g) {
            const auto& grad = quad.grad[g];
            Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
            for (int a = 0; a < 4; ++a) {
                H(0, 0) += ue[2 * a] * grad(0, a);
                H(0, 1) += ue[2 * a] * grad(1, a);
                H(1, 0) += ue[2 * a + 1] * grad(0, a);
                H(1, 1) += ue[2 * a + 1] * grad(1, a);
            }
            const Eigen::Matrix2d F = Eigen::Matrix2d::Identity() + H;
            const auto pk2 = pk2_stress(F, mat.lambda_bar, mat.mu_bar);
            const auto bl = nonlinear_strain_matrix(grad, F);
            const Eigen::Vector3d sv{pk2.S(0, 0), pk2.S(1, 1), pk2.S(0, 1)};
            fe += quad.weight[g] * thickness * (bl.transpose() * sv);
        }
        obj.dg_drho[e] = dscale[e] * ae.dot(fe);
    }
    return obj;
}

}  // namespace topo
