#include "topo/eigen_dynamics.hpp"

#include "topo/assembly.hpp"
#include "topo/element.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <cstdio>
#include <cstdlib>

namespace topo {

namespace {

constexpr int kDenseCutoff = 2000;

// Rounding bound for evaluating A v in double precision; residuals at this
// level are indistinguishable from zero, which matters once near-empty
// elements (rho -> 0 with Emin = 0) drive the pencil conditioning up.
Real residual_floor(const SpMat& A, const Vector& v) {
    return 8.0 * std::numeric_limits<Real>::epsilon() * (A.cwiseAbs() * v.cwiseAbs()).norm();
}

bool pair_converged(const SpMat& A, const SpMat& B, Real theta, const Vector& v, Real tol,
                    Real* res_out = nullptr) {
    const Vector av = A * v;
    const Real res = (av - theta * (B * v)).norm();
    if (res_out) *res_out = res / av.norm();
    return res <= tol * av.norm() + residual_floor(A, v);
}

EigenSolution finalize_pairs(const SpMat& A, const SpMat& B, const Vector& thetas,
                             const Matrix& modes, Real tol) {
    EigenSolution out;
    out.values = thetas;
    out.modes = modes;
    out.residuals.resize(thetas.size());
    for (int i = 0; i < thetas.size(); ++i) {
        if (!pair_converged(A, B, thetas[i], modes.col(i), tol, &out.residuals[i]))
            throw AnalysisFailureError("generalized_eigensolve: residual contract violated",
                                       out.residuals[i]);
    }
    return out;
}

EigenSolution dense_path(const SpMat& A, const SpMat& B, int k, Real tol) {
    const Matrix Ad(A), Bd(B);
    // B v = mu A v with A SPD; the largest positive mu are the smallest theta
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(Bd, Ad);
    if (ges.info() != Eigen::Success)
        throw AnalysisFailureError("generalized_eigensolve: dense solver breakdown");
    const Vector mu = ges.eigenvalues();
    const int n = static_cast<int>(mu.size());

    std::vector<int> order;  // positive mu, descending
    for (int i = n - 1; i >= 0; --i)
        if (mu[i] > 0.0) order.push_back(i);
    if (static_cast<int>(order.size()) < k)
        throw AnalysisFailureError("generalized_eigensolve: fewer positive eigenvalues than requested");

    Vector thetas(k);
    Matrix modes(n, k);
    for (int j = 0; j < k; ++j) {
        const int i = order[j];
        thetas[j] = 1.0 / mu[i];
        // GSAES scales v^T A v = 1, so v^T B v = mu
        modes.col(j) = ges.eigenvectors().col(i) / std::sqrt(mu[i]);
    }
    return finalize_pairs(A, B, thetas, modes, tol);
}

// A-orthonormalize the columns of Y in place (modified Gram-Schmidt).
// Returns false on breakdown (rank loss).
bool a_orthonormalize(const SpMat& A, Matrix& Y) {
    const int p = static_cast<int>(Y.cols());
    Matrix AY(Y.rows(), p);
    for (int j = 0; j < p; ++j) {
        Vector y = Y.col(j);
        for (int rep = 0; rep < 2; ++rep)  // one reorthogonalization pass
            for (int i = 0; i < j; ++i) y -= (AY.col(i).dot(y)) * Y.col(i);
        Vector ay = A * y;
        const Real norm2 = y.dot(ay);
        if (!(norm2 > 0.0)) return false;
        const Real inv = 1.0 / std::sqrt(norm2);
        Y.col(j) = y * inv;
        AY.col(j) = ay * inv;
    }
    return true;
}

EigenSolution subspace_path(const SpMat& A, const SpMat& B, int k, Real tol,
                            const Matrix* warm_start) {
    const int n = static_cast<int>(A.rows());
    const int p = std::min(n, std::max(2 * k + 2, k + 8));
    LinearSolver ainv(A);

    Matrix X(n, p);
    {
        std::mt19937 rng(20240607u);
        std::uniform_real_distribution<Real> dist(-1.0, 1.0);
        for (int j = 0; j < p; ++j)
            for (int i = 0; i < n; ++i) X(i, j) = dist(rng);
        if (warm_start) {
            const int keep = std::min<int>(warm_start->cols(), p);
            if (warm_start->rows() == n && keep > 0) X.leftCols(keep) = warm_start->leftCols(keep);
        }
    }

    Vector thetas(k);
    Matrix modes(n, k);
    const int max_outer = 300;
    for (int outer = 0; outer < max_outer; ++outer) {
        Matrix Y(n, p);
        for (int j = 0; j < p; ++j) {
            const Vector bx = B * X.col(j);
            Vector y = ainv.solve(bx);
            y += ainv.solve(bx - A * y);  // refinement against ill-conditioned pencils
            Y.col(j) = y;
        }
        if (!a_orthonormalize(A, Y)) {
            // rank loss: refresh the degenerate directions deterministically
            std::mt19937 rng(97 + outer);
            std::uniform_real_distribution<Real> dist(-1.0, 1.0);
            for (int j = 0; j < p; ++j)
                for (int i = 0; i < n; ++i) Y(i, j) = X(i, j) + 1e-8 * dist(rng);
            if (!a_orthonormalize(A, Y))
                throw AnalysisFailureError("generalized_eigensolve: subspace breakdown");
        }

        // Rayleigh-Ritz on the A-orthonormal basis: H = Y^T B Y
        Matrix BY(n, p);
        for (int j = 0; j < p; ++j) BY.col(j) = B * Y.col(j);
        const Matrix H = Y.transpose() * BY;
        Eigen::SelfAdjointEigenSolver<Matrix> eh(0.5 * (H + H.transpose()));
        const Vector mu = eh.eigenvalues();  // ascending

        std::vector<int> order;  // positive mu, descending = smallest theta first
        for (int i = p - 1; i >= 0; --i)
            if (mu[i] > 0.0) order.push_back(i);
        if (static_cast<int>(order.size()) < k) {
            X = Y * eh.eigenvectors();  // keep iterating; spectrum may separate later
            continue;
        }

        bool all_converged = true;
        Real worst = 0.0;
        for (int j = 0; j < k; ++j) {
            const int i = order[j];
            thetas[j] = 1.0 / mu[i];
            modes.col(j) = Y * eh.eigenvectors().col(i) / std::sqrt(mu[i]);
            Real res = 0.0;
            if (!pair_converged(A, B, thetas[j], modes.col(j), tol, &res)) all_converged = false;
            worst = std::max(worst, res);
        }
        if (std::getenv("TOPO_EIG_DEBUG") && (outer % 20 == 19 || all_converged))
            std::fprintf(stderr, "eig n=%d p=%d outer=%d worst=%.3e mu_k=%.6e mu_next=%.6e\n",
                         n, p, outer, worst, mu[order[k - 1]],
                         static_cast<int>(order.size()) > k ? mu[order[k]] : 0.0);
        if (all_converged) return finalize_pairs(A, B, thetas, modes, tol);
        X = Y * eh.eigenvectors();
    }
    throw AnalysisFailureError("generalized_eigensolve: no convergence in subspace iteration");
}

}  // namespace

EigenSolution generalized_eigensolve(const SpMat& A, const SpMat& B, int k, Real tol,
                                     const Matrix* warm_start) {
    if (k < 1) throw InvalidSpecError("generalized_eigensolve: k must be positive");
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
        throw InvalidSpecError("generalized_eigensolve: dimension mismatch");
    if (k > A.rows()) throw InvalidSpecError("generalized_eigensolve: k exceeds space dimension");
    if (A.rows() < kDenseCutoff) return dense_path(A, B, k, tol);
    return subspace_path(A, B, k, tol, warm_start);
}

KSResult ks_aggregate(const Vector& values, Real alpha, int q) {
    if (q < 1 || q > values.size()) throw InvalidSpecError("ks_aggregate: q out of range");
    if (alpha <= 0.0) throw InvalidSpecError("ks_aggregate: alpha must be positive");
    for (int i = 0; i < q; ++i)
        if (values[i] <= 0.0)
            throw InvalidSpecError("ks_aggregate: nonpositive eigenvalue, structure lost stiffness");

    const Real x1 = 1.0 / values[0];
    Real sum = 0.0;
    Vector expo(q);
    for (int i = 0; i < q; ++i) {
        expo[i] = std::exp(alpha * (1.0 / values[i] - x1));
        sum += expo[i];
    }
    KSResult r;
    r.value = x1 + sum / alpha;
    r.weights = Vector::Zero(values.size());
    r.d_dvalue = Vector::Zero(values.size());
    for (int i = 0; i < q; ++i) {
        Real w = expo[i];
        if (i == 0) w += 1.0 - sum;
        r.weights[i] = w;
        r.d_dvalue[i] = -w / (values[i] * values[i]);
    }
    return r;
}

namespace {

// v_e^T Ke v_e per element for a full-length mode.
Vector mode_element_energies(const StructuredMesh& mesh, const Matrix& Ke0, const Vector& v_full) {
    Vector s(mesh.elem_count);
    Vector ve;
    for (int e = 0; e < mesh.elem_count; ++e) {
        gather_element(mesh, e, v_full, ve);
        s[e] = ve.dot(Ke0 * ve);
    }
    return s;
}

bool nearly_repeated(const Vector& values, int q) {
    for (int i = 1; i < q; ++i)
        if (std::abs(values[i] - values[i - 1]) <= 1e-6 * std::abs(values[i])) return true;
    return false;
}

}  // namespace

KsSensitivity frequency_ks_sensitivity(const StructuredMesh& mesh, const ActiveModel& am,
                                       const EigenSolution& sol, const Matrix& Ke0,
                                       const Vector& dE_drho, Real rho0, Real thickness,
                                       bool lumped, Real alpha, int q) {
    Vector omegas(sol.values.size());
    for (int i = 0; i < sol.values.size(); ++i) {
        if (sol.values[i] <= 0.0)
            throw InvalidSpecError("frequency_ks_sensitivity: nonpositive omega^2");
        omegas[i] = std::sqrt(sol.values[i]);
    }
    const auto ks = ks_aggregate(omegas, alpha, q);

    const ElementKind kind = mesh.dim == 2 ? ElementKind::q4_plane_stress : ElementKind::h8;
    const Matrix Me0 = lumped ? element_mass_lumped(kind, mesh.h, thickness)
                              : element_mass(kind, mesh.h, thickness);

    KsSensitivity out;
    out.Lambda = ks.value;
    out.repeated_eigenvalues = nearly_repeated(sol.values, q);
    out.dLambda_drho = Vector::Zero(mesh.elem_count);
    Vector ve;
    for (int i = 0; i < q; ++i) {
        const Vector v_full = expand_vector(am, sol.modes.col(i));
        // d Lambda/d(omega^2) = dLambda/domega * 1/(2 omega)
        const Real chain = ks.d_dvalue[i] / (2.0 * omegas[i]);
        const Real w2 = sol.values[i];
        for (int e = 0; e < mesh.elem_count; ++e) {
            if (!am.element_active[e]) continue;
            gather_element(mesh, e, v_full, ve);
            const Real dk = dE_drho[e] * ve.dot(Ke0 * ve);
            const Real dm = rho0 * ve.dot(Me0 * ve);
            out.dLambda_drho[e] += chain * (dk - w2 * dm);
        }
    }
    return out;
}

KsSensitivity blf_ks_sensitivity(const StructuredMesh& mesh, const ActiveModel& am,
                                 const EigenSolution& sol, const Matrix& Ke0,
                                 const Vector& dE_drho, const Vector& sigma_scale,
                                 const Vector& dsigma_scale, const Vector& u_full,
                                 const MaterialConstants& mat, Real thickness,
                                 const LinearSolver& stiffness_solver, Real alpha, int q) {
    const auto ks = ks_aggregate(sol.values, alpha, q);
    const auto quad = q4_quadrature(mesh.h);
    const auto D = plane_stress_matrix(mat.E0, mat.nu);

    KsSensitivity out;
    out.Lambda = ks.value;
    out.repeated_eigenvalues = nearly_repeated(sol.values, q);
    out.dLambda_drho = Vector::Zero(mesh.elem_count);

    Vector ve, ue, ae;
    for (int i = 0; i < q; ++i) {
        const Real lam = sol.values[i];
        const Vector v_full = expand_vector(am, sol.modes.col(i));

        // adjoint: K a = v^T d_u G v (modes satisfy v^T G v = -1, i.e.
        // v^T (-G) v = +1, matching the solver's normalization of B = -G)
        const Vector h = stress_stiffness_mode_contraction(mesh, am, sigma_scale, v_full, mat,
                                                           thickness);
        const Vector a_full = expand_vector(am, stiffness_solver.solve(reduce_vector(am, h)));

        for (int e = 0; e < mesh.elem_count; ++e) {
            if (!am.element_active[e]) continue;
            gather_element(mesh, e, v_full, ve);
            gather_element(mesh, e, u_full, ue);
            gather_element(mesh, e, a_full, ae);

            const Real dk = dE_drho[e] * ve.dot(Ke0 * ve);

            // v^T dG/drho_e v at unit stress scale
            Real g_quadform = 0.0;
            if (dsigma_scale[e] != 0.0) {
                Eigen::Matrix<Real, 8, 1> vv, uu;
                for (int c = 0; c < 8; ++c) {
                    vv[c] = ve[c];
                    uu[c] = ue[c];
                }
                for (int g = 0; g < Q4Quadrature::n_points; ++g) {
                    const auto B = q4_strain_matrix(quad.grad[g]);
                    const Eigen::Vector3d sig = D * (B * uu);
                    Eigen::Matrix2d S;
                    S << sig[0], sig[2], sig[2], sig[1];
                    Eigen::Vector2d gx = Eigen::Vector2d::Zero(), gy = Eigen::Vector2d::Zero();
                    for (int a = 0; a < 4; ++a) {
                        gx += quad.grad[g].col(a) * vv[2 * a];
                        gy += quad.grad[g].col(a) * vv[2 * a + 1];
                    }
                    g_quadform += quad.weight[g] * thickness *
                                  (gx.dot(S * gx) + gy.dot(S * gy));
                }
            }
            const Real dg = dsigma_scale[e] * g_quadform;
            const Real adj = dE_drho[e] * ae.dot(Ke0 * ue);
            const Real dlam = dk + lam * dg - lam * adj;
            out.dLambda_drho[e] += ks.d_dvalue[i] * dlam;
        }
    }
    return out;
}

Real artificial_mode_ratio(const StructuredMesh& mesh, const Matrix& Ke0, const Vector& moduli,
                           const Vector& rho, const Vector& mode_full, Real rho_cut) {
    const Vector s = mode_element_energies(mesh, Ke0, mode_full);
    Real low = 0.0, total = 0.0;
    for (int e = 0; e < mesh.elem_count; ++e) {
        const Real se = moduli[e] * s[e];
        total += se;
        if (rho[e] < rho_cut) low += se;
    }
    if (total == 0.0)
        throw InvalidSpecError("artificial_mode_ratio: mode carries no strain energy");
    return low / total;
}

}  // namespace topo
