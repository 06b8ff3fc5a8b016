#include "topo/optimizer.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace topo {

namespace {

using Array = Eigen::ArrayXd;

struct SubproblemData {
    Array p0, q0;      // objective numerators
    Matrix P, Q;       // constraint numerators (m x n)
    Vector b;          // right-hand sides
    Array alfa, beta;  // move-limited bounds
    Array low, upp;
};

struct SubproblemSolution {
    Array x;
    Vector y;
    Real z;
};

// Primal-dual interior point for the separable MMA subproblem with elastic
// variables y and z (a0 = 1, a = 0, c = 1000, d = 1).
SubproblemSolution solve_subproblem(const SubproblemData& sp, Real epsimin) {
    const int n = static_cast<int>(sp.p0.size());
    const int m = static_cast<int>(sp.b.size());
    const Real a0 = 1.0;
    const Vector a = Vector::Zero(m);
    const Vector c = Vector::Constant(m, 1000.0);
    const Vector d = Vector::Ones(m);

    Real epsi = 1.0;
    Array x = 0.5 * (sp.alfa + sp.beta);
    Vector y = Vector::Ones(m);
    Real z = 1.0;
    Vector lam = Vector::Ones(m);
    Array xsi = (1.0 / (x - sp.alfa)).max(1.0);
    Array eta = (1.0 / (sp.beta - x)).max(1.0);
    Vector mu = (0.5 * c).cwiseMax(1.0);
    Real zet = 1.0;
    Vector s = Vector::Ones(m);

    auto residual = [&](const Array& x_, const Vector& y_, Real z_, const Vector& lam_,
                        const Array& xsi_, const Array& eta_, const Vector& mu_, Real zet_,
                        const Vector& s_, Real eps, Real& out_max) -> Real {
        const Array ux1 = sp.upp - x_;
        const Array xl1 = x_ - sp.low;
        const Array plam = sp.p0 + (sp.P.transpose() * lam_).array();
        const Array qlam = sp.q0 + (sp.Q.transpose() * lam_).array();
        const Vector gvec = sp.P * (1.0 / ux1).matrix() + sp.Q * (1.0 / xl1).matrix();
        const Array dpsidx = plam / ux1.square() - qlam / xl1.square();

        const Array rex = dpsidx - xsi_ + eta_;
        const Vector rey = c + d.cwiseProduct(y_) - mu_ - lam_;
        const Real rez = a0 - zet_ - a.dot(lam_);
        const Vector relam = gvec - a * z_ - y_ + s_ - sp.b;
        const Array rexsi = xsi_ * (x_ - sp.alfa) - eps;
        const Array reeta = eta_ * (sp.beta - x_) - eps;
        const Vector remu = mu_.cwiseProduct(y_) - Vector::Constant(m, eps);
        const Real rezet = zet_ * z_ - eps;
        const Vector res = lam_.cwiseProduct(s_) - Vector::Constant(m, eps);

        Real sq = rex.square().sum() + rey.squaredNorm() + rez * rez + relam.squaredNorm() +
                  rexsi.square().sum() + reeta.square().sum() + remu.squaredNorm() +
                  rezet * rezet + res.squaredNorm();
        out_max = std::max({rex.abs().maxCoeff(), rey.cwiseAbs().maxCoeff(), std::abs(rez),
                            relam.cwiseAbs().maxCoeff(), rexsi.abs().maxCoeff(),
                            reeta.abs().maxCoeff(), remu.cwiseAbs().maxCoeff(), std::abs(rezet),
                            res.cwiseAbs().maxCoeff()});
        return std::sqrt(sq);
    };

    while (epsi > epsimin) {
        Real residumax = 0.0;
        Real residunorm = residual(x, y, z, lam, xsi, eta, mu, zet, s, epsi, residumax);

        int ittt = 0;
        while (residumax > 0.9 * epsi && ittt < 200) {
            ++ittt;
            const Array ux1 = sp.upp - x;
            const Array xl1 = x - sp.low;
            const Array ux2 = ux1.square();
            const Array xl2 = xl1.square();
            const Array uxinv1 = 1.0 / ux1;
            const Array xlinv1 = 1.0 / xl1;

            const Array plam = sp.p0 + (sp.P.transpose() * lam).array();
            const Array qlam = sp.q0 + (sp.Q.transpose() * lam).array();
            const Vector gvec = sp.P * uxinv1.matrix() + sp.Q * xlinv1.matrix();

            // GG(i,j) = P(i,j)/ux2(j) - Q(i,j)/xl2(j)
            Matrix GG(m, n);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j)
                    GG(i, j) = sp.P(i, j) / ux2[j] - sp.Q(i, j) / xl2[j];

            const Array dpsidx = plam / ux2 - qlam / xl2;
            const Array delx = dpsidx - epsi / (x - sp.alfa) + epsi / (sp.beta - x);
            const Vector dely =
                c + d.cwiseProduct(y) - lam - epsi * y.cwiseInverse();
            const Real delz = a0 - a.dot(lam) - epsi / z;
            const Vector dellam =
                gvec - a * z - y - sp.b + epsi * lam.cwiseInverse();

            const Array diagx = 2.0 * (plam / (ux2 * ux1) + qlam / (xl2 * xl1)) +
                                xsi / (x - sp.alfa) + eta / (sp.beta - x);
            const Vector diagy = d + mu.cwiseQuotient(y);
            const Vector diaglam = s.cwiseQuotient(lam);
            const Vector diaglamyi = diaglam + diagy.cwiseInverse();

            Array dx(n);
            Vector dlam(m);
            Real dz;
            if (m < n) {
                const Vector blam =
                    dellam + dely.cwiseQuotient(diagy) - GG * (delx / diagx).matrix();
                Matrix AA(m + 1, m + 1);
                AA.topLeftCorner(m, m) =
                    Matrix(diaglamyi.asDiagonal()) +
                    GG * (1.0 / diagx).matrix().asDiagonal() * GG.transpose();
                AA.topRightCorner(m, 1) = a;
                AA.bottomLeftCorner(1, m) = a.transpose();
                AA(m, m) = -zet / z;
                Vector bb(m + 1);
                bb.head(m) = blam;
                bb[m] = delz;
                const Vector solut = AA.fullPivLu().solve(bb);
                dlam = solut.head(m);
                dz = solut[m];
                dx = -delx / diagx - (GG.transpose() * dlam).array() / diagx;
            } else {
                const Vector dellamyi = dellam + dely.cwiseQuotient(diagy);
                Matrix AA(n + 1, n + 1);
                AA.topLeftCorner(n, n) =
                    Matrix(diagx.matrix().asDiagonal()) +
                    GG.transpose() * diaglamyi.cwiseInverse().asDiagonal() * GG;
                const Vector axz = -GG.transpose() * a.cwiseQuotient(diaglamyi);
                AA.topRightCorner(n, 1) = axz;
                AA.bottomLeftCorner(1, n) = axz.transpose();
                AA(n, n) = zet / z + a.dot(a.cwiseQuotient(diaglamyi));
                Vector bb(n + 1);
                bb.head(n) = -(delx + (GG.transpose() * dellamyi.cwiseQuotient(diaglamyi)).array())
                                  .matrix();
                bb[n] = -(delz - a.dot(dellamyi.cwiseQuotient(diaglamyi)));
                const Vector solut = AA.fullPivLu().solve(bb);
                dx = solut.head(n).array();
                dz = solut[n];
                dlam = (GG * dx.matrix()).cwiseQuotient(diaglamyi) -
                       dz * a.cwiseQuotient(diaglamyi) + dellamyi.cwiseQuotient(diaglamyi);
            }

            const Vector dy = (-dely + dlam).cwiseQuotient(diagy);
            const Array dxsi = -xsi + epsi / (x - sp.alfa) - (xsi * dx) / (x - sp.alfa);
            const Array deta = -eta + epsi / (sp.beta - x) + (eta * dx) / (sp.beta - x);
            const Vector dmu = -mu + (epsi * y.cwiseInverse()) - mu.cwiseProduct(dy).cwiseQuotient(y);
            const Real dzet = -zet + epsi / z - zet * dz / z;
            const Vector ds = -s + epsi * lam.cwiseInverse() - s.cwiseProduct(dlam).cwiseQuotient(lam);

            // largest step keeping all positivity constraints
            Real stm = 1.0;
            auto step_limit = [&stm](Real dv, Real v) {
                if (v > 0.0) stm = std::max(stm, -1.01 * dv / v);
            };
            for (int i = 0; i < m; ++i) {
                step_limit(dy[i], y[i]);
                step_limit(dlam[i], lam[i]);
                step_limit(dmu[i], mu[i]);
                step_limit(ds[i], s[i]);
            }
            step_limit(dz, z);
            step_limit(dzet, zet);
            for (int j = 0; j < n; ++j) {
                step_limit(dxsi[j], xsi[j]);
                step_limit(deta[j], eta[j]);
                step_limit(dx[j], x[j] - sp.alfa[j]);
                step_limit(-dx[j], sp.beta[j] - x[j]);
            }
            Real steg = 1.0 / stm;

            const Array xold = x;
            const Vector yold = y;
            const Real zold = z;
            const Vector lamold = lam;
            const Array xsiold = xsi;
            const Array etaold = eta;
            const Vector muold = mu;
            const Real zetold = zet;
            const Vector sold = s;

            Real resinew = 2.0 * residunorm;
            int itto = 0;
            while (resinew > residunorm && itto < 50) {
                ++itto;
                x = xold + steg * dx;
                y = yold + steg * dy;
                z = zold + steg * dz;
                lam = lamold + steg * dlam;
                xsi = xsiold + steg * dxsi;
                eta = etaold + steg * deta;
                mu = muold + steg * dmu;
                zet = zetold + steg * dzet;
                s = sold + steg * ds;
                resinew = residual(x, y, z, lam, xsi, eta, mu, zet, s, epsi, residumax);
                steg *= 0.5;
            }
            residunorm = resinew;
        }
        epsi *= 0.1;
    }
    return {x, y, z};
}

}  // namespace

MmaOptimizer::MmaOptimizer(int n_vars, int n_cons, Options opt)
    : n_(n_vars), m_(n_cons), opt_(opt) {
    low_ = Vector::Zero(n_);
    upp_ = Vector::Ones(n_);
    xold1_ = Vector::Zero(n_);
    xold2_ = Vector::Zero(n_);
}

Vector MmaOptimizer::update(const Vector& phi, const Vector& dg0, const Vector& g_cons,
                            const Matrix& dg_cons) {
    if (phi.size() != n_ || dg0.size() != n_)
        throw InvalidSpecError("mma_update: variable length mismatch");
    if (g_cons.size() != m_ || dg_cons.rows() != m_ || dg_cons.cols() != n_)
        throw InvalidSpecError("mma_update: constraint shape mismatch");
    if (!dg0.allFinite() || !dg_cons.allFinite())
        throw InvalidSpecError("mma_update: non-finite gradients");

    ++iter_;
    const Array x = phi.array();
    const Array xmin = Array::Zero(n_);
    const Array xmax = Array::Ones(n_);
    const Array xrange = xmax - xmin;  // = 1

    Array low = low_.array(), upp = upp_.array();
    if (iter_ <= 2) {
        low = x - opt_.asy_init * xrange;
        upp = x + opt_.asy_init * xrange;
    } else {
        const Array zzz = (x - xold1_.array()) * (xold1_.array() - xold2_.array());
        Array factor = Array::Ones(n_);
        for (int j = 0; j < n_; ++j) {
            if (zzz[j] > 0.0) factor[j] = opt_.asy_incr;
            else if (zzz[j] < 0.0) factor[j] = opt_.asy_decr;
        }
        low = x - factor * (xold1_.array() - low);
        upp = x + factor * (upp - xold1_.array());
        low = low.max(x - 10.0 * xrange).min(x - 0.01 * xrange);
        upp = upp.min(x + 10.0 * xrange).max(x + 0.01 * xrange);
    }

    const Real albefa = 0.1;
    SubproblemData sp;
    sp.low = low;
    sp.upp = upp;
    sp.alfa = (low + albefa * (x - low)).max(x - opt_.move_limit * xrange).max(xmin);
    sp.beta = (upp - albefa * (upp - x)).min(x + opt_.move_limit * xrange).min(xmax);

    const Real raa0 = 1e-5;
    const Array ux2 = (upp - x).square();
    const Array xl2 = (x - low).square();
    {
        const Array dgp = dg0.array().max(0.0);
        const Array dgm = (-dg0.array()).max(0.0);
        const Array pq = 0.001 * (dgp + dgm) + raa0 / xrange;
        sp.p0 = (dgp + pq) * ux2;
        sp.q0 = (dgm + pq) * xl2;
    }
    sp.P.resize(m_, n_);
    sp.Q.resize(m_, n_);
    Vector b(m_);
    for (int i = 0; i < m_; ++i) {
        const Array dgi = dg_cons.row(i).transpose().array();
        const Array dgp = dgi.max(0.0);
        const Array dgm = (-dgi).max(0.0);
        const Array pq = 0.001 * (dgp + dgm) + raa0 / xrange;
        sp.P.row(i) = ((dgp + pq) * ux2).matrix().transpose();
        sp.Q.row(i) = ((dgm + pq) * xl2).matrix().transpose();
        b[i] = (sp.P.row(i).transpose().array() / (upp - x)).sum() +
               (sp.Q.row(i).transpose().array() / (x - low)).sum() - g_cons[i];
    }
    sp.b = b;

    const auto sol = solve_subproblem(sp, opt_.epsimin);
    relaxed_ = sol.y.maxCoeff() > 1e-6;

    xold2_ = xold1_;
    xold1_ = phi;
    low_ = low.matrix();
    upp_ = upp.matrix();
    return sol.x.matrix();
}

}  // namespace topo
