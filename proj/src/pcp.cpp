#include "reprocs/pcp.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

namespace reprocs::pcp {

double shrink(double x, double tau) {
    const double a = std::abs(x) - tau;
    return a > 0.0 ? (x > 0.0 ? a : -a) : 0.0;
}

Matrix shrink(const Matrix& m, double tau) {
    return m.unaryExpr([tau](double v) { return shrink(v, tau); });
}

Matrix svt(const Matrix& m, double tau) {
    Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector sv = svd.singularValues();
    Index keep = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv[i] > tau) ++keep;
    }
    if (keep == 0) return Matrix::Zero(m.rows(), m.cols());
    return svd.matrixU().leftCols(keep) *
           (sv.head(keep).array() - tau).matrix().asDiagonal() *
           svd.matrixV().leftCols(keep).transpose();
}

double default_lambda(Index rows, Index cols) {
    return 1.0 / std::sqrt(static_cast<double>(std::max(rows, cols)));
}

PcpSolution pcp_solve(const Matrix& m, double lambda, double tol,
                      int max_iter) {
    PcpOptions opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    return pcp_solve(m, lambda, opt);
}

PcpSolution pcp_solve(const Matrix& m, double lambda, const PcpOptions& opt) {
    if (!(opt.tol > 0.0)) throw ConfigError("pcp tolerance must be positive");
    if (!(lambda > 0.0)) throw ConfigError("pcp lambda must be positive");

    PcpSolution out;
    const double m_fro = m.norm();
    if (m_fro == 0.0) {
        out.l = Matrix::Zero(m.rows(), m.cols());
        out.s = Matrix::Zero(m.rows(), m.cols());
        return out;
    }

    const double m_two = spectral_norm(m);
    const double dual_norm =
        std::max(m_two, m.cwiseAbs().maxCoeff() / lambda);
    Matrix y = m / dual_norm;
    Matrix l = Matrix::Zero(m.rows(), m.cols());
    Matrix s = Matrix::Zero(m.rows(), m.cols());

    double mu = opt.mu_scale / m_two;
    const double mu_max = mu * 1e7;

    // The dual ascent itself can wiggle, so keep the best-feasibility
    // iterate seen so far; that pair is what gets returned (flagged when
    // the tolerance was never reached).
    double best_residual = std::numeric_limits<double>::infinity();

    for (int it = 0; it < opt.max_iter; ++it) {
        l = svt(m - s + y / mu, 1.0 / mu);
        s = shrink(m - l + y / mu, lambda / mu);
        const Matrix z = m - l - s;
        const double residual = z.norm() / m_fro;
        out.iterations = it + 1;
        if (residual < best_residual) {
            best_residual = residual;
            out.l = l;
            out.s = s;
        }
        out.residual_history.push_back(best_residual);
        out.primal_residual = best_residual;
        if (best_residual < opt.tol) {
            out.converged = true;
            return out;
        }
        y += mu * z;
        mu = std::min(mu * opt.rho, mu_max);
    }
    out.converged = false;
    return out;
}

std::vector<PcpSnapshot> pcp_schedule(const Matrix& m_full,
                                      const Matrix& x_true, long stride,
                                      const PcpOptions& opt) {
    if (stride < 1) throw ConfigError("snapshot stride must be >= 1");
    if (m_full.rows() != x_true.rows() || m_full.cols() != x_true.cols()) {
        throw DimensionError("measurement and truth shapes differ");
    }
    std::vector<PcpSnapshot> snapshots;
    for (long t = stride; t <= m_full.cols(); t += stride) {
        const Matrix prefix = m_full.leftCols(t);
        const double lambda = default_lambda(prefix.rows(), t);
        PcpSolution sol = pcp_solve(prefix, lambda, opt);

        PcpSnapshot snap;
        snap.t = t;
        snap.iterations = sol.iterations;
        snap.converged = sol.converged;
        snap.primal_residual = sol.primal_residual;
        snap.col_rel_err.resize(t);
        for (long col = 0; col < t; ++col) {
            const double denom = x_true.col(col).norm();
            const double err = (sol.s.col(col) - x_true.col(col)).norm();
            snap.col_rel_err[col] = denom > 0.0 ? err / denom : err;
        }
        snapshots.push_back(std::move(snap));
    }
    return snapshots;
}

}  // namespace reprocs::pcp
