#include "reprocs/bpdn.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <vector>

namespace reprocs::solver {

namespace {

Vector apply_projector(const Matrix& p, const Vector& v) {
    if (p.cols() == 0) return v;
    return v - p * (p.transpose() * v);
}

void shrink_into(const Vector& v, double tau, Vector& out) {
    out.resize(v.size());
    for (Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]) - tau;
        out[i] = a > 0.0 ? (v[i] > 0.0 ? a : -a) : 0.0;
    }
}

std::vector<Index> support_of(const Vector& x) {
    std::vector<Index> s;
    for (Index i = 0; i < x.size(); ++i) {
        if (x[i] != 0.0) s.push_back(i);
    }
    return s;
}

// Attempts to close the constrained problem on the current support S.
// On S, the penalized minimizer is x(mu) = x_ls - mu G^{-1} sigma with
// G = (Phi_S)'(Phi_S), so the residual norm is an explicit function of mu
// and the mu hitting ||y - Phi x|| = xi has a closed form.  The candidate
// is accepted only if it satisfies the full KKT system of the penalized
// problem at that mu.
struct RootAttempt {
    bool ok = false;
    Vector x;
    double mu = 0.0;
    double residual = 0.0;
    double kkt_gap = 0.0;
};

RootAttempt try_close_root(const Matrix& p, const Vector& ys, const Vector& g0,
                           double xis, const Vector& x_current, double mu_hi) {
    RootAttempt out;
    const auto s = support_of(x_current);
    const Index k = static_cast<Index>(s.size());
    if (k == 0) return out;
    const Index n = ys.size();

    // G = I - B'B where B carries the S-rows of the basis.
    Matrix b(p.cols(), k);
    for (Index c = 0; c < k; ++c) b.col(c) = p.row(s[c]).transpose();
    Matrix g = -b.transpose() * b;
    g.diagonal().array() += 1.0;
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success) return out;

    Vector g0_s(k), sigma(k);
    for (Index c = 0; c < k; ++c) {
        g0_s[c] = g0[s[c]];
        sigma[c] = x_current[s[c]] > 0.0 ? 1.0 : -1.0;
    }
    const Vector x_ls = llt.solve(g0_s);
    const Vector w = llt.solve(sigma);

    Vector u = Vector::Zero(n);
    for (Index c = 0; c < k; ++c) u[s[c]] = x_ls[c];
    const Vector r_ls = ys - apply_projector(p, u);
    const double r_ls_norm2 = r_ls.squaredNorm();
    if (r_ls_norm2 > xis * xis) return out;  // support too small to reach xi

    Vector uw = Vector::Zero(n);
    for (Index c = 0; c < k; ++c) uw[s[c]] = w[c];
    const double qn2 = apply_projector(p, uw).squaredNorm();
    if (qn2 <= 0.0) return out;
    const double mu = std::sqrt((xis * xis - r_ls_norm2) / qn2);
    if (!(mu > 0.0) || mu > mu_hi * (1.0 + 1e-9)) return out;

    Vector x_s = x_ls - mu * w;
    for (Index c = 0; c < k; ++c) {
        if (x_s[c] * sigma[c] <= 0.0) return out;  // sign pattern broke
    }

    Vector x = Vector::Zero(n);
    for (Index c = 0; c < k; ++c) x[s[c]] = x_s[c];
    const Vector resid = ys - apply_projector(p, x);
    const Vector corr = apply_projector(p, resid);  // = g0 - Phi x
    const double cmax = corr.cwiseAbs().maxCoeff();
    if (cmax > mu * (1.0 + 1e-7) + 1e-12) return out;  // off-support KKT fails

    out.ok = true;
    out.x = std::move(x);
    out.mu = mu;
    out.residual = resid.norm();
    out.kkt_gap = std::max(0.0, cmax / mu - 1.0);
    return out;
}

}  // namespace

BpdnResult bpdn_solve(const BpdnProblem& prob, const BpdnOptions& opt,
                      BpdnWarmStart* warm) {
    const Index n = prob.y.size();
    if (prob.basis.cols() > 0 && prob.basis.rows() != n) {
        throw DimensionError("bpdn basis and observation sizes differ");
    }
    if (prob.xi < 0.0) throw ConfigError("xi must be nonnegative");

    BpdnResult result;
    const double ynorm = prob.y.norm();
    if (prob.xi >= ynorm) {
        // Zero is feasible and has minimal l1 norm.
        result.x = Vector::Zero(n);
        result.residual = ynorm;
        result.exact_root = true;
        return result;
    }

    // Solve at unit scale so tolerances are scale-free and the returned
    // value is exactly homogeneous in (y, xi).
    const Vector ys = prob.y / ynorm;
    const double xis = prob.xi / ynorm;
    const Matrix& p = prob.basis;
    const Vector g0 = apply_projector(p, ys);

    const double unreachable = (ys - g0).norm();
    if (unreachable > xis + opt.tol) {
        throw SolverError(
            "bpdn target residual lies below the reachable minimum",
            unreachable * ynorm);
    }

    const double mu_hi_cap = g0.cwiseAbs().maxCoeff();
    double lo = 0.0, hi = mu_hi_cap;
    double mu = mu_hi_cap * 0.5;
    Vector x = Vector::Zero(n);
    if (warm != nullptr && warm->valid && warm->x.size() == n) {
        x = warm->x / ynorm;
        if (warm->mu > 0.0 && warm->mu < mu_hi_cap) mu = warm->mu;
    }

    const double fp_tol = std::max(1e-14, 0.1 * opt.tol);
    Vector v = x, x_prev = x, grad(n), z(n);

    for (int outer = 0; outer < opt.max_outer; ++outer) {
        ++result.outer_iterations;

        // FISTA at the current mu.
        double tk = 1.0;
        v = x;
        int stable_support = 0;
        for (int it = 0; it < opt.max_inner; ++it) {
            ++result.inner_iterations;
            grad = apply_projector(p, v) - g0;
            x_prev.swap(x);
            shrink_into(v - grad, mu, x);
            const double tk1 = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
            v = x + ((tk - 1.0) / tk1) * (x - x_prev);
            tk = tk1;

            const double dx = (x - x_prev).norm();
            bool same_support = true;
            for (Index i = 0; i < n && same_support; ++i) {
                same_support = (x[i] != 0.0) == (x_prev[i] != 0.0);
            }
            stable_support = same_support ? stable_support + 1 : 0;
            if (dx <= fp_tol * std::max(1.0, x.norm())) break;
            // Once the active set settles, the closed-form step finishes
            // the job faster than more gradient iterations.
            if (stable_support >= 5 && it >= 10) break;
        }

        RootAttempt attempt = try_close_root(p, ys, g0, xis, x, mu_hi_cap);
        if (attempt.ok) {
            result.x = attempt.x * ynorm;
            result.residual = attempt.residual * ynorm;
            result.mu = attempt.mu;
            result.kkt_gap = attempt.kkt_gap;
            result.exact_root = true;
            if (warm != nullptr) {
                warm->x = result.x;
                warm->mu = attempt.mu;
                warm->valid = true;
            }
            return result;
        }

        const double r = (ys - apply_projector(p, x)).norm();
        if (std::abs(r - xis) <= 0.5 * opt.tol) break;
        if (r > xis) {
            hi = mu;
        } else {
            lo = mu;
        }
        mu = 0.5 * (lo + hi);
    }

    const double r = (ys - apply_projector(p, x)).norm();
    if (r > xis + opt.tol) {
        throw SolverError("bpdn did not reach the target residual", r * ynorm);
    }
    result.x = x * ynorm;
    result.residual = r * ynorm;
    result.mu = mu;
    const Vector corr = apply_projector(p, ys - apply_projector(p, x));
    result.kkt_gap =
        mu > 0.0 ? std::max(0.0, corr.cwiseAbs().maxCoeff() / mu - 1.0) : 0.0;
    if (warm != nullptr) {
        warm->x = result.x;
        warm->mu = mu;
        warm->valid = true;
    }
    return result;
}

}  // namespace reprocs::solver
