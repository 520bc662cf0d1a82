#include "reprocs/tracker.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <chrono>
#include <cmath>

namespace reprocs {

void ReprocsParams::validate() const {
    if (xi < 0.0) throw ConfigError("xi must be nonnegative");
    if (!(7.0 * xi <= omega)) {
        throw ConfigError("support threshold must satisfy 7 xi <= omega");
    }
    if (alpha < 1) throw ConfigError("alpha must be >= 1");
    if (K < 1) throw ConfigError("K must be >= 1");
    if (change_times.size() != c_new.size()) {
        throw ConfigError("change_times and c_new must have equal length");
    }
    for (size_t j = 0; j < change_times.size(); ++j) {
        if (change_times[j] < 1) throw ConfigError("change times must be >= 1");
        if (j > 0 && change_times[j] - change_times[j - 1] <=
                         static_cast<long>(K) * alpha) {
            throw ConfigError("changes closer than K*alpha frames apart");
        }
        if (c_new[j] < 0) throw ConfigError("c_new must be nonnegative");
    }
}

ProjPcaResult proj_pca(const Matrix& d, const Basis& p, Index r_extract) {
    const Index n = d.rows();
    const Index cols = d.cols();
    if (r_extract < 1) throw ConfigError("r_extract must be >= 1");
    if (cols < r_extract) throw ConfigError("window shorter than r_extract");
    if (!p.is_empty() && p.dim() != n) {
        throw DimensionError("proj_pca dimension mismatch");
    }

    const Matrix d_proj = p.project_out(d);
    Matrix q(n, r_extract);
    Vector eigenvalues(r_extract);

    if (cols < n) {
        // Gram route: eigenvectors of D'D lift to covariance eigenvectors.
        Matrix gram = d_proj.transpose() * d_proj;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
        for (Index i = 0; i < r_extract; ++i) {
            const Index src = cols - 1 - i;  // descending
            const double lam = std::max(0.0, eig.eigenvalues()[src]);
            eigenvalues[i] = lam / static_cast<double>(cols);
            if (lam > 0.0) {
                q.col(i) = d_proj * eig.eigenvectors().col(src) / std::sqrt(lam);
            } else {
                q.col(i).setZero();
            }
        }
    } else {
        Matrix cov = d_proj * d_proj.transpose() / static_cast<double>(cols);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
        for (Index i = 0; i < r_extract; ++i) {
            const Index src = n - 1 - i;
            eigenvalues[i] = std::max(0.0, eig.eigenvalues()[src]);
            q.col(i) = eig.eigenvectors().col(src);
        }
    }

    ProjPcaResult out;
    const double lead = eigenvalues[0];
    // Energy below the squared round-off of the unprojected window counts
    // as numerically rank deficient.
    const double input_scale =
        d.squaredNorm() / static_cast<double>(cols);
    const double floor = std::max(lead * 1e-12, input_scale * 1e-24);
    out.rank_warning = !(eigenvalues[r_extract - 1] > floor);

    if (out.rank_warning) {
        // Degenerate directions are replaced by canonical complement
        // columns so the result is still a usable basis.
        Matrix fill = orthonormal_complement(
            p.is_empty() ? Matrix(n, 0) : p.mat());
        Index next_fill = 0;
        for (Index i = 0; i < r_extract; ++i) {
            if (!(eigenvalues[i] > floor)) {
                q.col(i) = fill.col(next_fill++);
                eigenvalues[i] = 0.0;
            }
        }
    }

    // Re-orthogonalize against P and within Q; spans are unchanged.
    Matrix cleaned = p.is_empty() ? q : q - p.mat() * (p.mat().transpose() * q);
    Basis qb = Basis::orthonormalized(cleaned);
    if (qb.rank() < r_extract) {
        Matrix fill = orthonormal_complement(
            p.is_empty() ? qb.mat()
                         : (Matrix(n, p.rank() + qb.rank()) << p.mat(), qb.mat())
                               .finished());
        Matrix padded(n, r_extract);
        padded.leftCols(qb.rank()) = qb.mat();
        padded.rightCols(r_extract - qb.rank()) =
            fill.leftCols(r_extract - qb.rank());
        qb = Basis(std::move(padded), 1e-8);
        out.rank_warning = true;
    }
    Matrix qm = qb.mat();
    normalize_column_signs(qm);
    out.q = Basis(std::move(qm), 0.0);
    out.eigenvalues = std::move(eigenvalues);
    return out;
}

std::vector<Index> estimate_support(const Vector& x_cs, double omega) {
    if (omega < 0.0) throw ConfigError("omega must be nonnegative");
    std::vector<Index> support;
    for (Index i = 0; i < x_cs.size(); ++i) {
        if (std::abs(x_cs[i]) > omega) support.push_back(i);
    }
    return support;
}

LsRefineResult ls_refine(const Matrix& p_hat, const Vector& y,
                         const std::vector<Index>& support, double rank_tol) {
    const Index n = y.size();
    LsRefineResult out;
    out.x = Vector::Zero(n);
    const Index k = static_cast<Index>(support.size());
    if (k == 0) {
        out.sigma_min = 0.0;
        return out;
    }
    if (k > n) throw DimensionError("support larger than ambient dimension");

    // Columns of Phi I_T: e_i - P (P' e_i).
    Matrix a(n, k);
    for (Index c = 0; c < k; ++c) {
        Vector e = Vector::Zero(n);
        e[support[c]] = 1.0;
        if (p_hat.cols() > 0) {
            a.col(c) = e - p_hat * p_hat.row(support[c]).transpose();
        } else {
            a.col(c) = e;
        }
    }

    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix r_full = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Matrix> svd_r(r_full);
    const double smax = svd_r.singularValues()[0];
    const double smin = svd_r.singularValues()[k - 1];
    out.sigma_min = smin;
    if (!(smin > rank_tol * std::max(1.0, smax))) {
        throw NumericalError("ls_refine: projected support matrix is rank "
                             "deficient, sigma_min = " + std::to_string(smin),
                             smin);
    }
    const Vector coeffs = qr.solve(y);
    for (Index c = 0; c < k; ++c) out.x[support[c]] = coeffs[c];
    return out;
}

Tracker::Tracker(ReprocsParams params, Basis p_hat_0)
    : params_(std::move(params)), p_star_(std::move(p_hat_0)) {
    params_.validate();
    p_new_ = Basis::empty(p_star_.dim());
    buffer_.resize(p_star_.dim(), params_.alpha);
    buffer_.setZero();
    rebuild_concat();
}

Tracker::Tracker(ReprocsParams params, TrackerState state)
    : params_(std::move(params)),
      p_star_(Basis(std::move(state.p_star), 1e-8)),
      j_(state.j),
      k_(state.k),
      last_t_(state.last_t),
      buffer_(std::move(state.buffer)),
      buffer_filled_(state.buffer_filled) {
    params_.validate();
    p_new_ = state.p_new.cols() > 0 ? Basis(std::move(state.p_new), 1e-8)
                                    : Basis::empty(p_star_.dim());
    if (buffer_.rows() != p_star_.dim() || buffer_.cols() != params_.alpha) {
        throw DimensionError("checkpoint buffer shape mismatch");
    }
    rebuild_concat();
}

TrackerState Tracker::state() const {
    TrackerState s;
    s.p_star = p_star_.mat();
    s.p_new = p_new_.mat();
    s.j = j_;
    s.k = k_;
    s.last_t = last_t_;
    s.buffer = buffer_;
    s.buffer_filled = buffer_filled_;
    return s;
}

void Tracker::rebuild_concat() {
    p_cat_.resize(p_star_.dim(), p_star_.rank() + p_new_.rank());
    if (p_star_.rank() > 0) p_cat_.leftCols(p_star_.rank()) = p_star_.mat();
    if (p_new_.rank() > 0) p_cat_.rightCols(p_new_.rank()) = p_new_.mat();
}

Vector Tracker::project(const Vector& m) const {
    if (m.size() != p_star_.dim()) {
        throw DimensionError("measurement dimension mismatch");
    }
    if (p_cat_.cols() == 0) return m;
    return m - p_cat_ * (p_cat_.transpose() * m);
}

Tracker::Output Tracker::step(const Vector& m, long t) {
    if (m.size() != p_star_.dim()) {
        throw DimensionError("measurement dimension mismatch");
    }
    if (t <= last_t_) throw ConfigError("time must be strictly increasing");
    last_t_ = t;

    Output out;
    out.diag.t = t;

    // 1a: nullify most of l_t.
    Vector y = project(m);

    // 1b: projected sparse recovery.
    solver::BpdnProblem prob;
    prob.basis = p_cat_;
    prob.y = y;
    prob.xi = params_.xi;
    const auto cs = solver::bpdn_solve(prob, params_.solver, &warm_);
    out.diag.solver_inner = cs.inner_iterations;
    out.diag.solver_outer = cs.outer_iterations;
    out.diag.solver_residual = cs.residual;
    out.diag.solver_kkt_gap = cs.kkt_gap;

    // 1c: threshold support estimate.
    const auto support = estimate_support(cs.x, params_.omega);
    out.diag.support_size = static_cast<int>(support.size());
    if (params_.support_size_hint > 0 &&
        static_cast<int>(support.size()) > 2 * params_.support_size_hint) {
        out.diag.support_overflow = true;
    }

    // 1d: LS refinement on the estimated support.
    auto ls = ls_refine(p_cat_, y, support);
    out.x_hat = std::move(ls.x);
    out.diag.ls_sigma_min = ls.sigma_min;

    // 2: l_t estimate.
    out.l_hat = m - out.x_hat;

    // 3: scheduled projection-PCA.
    const int changes = static_cast<int>(params_.change_times.size());
    if (j_ <= changes) {
        const long tj = params_.change_times[j_ - 1];
        const int c = params_.c_new[j_ - 1];
        if (c == 0) {
            if (t >= tj) {
                j_ += 1;
                k_ = 1;
            }
        } else if (t >= tj && k_ <= params_.K) {
            const long pos = t - (tj + (static_cast<long>(k_) - 1) * params_.alpha);
            if (pos >= 0 && pos < params_.alpha) {
                buffer_.col(pos) = out.l_hat;
                buffer_filled_ = std::max(buffer_filled_, pos + 1);
            }
            if (t == tj + static_cast<long>(k_) * params_.alpha - 1) {
                auto pca = proj_pca(buffer_, p_star_, c);
                p_new_ = pca.q;
                out.diag.pca_k = k_;
                out.diag.pca_rank_warning = pca.rank_warning;
                if (k_ == params_.K) {
                    p_star_ = p_star_.concat(p_new_);
                    p_new_ = Basis::empty(p_star_.dim());
                    out.diag.committed = true;
                    j_ += 1;
                    k_ = 1;
                } else {
                    k_ += 1;
                }
                buffer_filled_ = 0;
                rebuild_concat();
            }
        }
    }
    return out;
}

RunOutput run_stream(long t_max, const std::function<Vector(long)>& m_at,
                     const ReprocsParams& params, const Basis& p_hat_0) {
    Tracker tracker(params, p_hat_0);
    RunOutput run;
    run.x_hat.resize(p_hat_0.dim(), std::max<long>(t_max, 0));
    run.diags.reserve(t_max > 0 ? t_max : 0);
    run.wall_seconds.reserve(t_max > 0 ? t_max : 0);
    run.p_timeline.emplace_back(1, tracker.p_hat());

    for (long t = 1; t <= t_max; ++t) {
        const auto t0 = std::chrono::steady_clock::now();
        auto out = tracker.step(m_at(t), t);
        const auto t1 = std::chrono::steady_clock::now();
        run.x_hat.col(t - 1) = out.x_hat;
        const bool p_changed = out.diag.pca_k > 0 || out.diag.committed;
        run.diags.push_back(std::move(out.diag));
        const double secs =
            std::chrono::duration<double>(t1 - t0).count();
        run.wall_seconds.push_back(secs);
        run.wall_seconds_total += secs;
        if (p_changed) {
            run.p_timeline.emplace_back(t + 1, tracker.p_hat());
        }
    }
    run.p_final = tracker.p_hat();
    return run;
}

RunOutput run_stream(const synth::StreamSynthesizer& stream,
                     const ReprocsParams& params, const Basis& p_hat_0) {
    return run_stream(
        stream.t_max(), [&stream](long t) { return stream.at(t).m; }, params,
        p_hat_0);
}

}  // namespace reprocs
