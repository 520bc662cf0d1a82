#ifndef REPROCS_TRACKER_HPP
#define REPROCS_TRACKER_HPP

#include <functional>
#include <utility>
#include <vector>

#include "reprocs/basis.hpp"
#include "reprocs/bpdn.hpp"
#include "reprocs/synth.hpp"

namespace reprocs {

// Algorithm parameters plus the known model parameters t_j, c_{j,new}.
struct ReprocsParams {
    double xi = 0.0;     // CS residual bound
    double omega = 0.0;  // support threshold
    long alpha = 0;      // projection-PCA window length
    int K = 0;           // PCA steps per subspace change
    std::vector<long> change_times;
    std::vector<int> c_new;
    int support_size_hint = 0;  // s when known; 0 disables the 2s overflow flag
    solver::BpdnOptions solver;

    void validate() const;
};

// (I - PP')D followed by PCA; Q holds the top eigenvectors of the
// projected sample covariance.  The eigen-decomposition runs on whichever
// of the alpha x alpha Gram matrix or the n x n covariance is smaller.
struct ProjPcaResult {
    Basis q;
    Vector eigenvalues;        // top r_extract eigenvalues of (1/alpha) D_proj D_proj'
    bool rank_warning = false; // r_extract exceeded the numerical rank of D_proj
};
ProjPcaResult proj_pca(const Matrix& d, const Basis& p, Index r_extract);

// Support estimate by entrywise thresholding: { i : |x[i]| > omega },
// strict inequality.
std::vector<Index> estimate_support(const Vector& x_cs, double omega);

// Least-squares refinement on a fixed support: x restricted to T equals
// pinv(Phi_T) y, zero elsewhere.  Reports the smallest singular value of
// Phi_T; throws NumericalError when it falls below rank_tol * largest.
struct LsRefineResult {
    Vector x;
    double sigma_min = 0.0;
};
LsRefineResult ls_refine(const Matrix& p_hat, const Vector& y,
                         const std::vector<Index>& support,
                         double rank_tol = 1e-10);

struct StepDiag {
    long t = 0;
    int solver_inner = 0;
    int solver_outer = 0;
    double solver_residual = 0.0;
    double solver_kkt_gap = 0.0;
    int support_size = 0;
    bool support_overflow = false;  // |T_hat| > 2 * support_size_hint
    double ls_sigma_min = 0.0;
    int pca_k = 0;          // k of the PCA step completed at this t (0: none)
    bool pca_rank_warning = false;
    bool committed = false;  // P_(j) was committed at this t
};

// Serializable tracker state for pause/resume of long runs.
struct TrackerState {
    Matrix p_star;
    Matrix p_new;
    int j = 1;
    int k = 1;
    long last_t = 0;
    Matrix buffer;
    long buffer_filled = 0;
};

// The online ReProCS state machine.  step() consumes measurements in
// strictly increasing time order; the caller never hands it ground truth.
class Tracker {
public:
    Tracker(ReprocsParams params, Basis p_hat_0);
    Tracker(ReprocsParams params, TrackerState state);

    struct Output {
        Vector x_hat;
        Vector l_hat;
        StepDiag diag;
    };
    Output step(const Vector& m, long t);

    // y = (I - P_hat P_hat') m, operator-style.
    Vector project(const Vector& m) const;

    const Matrix& p_hat() const { return p_cat_; }
    const Basis& p_star() const { return p_star_; }
    const Basis& p_new() const { return p_new_; }
    const ReprocsParams& params() const { return params_; }
    TrackerState state() const;

private:
    void rebuild_concat();

    ReprocsParams params_;
    Basis p_star_;
    Basis p_new_;
    Matrix p_cat_;
    int j_ = 1;  // 1-based index of the change currently being tracked
    int k_ = 1;
    long last_t_ = 0;
    Matrix buffer_;
    long buffer_filled_ = 0;
    solver::BpdnWarmStart warm_;
};

// Full-stream driver.  Keeps the estimates and the P_hat timeline so the
// analysis module can attach ground truth afterwards.
struct RunOutput {
    Matrix x_hat;  // n x t_max
    std::vector<StepDiag> diags;
    std::vector<std::pair<long, Matrix>> p_timeline;  // (first t in effect, P_hat)
    Matrix p_final;
    std::vector<double> wall_seconds;
    double wall_seconds_total = 0.0;
};

RunOutput run_stream(long t_max, const std::function<Vector(long)>& m_at,
                     const ReprocsParams& params, const Basis& p_hat_0);
RunOutput run_stream(const synth::StreamSynthesizer& stream,
                     const ReprocsParams& params, const Basis& p_hat_0);

}  // namespace reprocs

#endif  // REPROCS_TRACKER_HPP
