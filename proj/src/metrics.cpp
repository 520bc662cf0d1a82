#include "reprocs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

namespace reprocs::analysis {

namespace {

double mean_over(const MetricsLog& log, long t_from, long t_to,
                 double (*pick)(const MetricsRecord&)) {
    double acc = 0.0;
    long count = 0;
    for (const auto& row : log.rows) {
        if (row.t >= t_from && row.t <= t_to) {
            acc += pick(row);
            ++count;
        }
    }
    return count > 0 ? acc / static_cast<double>(count)
                     : std::numeric_limits<double>::quiet_NaN();
}

MetricsLog compute_metrics_impl(
    const RunOutput& run, long t_max,
    const std::function<Vector(long)>& x_at,
    const std::function<int(long)>& segment_at,
    const std::function<Matrix(int)>& segment_basis) {
    if (run.x_hat.cols() != t_max ||
        static_cast<long>(run.diags.size()) != t_max) {
        throw DimensionError("run output and ground truth lengths differ");
    }
    const Index n = run.x_hat.rows();

    MetricsLog log;
    log.rows.reserve(t_max);

    // SE_t is piecewise constant: it changes only when P_hat or the true
    // segment changes, so cache one value per (timeline, segment) cell.
    size_t timeline_idx = 0;
    std::map<std::pair<size_t, int>, double> se_cache;

    for (long t = 1; t <= t_max; ++t) {
        while (timeline_idx + 1 < run.p_timeline.size() &&
               run.p_timeline[timeline_idx + 1].first <= t) {
            ++timeline_idx;
        }
        const int segment = segment_at(t);
        const auto key = std::make_pair(timeline_idx, segment);
        auto it = se_cache.find(key);
        if (it == se_cache.end()) {
            const double se = subspace_error(
                run.p_timeline[timeline_idx].second, segment_basis(segment));
            it = se_cache.emplace(key, se).first;
        }

        const Vector x_true = x_at(t);
        MetricsRecord row;
        row.t = t;
        row.se = it->second;
        const Vector diff = run.x_hat.col(t - 1) - x_true;
        row.x_err = diff.norm();
        const double x_norm = x_true.norm();
        if (x_norm > 0.0) {
            row.rel_x_err = row.x_err / x_norm;
        } else {
            row.rel_x_err =
                row.x_err > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        }

        long hits = 0, est_size = 0, true_size = 0;
        bool mismatch = false;
        for (Index i = 0; i < n; ++i) {
            const bool est = run.x_hat(i, t - 1) != 0.0;
            const bool act = x_true[i] != 0.0;
            est_size += est;
            true_size += act;
            hits += est && act;
            mismatch |= est != act;
        }
        row.support_exact = !mismatch;
        row.support_precision =
            est_size > 0 ? static_cast<double>(hits) / est_size : 1.0;
        row.support_recall =
            true_size > 0 ? static_cast<double>(hits) / true_size : 1.0;

        row.solver_inner = run.diags[t - 1].solver_inner;
        row.solver_residual = run.diags[t - 1].solver_residual;
        row.wall_seconds =
            t - 1 < static_cast<long>(run.wall_seconds.size())
                ? run.wall_seconds[t - 1]
                : 0.0;
        log.rows.push_back(row);
    }
    return log;
}

}  // namespace

double MetricsLog::mean_rel_x_err(long t_from, long t_to) const {
    return mean_over(*this, t_from, t_to,
                     [](const MetricsRecord& r) { return r.rel_x_err; });
}

double MetricsLog::mean_se(long t_from, long t_to) const {
    return mean_over(*this, t_from, t_to,
                     [](const MetricsRecord& r) { return r.se; });
}

double MetricsLog::support_exact_fraction(long t_from, long t_to) const {
    return mean_over(*this, t_from, t_to, [](const MetricsRecord& r) {
        return r.support_exact ? 1.0 : 0.0;
    });
}

int GroundTruth::segment_at(long t) const {
    int j = 0;
    while (j < static_cast<int>(change_times.size()) && t >= change_times[j]) {
        ++j;
    }
    return j;
}

MetricsLog compute_metrics(const RunOutput& run,
                           const synth::StreamSynthesizer& truth) {
    return compute_metrics_impl(
        run, truth.t_max(), [&](long t) { return truth.at(t).x_true; },
        [&](long t) { return truth.model().segment_at(t); },
        [&](int j) { return Matrix(truth.model().segment_basis(j)); });
}

MetricsLog compute_metrics(const RunOutput& run, const GroundTruth& truth) {
    if (truth.ranks.empty()) {
        throw ConfigError("ground truth needs at least one segment rank");
    }
    return compute_metrics_impl(
        run, truth.x_true.cols(), [&](long t) { return Vector(truth.x_true.col(t - 1)); },
        [&](long t) { return truth.segment_at(t); },
        [&](int j) { return Matrix(truth.p_full.leftCols(truth.ranks[j])); });
}

std::vector<double> window_mean_rel_err(const MetricsLog& log, long t_j,
                                        long alpha, int K) {
    std::vector<double> means;
    means.reserve(K);
    for (int k = 1; k <= K; ++k) {
        const long from = t_j + (static_cast<long>(k) - 1) * alpha;
        const long to = t_j + static_cast<long>(k) * alpha - 1;
        means.push_back(log.mean_rel_x_err(from, to));
    }
    return means;
}

}  // namespace reprocs::analysis
