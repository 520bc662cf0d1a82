#ifndef REPROCS_METRICS_HPP
#define REPROCS_METRICS_HPP

#include <vector>

#include "reprocs/synth.hpp"
#include "reprocs/tracker.hpp"

namespace reprocs::analysis {

struct MetricsRecord {
    long t = 0;
    double se = 0.0;       // ||(I - Phat Phat') P_t||_2
    double x_err = 0.0;    // ||x_hat - x||_2
    double rel_x_err = 0.0;
    bool support_exact = false;
    double support_precision = 1.0;
    double support_recall = 1.0;
    int solver_inner = 0;
    double solver_residual = 0.0;
    double wall_seconds = 0.0;
};

struct MetricsLog {
    std::vector<MetricsRecord> rows;

    double mean_rel_x_err(long t_from, long t_to) const;
    double mean_se(long t_from, long t_to) const;
    double support_exact_fraction(long t_from, long t_to) const;
};

// Ground truth detached from the synthesizer, e.g. loaded back from a
// dataset on disk.
struct GroundTruth {
    Matrix x_true;   // n x t_max
    Matrix p_full;   // n x r_J (empty allowed)
    std::vector<long> change_times;
    std::vector<int> ranks;  // r_0..r_J; basis of segment j = leftCols(ranks[j])

    int segment_at(long t) const;
};

// Joins algorithm outputs with ground truth.  The truth enters here and
// only here; the tracker never sees it.  Throws on time-axis mismatch.
MetricsLog compute_metrics(const RunOutput& run,
                           const synth::StreamSynthesizer& truth);
MetricsLog compute_metrics(const RunOutput& run, const GroundTruth& truth);

// Mean rel_x_err over each PCA window [t_j + (k-1) alpha, t_j + k alpha - 1].
std::vector<double> window_mean_rel_err(const MetricsLog& log, long t_j,
                                        long alpha, int K);

}  // namespace reprocs::analysis

#endif  // REPROCS_METRICS_HPP
