#ifndef REPROCS_EXPERIMENT_HPP
#define REPROCS_EXPERIMENT_HPP

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "reprocs/analysis.hpp"
#include "reprocs/metrics.hpp"
#include "reprocs/pcp.hpp"
#include "reprocs/synth.hpp"
#include "reprocs/tracker.hpp"

namespace reprocs::experiment {

struct SupportSpec {
    enum class Kind { example1, probabilistic, everyframe, uniform };
    Kind kind = Kind::example1;
    int s = 0;
    int step = 0;          // example1
    long move_every = 1;   // example1
    double q = 0.0;        // probabilistic
    double sigma2 = 0.0;   // probabilistic
    int a = 1;             // everyframe
};

struct PcpRunConfig {
    long stride = 0;  // snapshot spacing; 0 means alpha
    double tol = 1e-7;
    int max_iter = 500;
};

struct ExperimentConfig {
    int schema_version = 1;
    std::string scenario = "custom";
    int trials = 1;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    bool emit_csv = true;
    bool emit_svg = true;
    bool emit_json = true;

    synth::ModelConfig model;
    SupportSpec support;
    double x_lo = 2.0;
    double x_hi = 6.0;
    double init_noise_std = 1e-4;
    ReprocsParams params;  // xi/omega <= 0 are filled in by finalize()
    PcpRunConfig pcp;

    // Resolves derived values: ramp, change schedule, theorem-default xi,
    // omega = x_min/2, support size hint, pcp stride.
    void finalize();
};

// Paper-experiment presets.
ExperimentConfig fig1_config();  // correlated (example-1) supports
ExperimentConfig fig2_config();  // uniform random supports

// JSON config document (versioned; unknown keys are rejected).
ExperimentConfig parse_config(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// Per-trial deterministic builders; every random quantity descends from
// cfg.seed and the trial index.
synth::SubspaceModel make_model(const ExperimentConfig& cfg, int trial);
synth::SupportSequence make_supports(const ExperimentConfig& cfg, int trial);
synth::StreamSynthesizer make_stream(const ExperimentConfig& cfg, int trial);
synth::PerturbedBasis make_initial_estimate(const ExperimentConfig& cfg,
                                            int trial,
                                            const synth::SubspaceModel& model);

struct ReprocsTrialResult {
    analysis::MetricsLog metrics;
    RunOutput run;
};
ReprocsTrialResult run_reprocs_trial(const ExperimentConfig& cfg, int trial);

struct PcpTrialResult {
    std::vector<pcp::PcpSnapshot> snapshots;
};
PcpTrialResult run_pcp_trial(const ExperimentConfig& cfg, int trial);

// Error at every time instant, taken from the first snapshot whose window
// covers it; length = last snapshot time.
std::vector<double> pcp_error_timeline(
    const std::vector<pcp::PcpSnapshot>& snapshots);

// Element-wise mean across trials (rows must share a length).
std::vector<double> mean_rows(const std::vector<std::vector<double>>& rows);

// ---- verification suites (also driven by the CLI `verify` subcommand) ----

struct VerifyCheck {
    std::string quantity;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    std::string config;
    std::uint64_t seed = 0;
};

struct VerifyReport {
    std::string suite;
    bool passed = false;
    double seconds = 0.0;
    std::vector<VerifyCheck> checks;
};

VerifyReport verify_lemma1(std::uint64_t seed);     // 200 exact-enumeration identities
VerifyReport verify_zeta();                         // recursion decay grid
VerifyReport verify_blockbound(std::uint64_t seed); // 1000 windows + disjoint variant
VerifyReport verify_sintheta(std::uint64_t seed);   // 1000 randomized trials
VerifyReport verify_matrixcs(std::uint64_t seed);   // 1000 randomized trials
std::vector<VerifyReport> verify_all(std::uint64_t seed);

nlohmann::json report_to_json(const VerifyReport& report);

// ---- worker pool ------------------------------------------------------

// REPROCS_THREADS caps the pool; defaults to hardware concurrency.
int thread_budget();

template <typename F>
void parallel_for(int count, F&& body) {
    const int workers = std::min(std::max(thread_budget(), 1), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace reprocs::experiment

#endif  // REPROCS_EXPERIMENT_HPP
