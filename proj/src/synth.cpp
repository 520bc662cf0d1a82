#include "reprocs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace reprocs::synth {

namespace {

std::vector<int> contiguous_block(Index n, long start, int s) {
    std::vector<int> idx(s);
    for (int i = 0; i < s; ++i) {
        long v = (start + i) % n;
        if (v < 0) v += n;
        idx[i] = static_cast<int>(v);
    }
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace

int SubspaceModel::segment_at(long t) const {
    int j = 0;
    while (j < changes() && t >= change_times[j]) ++j;
    return j;
}

int SubspaceModel::max_c_new() const {
    int c = 0;
    for (int j = 1; j <= changes(); ++j) c = std::max(c, c_new(j));
    return c;
}

long SubspaceModel::intro_time(Index col) const {
    for (int j = 0; j <= changes(); ++j) {
        if (col < ranks[j]) return j == 0 ? 1 : change_times[j - 1];
    }
    throw DimensionError("column index beyond model rank");
}

SubspaceModel gen_subspace_model(const ModelConfig& cfg, Rng& rng) {
    if (cfg.n <= 0 || cfg.t_max <= 0) {
        throw ConfigError("model requires positive n and t_max");
    }
    if (cfg.r0 < 0) throw ConfigError("r0 must be nonnegative");
    if (cfg.change_times.size() != cfg.c_new.size()) {
        throw ConfigError("change_times and c_new must have equal length");
    }
    long prev = 0;
    for (size_t j = 0; j < cfg.change_times.size(); ++j) {
        const long tj = cfg.change_times[j];
        if (tj < 1 || tj > cfg.t_max) {
            throw ConfigError("change time outside [1, t_max]");
        }
        if (tj <= prev) throw ConfigError("change times must be strictly increasing");
        if (j > 0 && tj - prev <= cfg.ramp) {
            throw ConfigError("change spacing must exceed the ramp duration d");
        }
        if (cfg.c_new[j] < 0) throw ConfigError("c_new must be nonnegative");
        prev = tj;
    }

    SubspaceModel model;
    model.n = cfg.n;
    model.t_max = cfg.t_max;
    model.change_times = cfg.change_times;
    model.ranks.resize(cfg.change_times.size() + 1);
    model.ranks[0] = cfg.r0;
    for (size_t j = 0; j < cfg.c_new.size(); ++j) {
        model.ranks[j + 1] = model.ranks[j] + cfg.c_new[j];
    }
    const Index r_total = model.ranks.back();
    if (r_total > cfg.n) throw ConfigError("total rank exceeds ambient dimension");
    model.p_full = r_total > 0 ? gen_basis(cfg.n, r_total, rng) : Basis::empty(cfg.n);

    model.gamma = cfg.gamma;
    model.gamma_new = cfg.gamma_new;
    model.ramp = cfg.ramp;
    model.lambda_minus =
        cfg.lambda_minus > 0 ? cfg.lambda_minus : cfg.gamma * cfg.gamma / 3.0;
    model.lambda_plus =
        cfg.lambda_plus > 0 ? cfg.lambda_plus : cfg.gamma * cfg.gamma / 3.0;
    model.f = cfg.f;
    model.g = cfg.g;
    return model;
}

SupportSequence gen_support_example1(Index n, int s, int step, long move_every,
                                     long t_max, std::uint64_t seed) {
    if (s < 0 || s > n) throw ConfigError("support size out of range");
    if (move_every < 1) throw ConfigError("move_every must be >= 1");
    if (2 * step < s || step >= 2 * s) {
        throw ModelError("example-1 motion needs s/2 <= step < 2s");
    }
    SupportSequence seq;
    seq.n = n;
    seq.s = s;
    seq.model_tag = "example1";
    seq.seed = seed;
    seq.supports.resize(t_max);
    for (long t = 1; t <= t_max; ++t) {
        const long moves = (t - 1) / move_every;
        seq.supports[t - 1] = contiguous_block(n, moves * step, s);
    }
    return seq;
}

SupportSequence gen_support_probabilistic(Index n, int s, double q,
                                          double sigma2, long t_max,
                                          std::uint64_t seed) {
    if (s < 0 || s > n) throw ConfigError("support size out of range");
    if (q < 0.0 || q > 1.0) throw ConfigError("q must be a probability");
    if (sigma2 < 0.0) throw ConfigError("sigma2 must be nonnegative");
    SupportSequence seq;
    seq.n = n;
    seq.s = s;
    seq.model_tag = "probabilistic";
    seq.seed = seed;
    seq.supports.resize(t_max);

    Rng root(seed);
    const double sigma = std::sqrt(sigma2);
    double center = (s - 1) / 2.0;  // 0-based center of the initial block {1..s}
    for (long t = 1; t <= t_max; ++t) {
        if (t > 1) {
            Rng r = root.split(t);
            const bool move = r.bernoulli(q);
            const double nu = r.normal(0.0, sigma);
            if (move) center += 0.6 * s + nu;
        }
        // Round-half-up; the real-valued center carries across moves.
        const long c = static_cast<long>(std::floor(center + 0.5));
        seq.supports[t - 1] = contiguous_block(n, c - (s - 1) / 2, s);
    }
    return seq;
}

SupportSequence gen_support_everyframe(Index n, int s, int a, long t_max,
                                       std::uint64_t seed) {
    if (s < 0 || s > n) throw ConfigError("support size out of range");
    if (a < 1) throw ConfigError("max step a must be >= 1");
    if (s + a > n) throw ConfigError("need s + a <= n");
    SupportSequence seq;
    seq.n = n;
    seq.s = s;
    seq.model_tag = "everyframe";
    seq.seed = seed;
    seq.supports.resize(t_max);

    Rng root(seed);
    long start = 0;
    for (long t = 1; t <= t_max; ++t) {
        if (t > 1) {
            Rng r = root.split(t);
            start = (start + r.uniform_int(1, a)) % n;
        }
        seq.supports[t - 1] = contiguous_block(n, start, s);
    }
    return seq;
}

SupportSequence gen_support_uniform(Index n, int s, long t_max,
                                    std::uint64_t seed) {
    if (s < 0 || s > n) throw ConfigError("support size out of range");
    SupportSequence seq;
    seq.n = n;
    seq.s = s;
    seq.model_tag = "uniform";
    seq.seed = seed;
    seq.supports.resize(t_max);

    Rng root(seed);
    std::vector<int> pool(n);
    for (long t = 1; t <= t_max; ++t) {
        std::iota(pool.begin(), pool.end(), 0);
        Rng r = root.split(t);
        for (int i = 0; i < s; ++i) {
            const auto j = static_cast<size_t>(r.uniform_int(i, n - 1));
            std::swap(pool[i], pool[j]);
        }
        std::vector<int> idx(pool.begin(), pool.begin() + s);
        std::sort(idx.begin(), idx.end());
        seq.supports[t - 1] = std::move(idx);
    }
    return seq;
}

double lemma4_sigma2(double rho, int s, Index n) {
    return rho * static_cast<double>(s) * s / std::log(static_cast<double>(n));
}

SupportSequence supports_from_columns(const Matrix& x) {
    SupportSequence seq;
    seq.n = x.rows();
    seq.model_tag = "from-matrix";
    seq.supports.resize(x.cols());
    int s_max = 0;
    for (Index t = 0; t < x.cols(); ++t) {
        auto& support = seq.supports[t];
        for (Index i = 0; i < x.rows(); ++i) {
            if (x(i, t) != 0.0) support.push_back(static_cast<int>(i));
        }
        s_max = std::max(s_max, static_cast<int>(support.size()));
    }
    seq.s = s_max;
    return seq;
}

Vector gen_coefficients(const SubspaceModel& model, long t, const Rng& stream) {
    if (t < 1 || t > model.t_max) throw ConfigError("time outside [1, t_max]");
    const Index r_full = model.max_rank();
    Vector a = Vector::Zero(r_full);
    const Index r_t = model.rank_at(t);
    Rng r = stream.split(static_cast<std::uint64_t>(t));
    for (Index i = 0; i < r_t; ++i) {
        const long intro = model.intro_time(i);
        const bool ramping = intro > 1 && t < intro + model.ramp;
        const double bound = ramping ? model.gamma_new : model.gamma;
        a[i] = r.uniform(-bound, bound);
    }
    return a;
}

StreamSynthesizer::StreamSynthesizer(SubspaceModel model,
                                     SupportSequence supports, double lo,
                                     double hi, std::uint64_t seed)
    : model_(std::move(model)),
      supports_(std::move(supports)),
      lo_(lo),
      hi_(hi) {
    if (!(lo > 0.0) || hi < lo) {
        throw ConfigError("x value range must satisfy 0 < lo <= hi");
    }
    if (supports_.t_max() < model_.t_max) {
        throw ConfigError("support sequence shorter than the stream");
    }
    if (supports_.n != model_.n) {
        throw DimensionError("support and model dimensions differ");
    }
    Rng root(seed);
    coeff_root_ = root.split("coefficients");
    value_root_ = root.split("sparse-values");
}

StreamSample StreamSynthesizer::at(long t) const {
    if (t < 1 || t > model_.t_max) throw ConfigError("time outside [1, t_max]");
    StreamSample sample;
    sample.t = t;
    sample.a_true = gen_coefficients(model_, t, coeff_root_);
    if (model_.max_rank() > 0) {
        sample.l_true = model_.p_full.mat() * sample.a_true;
    } else {
        sample.l_true = Vector::Zero(model_.n);
    }
    sample.x_true = Vector::Zero(model_.n);
    Rng r = value_root_.split(static_cast<std::uint64_t>(t));
    for (int idx : supports_.at(t)) {
        sample.x_true[idx] = r.uniform(lo_, hi_);
    }
    sample.m = sample.x_true + sample.l_true;
    return sample;
}

PerturbedBasis perturb_initial_estimate(const Basis& p0, double noise_std,
                                        Rng& rng) {
    if (noise_std < 0.0) throw ConfigError("noise_std must be nonnegative");
    Matrix noisy = p0.mat();
    for (Index j = 0; j < noisy.cols(); ++j) {
        for (Index i = 0; i < noisy.rows(); ++i) {
            noisy(i, j) += rng.normal(0.0, noise_std);
        }
    }
    PerturbedBasis out;
    out.basis = Basis::orthonormalized(noisy);
    out.se = subspace_error(out.basis.mat(), p0.mat());
    return out;
}

}  // namespace reprocs::synth
