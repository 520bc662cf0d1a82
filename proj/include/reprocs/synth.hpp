#ifndef REPROCS_SYNTH_HPP
#define REPROCS_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "reprocs/basis.hpp"
#include "reprocs/rng.hpp"

namespace reprocs::synth {

// Piecewise-constant subspace trajectory.  The full basis is stored once;
// segment j spans the leading ranks[j] columns, so the nesting
// P_(j) = [P_(j-1)  P_(j),new] holds by construction.
struct SubspaceModel {
    Index n = 0;
    long t_max = 0;
    Basis p_full;                    // n x r_J
    std::vector<long> change_times;  // t_j, 1-based, strictly increasing
    std::vector<int> ranks;          // r_0, r_1, ..., r_J (cumulative)
    double gamma = 0.0;              // sup-norm bound on established coefficients
    double gamma_new = 0.0;          // bound on new-direction coefficients in the ramp
    long ramp = 0;                   // d: frames after t_j with the gamma_new bound
    double lambda_minus = 0.0;
    double lambda_plus = 0.0;
    double f = 1.0;
    double g = 1.0;

    int changes() const { return static_cast<int>(change_times.size()); }
    // Segment index j such that t in [t_j, t_{j+1}), with t_0 := 1.
    int segment_at(long t) const;
    Index rank_at(long t) const { return ranks[segment_at(t)]; }
    Index max_rank() const { return ranks.empty() ? 0 : ranks.back(); }
    Eigen::Ref<const Matrix> basis_at(long t) const {
        return p_full.mat().leftCols(rank_at(t));
    }
    Eigen::Ref<const Matrix> segment_basis(int j) const {
        return p_full.mat().leftCols(ranks[j]);
    }
    // P_(j),new for j >= 1.
    Eigen::Ref<const Matrix> new_block(int j) const {
        return p_full.mat().middleCols(ranks[j - 1], ranks[j] - ranks[j - 1]);
    }
    int c_new(int j) const { return ranks[j] - ranks[j - 1]; }
    int max_c_new() const;
    // Time the column was introduced (1 for the initial block).
    long intro_time(Index col) const;
};

struct ModelConfig {
    Index n = 0;
    long t_max = 0;
    int r0 = 0;
    std::vector<long> change_times;
    std::vector<int> c_new;
    double gamma = 5.0;
    double gamma_new = 0.0;
    long ramp = 0;
    double lambda_minus = 0.0;  // 0 means: derive as gamma^2 / 3
    double lambda_plus = 0.0;
    double f = 1.0;
    double g = 1.0;
};

// Draws the full basis (Gaussian, Gram-Schmidt) and fills in segment
// bookkeeping.  Throws ConfigError on inconsistent dimensions or times.
SubspaceModel gen_subspace_model(const ModelConfig& cfg, Rng& rng);

// Per-time support sets.  Indices are 0-based internally; documentation
// and file formats use 1-based indices.
struct SupportSequence {
    Index n = 0;
    int s = 0;  // max support size
    std::vector<std::vector<int>> supports;
    std::string model_tag;
    std::uint64_t seed = 0;

    long t_max() const { return static_cast<long>(supports.size()); }
    const std::vector<int>& at(long t) const { return supports[t - 1]; }
};

// Example-1 motion: a contiguous block of size s that moves down by
// `step` indices every `move_every` frames and wraps from n to 1.
// Requires s/2 <= step < 2s.
SupportSequence gen_support_example1(Index n, int s, int step, long move_every,
                                     long t_max, std::uint64_t seed);

// Probabilistic motion: the block center follows
//   o_t = o_{t-1} + theta_t (0.6 s + nu_t),
// theta_t ~ Bernoulli(q), nu_t ~ N(0, sigma2).  Centers are kept as reals
// between moves; the realized support is the s consecutive indices around
// the rounded center, wrapping modulo n.
SupportSequence gen_support_probabilistic(Index n, int s, double q,
                                          double sigma2, long t_max,
                                          std::uint64_t seed);

// Motion every frame: the block advances by Uniform{1..a} indices at
// every t, always in the same direction, wrapping.
SupportSequence gen_support_everyframe(Index n, int s, int a, long t_max,
                                       std::uint64_t seed);

// Each support an independent uniform s-subset of {1..n}.
SupportSequence gen_support_uniform(Index n, int s, long t_max,
                                    std::uint64_t seed);

// Variance from the probabilistic support lemma regime: sigma^2 = rho s^2 / log n.
double lemma4_sigma2(double rho, int s, Index n);

// Support pattern of a stored sparse matrix (one column per frame).
SupportSequence supports_from_columns(const Matrix& x);

// One frame of the measurement stream m_t = x_t + l_t.
struct StreamSample {
    long t = 0;
    Vector m;
    Vector x_true;
    Vector l_true;
    Vector a_true;  // length r_J; entries of not-yet-introduced directions are 0
};

// Coefficient vector a_t (full length r_J).  Entries are U[-gamma, gamma],
// except new directions within their ramp window, which are
// U[-gamma_new, gamma_new].  Independent across t for a fixed stream.
Vector gen_coefficients(const SubspaceModel& model, long t, const Rng& stream);

// Lazily synthesized stream; at(t) is pure in (config, seed), so samples
// can be generated in any order and from any thread.
class StreamSynthesizer {
public:
    StreamSynthesizer(SubspaceModel model, SupportSequence supports, double lo,
                      double hi, std::uint64_t seed);

    StreamSample at(long t) const;
    long t_max() const { return model_.t_max; }
    Index n() const { return model_.n; }
    const SubspaceModel& model() const { return model_; }
    const SupportSequence& supports() const { return supports_; }
    double x_min() const { return lo_; }

private:
    SubspaceModel model_;
    SupportSequence supports_;
    double lo_;
    double hi_;
    Rng coeff_root_;
    Rng value_root_;
};

struct PerturbedBasis {
    Basis basis;
    double se = 0.0;  // subspace error against the unperturbed input
};

// P0 plus i.i.d. Gaussian noise of the given standard deviation,
// re-orthonormalized; reports the resulting subspace error.
PerturbedBasis perturb_initial_estimate(const Basis& p0, double noise_std,
                                        Rng& rng);

}  // namespace reprocs::synth

#endif  // REPROCS_SYNTH_HPP
