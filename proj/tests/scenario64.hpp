// Shared small-scale synthetic scenario builders for tests.
#ifndef REPROCS_TESTS_SCENARIO64_HPP
#define REPROCS_TESTS_SCENARIO64_HPP

#include "reprocs/basis.hpp"
#include "reprocs/synth.hpp"
#include "reprocs/tracker.hpp"

namespace scenario64 {

using namespace reprocs;

// Sylvester-Hadamard column, entries +-1/sqrt(n); n must be a power of two.
// Columns of the Hadamard matrix are exactly orthogonal and perfectly
// flat, which keeps the denseness coefficients small at tiny n.
inline Vector hadamard_column(Index n, Index col) {
    Vector v(n);
    for (Index row = 0; row < n; ++row) {
        const auto bits = static_cast<unsigned long>(row & col);
        const int parity = __builtin_popcountl(bits) & 1;
        v[row] = parity ? -1.0 : 1.0;
    }
    return v / std::sqrt(static_cast<double>(n));
}

struct Small {
    synth::SubspaceModel model;
    synth::SupportSequence supports;
    ReprocsParams params;
    double x_lo = 2.0;
    double x_hi = 6.0;
};

// n = 64 regime built for exact support recovery: perfectly flat basis
// (r0 = 1, one new direction), singleton support advancing one index
// every `move_every` frames (wrap aligned with the PCA window), small
// gamma_new held for the whole stream.
inline Small exact_support_scenario(long move_every = 4, int k_steps = 8,
                                    long tail_windows = 1) {
    const Index n = 64;
    Small sc;
    const long alpha = n * move_every;
    const long t1 = alpha + 1;
    const long t_max = t1 - 1 + (k_steps + tail_windows) * alpha;

    Matrix p(n, 2);
    p.col(0) = hadamard_column(n, 1);
    p.col(1) = hadamard_column(n, 2);

    sc.model.n = n;
    sc.model.t_max = t_max;
    sc.model.p_full = Basis(std::move(p), 1e-12);
    sc.model.change_times = {t1};
    sc.model.ranks = {1, 2};
    sc.model.gamma = 5.0;
    sc.model.gamma_new = 0.04;
    sc.model.ramp = t_max;  // the new direction stays small for the run
    sc.model.lambda_minus = 25.0 / 3.0;
    sc.model.lambda_plus = 25.0 / 3.0;

    sc.supports = synth::gen_support_example1(n, 1, 1, move_every, t_max, 0);

    sc.params.alpha = alpha;
    sc.params.K = k_steps;
    sc.params.change_times = {t1};
    sc.params.c_new = {1};
    sc.params.support_size_hint = 1;
    // Theorem-style settings at r = 2, c = 1, gamma = 5:
    // zeta = min(1e-4/4, 1.5e-4/4, 1/(8*25)) = 2.5e-5.
    const double zeta = 2.5e-5;
    sc.params.xi = 0.04 + std::sqrt(zeta) * (std::sqrt(2.0) + 1.0);
    sc.params.omega = 1.0;  // x_min / 2
    return sc;
}

}  // namespace scenario64

#endif  // REPROCS_TESTS_SCENARIO64_HPP
