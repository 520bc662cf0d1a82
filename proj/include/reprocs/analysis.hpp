#ifndef REPROCS_ANALYSIS_HPP
#define REPROCS_ANALYSIS_HPP

#include <optional>
#include <vector>

#include "reprocs/basis.hpp"
#include "reprocs/synth.hpp"

namespace reprocs::analysis {

using reprocs::subspace_error;

// Subset enumeration cap for the exact denseness / RIC computations.
inline constexpr long long kSubsetBudget = 2'000'000;

enum class KappaMode { exact, bound };

struct KappaResult {
    double value = 0.0;
    bool exact = false;
    std::vector<Index> attaining;  // a maximizing T (exact mode only)
};

// Denseness coefficient kappa_s(P) = max_{|T|<=s} ||I_T' P||_2.
// Exact mode enumerates all size-s row subsets (the max over |T| <= s is
// attained at |T| = s) and returns an attaining subset; it refuses to run
// past kSubsetBudget.  Bound mode returns min(sqrt(s) kappa_1(P), 1).
KappaResult kappa_s(const Basis& p, int s, KappaMode mode = KappaMode::exact);

// Restricted isometry constant of A by exact enumeration:
// delta_s = max_{|T|<=s} max(lambda_max(A_T'A_T) - 1, 1 - lambda_min(A_T'A_T)).
double ric_delta_s(const Matrix& a, int s);

enum class HMode { brute, constructive };

// Support-change quantity h (Eq. for h(beta)) over windows of length beta.
//
// Brute mode searches every family of mutually disjoint index sets that
// covers the window's supports in adjacent pairs, returning the exact
// minimum h*(beta); it is gated to n <= 12 and beta <= 12.  Constructive
// mode builds the partition T_(i) = T^[i] \ T^[i+1] from the distinct
// supports in order of appearance (valid for contiguous-motion or
// disjoint-support sequences; ModelError otherwise) and returns the
// resulting h, an upper bound on h*(beta).
long h_star(const synth::SupportSequence& supports, long beta, HMode mode);

// Deterministic worst-case bounds from the main theorem's recursion, with
// kappa_s+ = 0.0215, h+ = 1/200, phi+ = 1.2 pinned.
struct ZetaPlusSequence {
    double zeta = 0.0;
    int K = 0;
    std::vector<double> zeta_star_plus;            // j = 1..J
    std::vector<std::vector<double>> zeta_k_plus;  // [j-1][k], k = 0..K
};

// Evaluates the recursion exactly as defined; throws ConfigError when zeta
// violates its theorem bound and NumericalError when a denominator D_{j,k}
// is nonpositive (the regime does not apply).
ZetaPlusSequence zeta_plus_sequence(int r0, int c, int J, double zeta,
                                    double f, double g);

struct TheoremParams {
    double zeta = 0.0;
    int K = 0;
    double xi = 0.0;
    double omega_lo = 0.0;  // 7 xi
    double omega_hi = 0.0;  // x_min - 7 xi
    double omega = 0.0;     // midpoint of the admissible interval
    double alpha_min = 0.0;
    double c_add = 0.0;
    bool g_ok = true;  // g <= sqrt(2), reported but not enforced
    double h_plus = 1.0 / 200.0;
    double kappa_s_plus = 0.0215;
    double phi_plus = 1.2;
};

// Parameter settings from the main theorem:
//   zeta = min(1e-4/r^2, 1.5e-4/(r^2 f), 1/(r^3 gamma^2)),
//   K    = ceil(log(0.17 c zeta) / log(0.72)),
//   xi   = sqrt(c) gamma_new + sqrt(zeta)(sqrt(r) + sqrt(c)),
//   alpha_min = C_add (log(6KJ) + 11 log n),
//   C_add = 4800/(zeta lambda^-)^2 max{16, (1.2 xi)^4}.
// Throws ConfigError when the omega interval is empty (x_min < 14 xi).
TheoremParams theorem_params(int r0, int c, int J, double f, double g,
                             double gamma, double gamma_new, double x_min,
                             double lambda_minus, Index n);

// One verification outcome; lhs <= rhs is the claim being checked.
struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

struct BlockBoundCheck : BoundCheck {
    long h = 0;
};

// Assembles M = sum_t I_{T_t} A_t I_{T_t}' over the window and compares
// ||M||_2 against 2 d^2 sigma+ h (d = 2 gives the 8 sigma+ h bound; d = 1
// is the sharpened disjoint-support constant).  Each A_t must be symmetric
// PSD with ||A_t||_2 <= sigma_plus.
BlockBoundCheck check_block_bound(const synth::SupportSequence& supports,
                                  const std::vector<Matrix>& a_t,
                                  double sigma_plus, long beta, int d = 2,
                                  HMode h_mode = HMode::constructive);

struct SinThetaCheck : BoundCheck {
    double gap = 0.0;  // lambda_min(A) - ||A_perp||_2 - ||H||_2
};

// Davis-Kahan style bound for the projection-PCA step: with
// M = E A E' + E_perp A_perp E_perp' + H and Q the top-c eigenvectors
// of M, checks ||(I - QQ')E||_2 <= ||H||_2 / gap.  Throws NumericalError
// when the gap is nonpositive (the bound is vacuous there).
SinThetaCheck check_sin_theta(const Matrix& a_top, const Matrix& a_perp,
                              const Matrix& h, const Basis& e_new);

// ||(1/a) sum X_t Y_t'||^2 <= lmax((1/a) sum X_t X_t') lmax((1/a) sum Y_t Y_t').
BoundCheck matrix_cs_check(const std::vector<Matrix>& xs,
                           const std::vector<Matrix>& ys);

}  // namespace reprocs::analysis

#endif  // REPROCS_ANALYSIS_HPP
