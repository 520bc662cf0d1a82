#include "reprocs/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>

namespace reprocs::analysis {

namespace {

long long binomial_capped(Index n, int s, long long cap) {
    long long value = 1;
    for (int i = 1; i <= s; ++i) {
        value = value * (n - s + i) / i;
        if (value > cap) return cap + 1;
    }
    return value;
}

// Iterates size-s subsets of {0..n-1} in lexicographic order.
bool next_subset(std::vector<Index>& t, Index n) {
    const int s = static_cast<int>(t.size());
    int i = s - 1;
    while (i >= 0 && t[i] == n - s + i) --i;
    if (i < 0) return false;
    ++t[i];
    for (int j = i + 1; j < s; ++j) t[j] = t[j - 1] + 1;
    return true;
}

double lambda_max_sym(const Matrix& g) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
}

}  // namespace

KappaResult kappa_s(const Basis& p, int s, KappaMode mode) {
    KappaResult out;
    if (p.rank() == 0 || s == 0) {
        out.exact = true;
        return out;
    }
    const Index n = p.dim();
    const int s_eff = std::min<int>(s, static_cast<int>(n));

    if (mode == KappaMode::bound) {
        double kappa1 = 0.0;
        for (Index i = 0; i < n; ++i) {
            kappa1 = std::max(kappa1, p.mat().row(i).norm());
        }
        out.value = std::min(std::sqrt(static_cast<double>(s_eff)) * kappa1, 1.0);
        out.exact = false;
        return out;
    }

    if (binomial_capped(n, s_eff, kSubsetBudget) > kSubsetBudget) {
        throw BudgetError(
            "kappa_s exact enumeration exceeds the subset budget; use bound mode");
    }

    std::vector<Index> t(s_eff);
    for (int i = 0; i < s_eff; ++i) t[i] = i;
    Matrix rows(s_eff, p.rank());
    do {
        for (int i = 0; i < s_eff; ++i) rows.row(i) = p.mat().row(t[i]);
        const Matrix gram = rows.cols() <= rows.rows()
                                ? Matrix(rows.transpose() * rows)
                                : Matrix(rows * rows.transpose());
        const double value = std::sqrt(std::max(0.0, lambda_max_sym(gram)));
        if (value > out.value) {
            out.value = value;
            out.attaining = t;
        }
    } while (next_subset(t, n));
    out.exact = true;
    return out;
}

double ric_delta_s(const Matrix& a, int s) {
    const Index n = a.cols();
    if (s <= 0) return 0.0;
    const int s_eff = std::min<int>(s, static_cast<int>(n));
    if (binomial_capped(n, s_eff, kSubsetBudget) > kSubsetBudget) {
        throw BudgetError("ric_delta_s enumeration exceeds the subset budget");
    }

    std::vector<Index> t(s_eff);
    for (int i = 0; i < s_eff; ++i) t[i] = i;
    Matrix cols(a.rows(), s_eff);
    double delta = 0.0;
    do {
        for (int i = 0; i < s_eff; ++i) cols.col(i) = a.col(t[i]);
        const Matrix gram = cols.transpose() * cols;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
        delta = std::max(delta, eig.eigenvalues().maxCoeff() - 1.0);
        delta = std::max(delta, 1.0 - eig.eigenvalues().minCoeff());
    } while (next_subset(t, n));
    return delta;
}

namespace {

using Mask = std::uint32_t;

struct WindowView {
    std::vector<Mask> frame_masks;        // per frame, over the window union
    std::vector<Mask> distinct;           // in order of appearance
    std::vector<long> distinct_count;     // frames carrying each distinct mask
    int universe = 0;                     // |union|
};

WindowView view_window(const synth::SupportSequence& seq, long t_from,
                       long t_to) {
    std::set<int> universe_set;
    for (long t = t_from; t <= t_to; ++t) {
        for (int i : seq.at(t)) universe_set.insert(i);
    }
    std::map<int, int> pos;
    int next = 0;
    for (int i : universe_set) pos[i] = next++;

    WindowView w;
    w.universe = next;
    std::map<Mask, size_t> seen;
    for (long t = t_from; t <= t_to; ++t) {
        Mask m = 0;
        for (int i : seq.at(t)) m |= Mask{1} << pos[i];
        w.frame_masks.push_back(m);
        auto it = seen.find(m);
        if (it == seen.end()) {
            seen[m] = w.distinct.size();
            w.distinct.push_back(m);
            w.distinct_count.push_back(1);
        } else {
            w.distinct_count[it->second] += 1;
        }
    }
    return w;
}

long count_contained(const WindowView& w, Mask box) {
    long c = 0;
    for (size_t i = 0; i < w.distinct.size(); ++i) {
        if ((w.distinct[i] & ~box) == 0) c += w.distinct_count[i];
    }
    return c;
}

using IndexSet = std::vector<int>;  // sorted

bool is_subset(const IndexSet& a, const IndexSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
    return out;
}

IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(out));
    return out;
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                   std::back_inserter(out));
    return out;
}

// Constructive partition from the runs of distinct supports:
// T_(i) = T^[i] \ T^[i+1], with the final run split into its overlap with
// the previous run and its fresh indices (so the trailing pair does not
// cover two runs at once).  Valid when the resulting sets are mutually
// disjoint and every frame fits in an adjacent pair; pairs that no frame
// straddles are separated by an empty set, which keeps the family
// feasible and tightens h for disjoint-support sequences.
long constructive_h_window(const synth::SupportSequence& seq, long t_from,
                           long t_to) {
    std::vector<IndexSet> runs;
    std::vector<IndexSet> frames;
    for (long t = t_from; t <= t_to; ++t) {
        frames.push_back(seq.at(t));
        if (runs.empty() || runs.back() != frames.back()) {
            runs.push_back(frames.back());
        }
    }
    const size_t m_count = runs.size();
    for (size_t i = 0; i < m_count; ++i) {
        for (size_t j = i + 1; j < m_count; ++j) {
            if (runs[i] == runs[j]) {
                throw ModelError(
                    "constructive h: a support recurs inside the window");
            }
        }
    }

    std::vector<IndexSet> parts;
    for (size_t i = 0; i + 1 < m_count; ++i) {
        parts.push_back(set_difference(runs[i], runs[i + 1]));
    }
    if (m_count >= 2) {
        parts.push_back(set_intersection(runs[m_count - 1], runs[m_count - 2]));
        parts.push_back(set_difference(runs[m_count - 1], runs[m_count - 2]));
    } else {
        parts.push_back(runs.back());
    }

    for (size_t i = 0; i < parts.size(); ++i) {
        for (size_t j = i + 1; j < parts.size(); ++j) {
            if (!set_intersection(parts[i], parts[j]).empty()) {
                throw ModelError(
                    "constructive h: partition sets overlap; supports do not "
                    "follow a contiguous-motion model");
            }
        }
    }

    auto count_in = [&frames](const IndexSet& box) {
        long c = 0;
        for (const auto& f : frames) c += is_subset(f, box);
        return c;
    };

    for (const auto& f : frames) {
        bool covered = false;
        for (size_t i = 0; i < parts.size() && !covered; ++i) {
            const IndexSet box = i + 1 < parts.size()
                                     ? set_union(parts[i], parts[i + 1])
                                     : parts[i];
            covered = is_subset(f, box);
        }
        if (!covered) {
            throw ModelError("constructive h: a frame is not covered by any "
                             "adjacent partition pair");
        }
    }

    long h = 0;
    for (const auto& part : parts) h = std::max(h, count_in(part));
    for (size_t i = 0; i + 1 < parts.size(); ++i) {
        const IndexSet box = set_union(parts[i], parts[i + 1]);
        bool straddled = false;
        for (const auto& f : frames) {
            if (is_subset(f, box) && !is_subset(f, parts[i]) &&
                !is_subset(f, parts[i + 1])) {
                straddled = true;
                break;
            }
        }
        if (straddled) h = std::max(h, count_in(box));
    }
    return h;
}

// Exact minimum over all feasible families, by enumerating set partitions
// of the window union (restricted growth strings).  A partition is
// feasible when every support touches at most two blocks and the forced
// block adjacencies form vertex-disjoint paths.
long brute_h_window(const synth::SupportSequence& seq, long t_from,
                    long t_to) {
    WindowView w = view_window(seq, t_from, t_to);
    const int u = w.universe;
    const long beta = t_to - t_from + 1;
    if (u == 0) return beta;

    std::vector<int> rgs(u, 0);  // restricted growth string
    std::vector<int> max_prefix(u, 0);
    long best = beta;  // trivial single-block family

    auto evaluate = [&]() {
        int blocks = 1 + *std::max_element(rgs.begin(), rgs.end());
        std::vector<Mask> block_mask(blocks, 0);
        for (int e = 0; e < u; ++e) block_mask[rgs[e]] |= Mask{1} << e;

        std::vector<std::pair<int, int>> edges;
        for (size_t i = 0; i < w.distinct.size(); ++i) {
            const Mask support = w.distinct[i];
            int touched[3];
            int nt = 0;
            for (int b = 0; b < blocks && nt <= 2; ++b) {
                if (support & block_mask[b]) {
                    if (nt < 3) touched[nt] = b;
                    ++nt;
                }
            }
            if (nt > 2) return;  // infeasible partition
            if (nt == 2) {
                auto e = std::minmax(touched[0], touched[1]);
                edges.emplace_back(e.first, e.second);
            }
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

        std::vector<int> degree(blocks, 0), parent(blocks);
        for (int b = 0; b < blocks; ++b) parent[b] = b;
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (auto [a, b] : edges) {
            if (++degree[a] > 2 || ++degree[b] > 2) return;
            const int ra = find(a), rb = find(b);
            if (ra == rb) return;  // cycle
            parent[ra] = rb;
        }

        long h = 0;
        for (int b = 0; b < blocks; ++b) {
            h = std::max(h, count_contained(w, block_mask[b]));
            if (h >= best) return;
        }
        for (auto [a, b] : edges) {
            h = std::max(h, count_contained(w, block_mask[a] | block_mask[b]));
            if (h >= best) return;
        }
        best = std::min(best, h);
    };

    // Enumerate all restricted growth strings over u elements.
    while (true) {
        evaluate();
        int i = u - 1;
        while (i > 0 && rgs[i] == max_prefix[i] + 1) --i;
        if (i == 0) break;
        ++rgs[i];
        for (int j = i + 1; j < u; ++j) {
            max_prefix[j] = std::max(max_prefix[j - 1], rgs[j - 1]);
            rgs[j] = 0;
        }
    }
    return best;
}

}  // namespace

long h_star(const synth::SupportSequence& supports, long beta, HMode mode) {
    if (beta < 1) throw ConfigError("beta must be >= 1");
    const long t_max = supports.t_max();
    if (t_max < 1) throw ConfigError("empty support sequence");
    if (mode == HMode::brute && (supports.n > 12 || beta > 12)) {
        throw BudgetError("brute h* is gated to n <= 12 and beta <= 12");
    }

    long h = 0;
    for (long t_from = 1; t_from <= t_max; t_from += beta) {
        const long t_to = std::min(t_from + beta - 1, t_max);
        h = std::max(h, mode == HMode::brute
                            ? brute_h_window(supports, t_from, t_to)
                            : constructive_h_window(supports, t_from, t_to));
    }
    return h;
}

namespace {

constexpr double kHPlus = 1.0 / 200.0;
constexpr double kKappaSPlus = 0.0215;
constexpr double kPhiPlus = 1.2;

int theorem_K(int c, double zeta) {
    return static_cast<int>(
        std::ceil(std::log(0.17 * c * zeta) / std::log(0.72)));
}

}  // namespace

ZetaPlusSequence zeta_plus_sequence(int r0, int c, int J, double zeta,
                                    double f, double g) {
    if (r0 < 0 || c < 1 || J < 1) {
        throw ConfigError("zeta_plus_sequence requires r0 >= 0, c >= 1, J >= 1");
    }
    const double r = r0 + static_cast<double>(J) * c;
    if (!(zeta > 0.0) || zeta > 1e-4 / (r * r) ||
        zeta > 1.5e-4 / (r * r * f)) {
        throw ConfigError("zeta violates the theorem bound for this (r, f)");
    }

    ZetaPlusSequence out;
    out.zeta = zeta;
    out.K = theorem_K(c, zeta);
    const double cz = c * zeta;
    const double hp = kHPlus, kp = kKappaSPlus, pp = kPhiPlus;

    for (int j = 1; j <= J; ++j) {
        const double zs = (r0 + (j - 1.0) * c) * zeta;
        out.zeta_star_plus.push_back(zs);
        std::vector<double> zk(out.K + 1);
        zk[0] = 1.0;

        {
            const double bracket = 8.0 * hp * kp * kp * pp * pp + 2.0 * kp * pp;
            const double d1 = 1.0 - zs * zs * (1.0 + f) - cz / 8.0 -
                              zs * zs * f * (bracket + 2.0) -
                              g * (8.0 * hp * kp * kp + 2.0 * kp * pp) -
                              5.0 * cz / 24.0;
            if (!(d1 > 0.0)) {
                throw NumericalError("zeta recursion denominator D_{j,1} <= 0",
                                     d1);
            }
            zk[1] = g * bracket / d1 +
                    cz * ((zs * zs / cz) * f * (bracket + 2.0) + 5.0 / 24.0) / d1;
        }
        for (int k = 2; k <= out.K; ++k) {
            const double zp = zk[k - 1];
            const double lead = 8.0 * hp * pp * pp * zp + 2.0 * std::sqrt(8.0 * hp) * pp;
            const double bracket =
                8.0 * hp * pp * pp + 2.0 * std::sqrt(8.0 * hp) * pp + 2.0;
            const double dk = 1.0 - zs * zs * (1.0 + f) - cz / 8.0 -
                              zs * zs * f * bracket - zp * g * lead -
                              5.0 * cz / 24.0;
            if (!(dk > 0.0)) {
                throw NumericalError("zeta recursion denominator D_{j,k} <= 0",
                                     dk);
            }
            zk[k] = zp * g * lead / dk +
                    cz * ((zs * zs / cz) * f * bracket + 5.0 / 24.0) / dk;
        }
        out.zeta_k_plus.push_back(std::move(zk));
    }
    return out;
}

TheoremParams theorem_params(int r0, int c, int J, double f, double g,
                             double gamma, double gamma_new, double x_min,
                             double lambda_minus, Index n) {
    if (r0 < 0 || c < 0 || J < 0) throw ConfigError("negative model stats");
    if (!(gamma > 0.0) || gamma_new < 0.0 || !(x_min > 0.0) ||
        !(lambda_minus > 0.0) || n < 1) {
        throw ConfigError("model stats must be positive");
    }
    const double r = r0 + static_cast<double>(J) * c;
    if (!(r >= 1.0)) throw ConfigError("total rank must be at least 1");

    TheoremParams out;
    out.zeta = std::min({1e-4 / (r * r), 1.5e-4 / (r * r * f),
                         1.0 / (r * r * r * gamma * gamma)});
    const int c_eff = std::max(c, 1);
    out.K = theorem_K(c_eff, out.zeta);
    out.xi = std::sqrt(static_cast<double>(c_eff)) * gamma_new +
             std::sqrt(out.zeta) * (std::sqrt(r) + std::sqrt(static_cast<double>(c_eff)));
    out.omega_lo = 7.0 * out.xi;
    out.omega_hi = x_min - 7.0 * out.xi;
    if (out.omega_lo > out.omega_hi) {
        throw ConfigError("omega interval is empty: x_min < 14 xi");
    }
    out.omega = 0.5 * (out.omega_lo + out.omega_hi);  // = x_min / 2
    out.c_add = 4800.0 / (out.zeta * lambda_minus * out.zeta * lambda_minus) *
                std::max(16.0, std::pow(1.2 * out.xi, 4.0));
    out.alpha_min =
        J > 0 ? out.c_add * (std::log(6.0 * out.K * J) +
                             11.0 * std::log(static_cast<double>(n)))
              : 0.0;
    out.g_ok = g <= std::sqrt(2.0) + 1e-12;
    return out;
}

BlockBoundCheck check_block_bound(const synth::SupportSequence& supports,
                                  const std::vector<Matrix>& a_t,
                                  double sigma_plus, long beta, int d,
                                  HMode h_mode) {
    if (d < 1) throw ConfigError("band parameter d must be >= 1");
    const long frames = supports.t_max();
    if (static_cast<long>(a_t.size()) != frames) {
        throw DimensionError("one A_t per support frame required");
    }
    if (frames > beta) {
        throw ConfigError("window longer than beta");
    }

    const Index n = supports.n;
    Matrix m = Matrix::Zero(n, n);
    for (long t = 1; t <= frames; ++t) {
        const auto& support = supports.at(t);
        const Matrix& a = a_t[t - 1];
        const auto k = static_cast<Index>(support.size());
        if (a.rows() != k || a.cols() != k) {
            throw DimensionError("A_t shape must match |T_t|");
        }
        if (k == 0) continue;
        if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
            throw NumericalError("A_t is not symmetric", 0.0);
        }
        Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
        const double lmin = eig.eigenvalues().minCoeff();
        const double lmax = eig.eigenvalues().maxCoeff();
        if (lmin < -1e-10) {
            throw NumericalError("A_t is not PSD within 1e-10", lmin);
        }
        if (lmax > sigma_plus * (1.0 + 1e-9)) {
            throw NumericalError("||A_t||_2 exceeds sigma_plus", lmax);
        }
        for (Index a_i = 0; a_i < k; ++a_i) {
            for (Index a_j = 0; a_j < k; ++a_j) {
                m(support[a_i], support[a_j]) += a(a_i, a_j);
            }
        }
    }

    BlockBoundCheck out;
    out.h = h_star(supports, beta, h_mode);
    out.lhs = lambda_max_sym(m);  // M is PSD, so lambda_max = spectral norm
    out.rhs = 2.0 * d * d * sigma_plus * static_cast<double>(out.h);
    out.holds = out.lhs <= out.rhs * (1.0 + 1e-9) + 1e-12;
    return out;
}

SinThetaCheck check_sin_theta(const Matrix& a_top, const Matrix& a_perp,
                              const Matrix& h, const Basis& e_new) {
    const Index n = e_new.dim();
    const Index c = e_new.rank();
    if (a_top.rows() != c || a_top.cols() != c) {
        throw DimensionError("A block must be c x c");
    }
    if (a_perp.rows() != n - c || a_perp.cols() != n - c) {
        throw DimensionError("A_perp block must be (n-c) x (n-c)");
    }
    if (h.rows() != n || h.cols() != n) {
        throw DimensionError("H must be n x n");
    }

    const Matrix e_perp = orthonormal_complement(e_new.mat());
    const Matrix assembled = e_new.mat() * a_top * e_new.mat().transpose() +
                             e_perp * a_perp * e_perp.transpose() + h;

    Eigen::SelfAdjointEigenSolver<Matrix> eig(assembled);
    Matrix q(n, c);
    for (Index i = 0; i < c; ++i) q.col(i) = eig.eigenvectors().col(n - 1 - i);

    SinThetaCheck out;
    const double h_norm = spectral_norm(h);
    Eigen::SelfAdjointEigenSolver<Matrix> eig_a(a_top, Eigen::EigenvaluesOnly);
    out.gap = eig_a.eigenvalues().minCoeff() - spectral_norm(a_perp) - h_norm;
    if (!(out.gap > 0.0)) {
        throw NumericalError("sin-theta spectral gap is nonpositive", out.gap);
    }
    out.lhs = subspace_error(q, e_new.mat());
    out.rhs = h_norm / out.gap;
    out.holds = out.lhs <= out.rhs + 1e-12;
    return out;
}

BoundCheck matrix_cs_check(const std::vector<Matrix>& xs,
                           const std::vector<Matrix>& ys) {
    if (xs.empty() || xs.size() != ys.size()) {
        throw DimensionError("matrix_cs_check needs equally many X_t and Y_t");
    }
    const double alpha = static_cast<double>(xs.size());
    Matrix xy = Matrix::Zero(xs[0].rows(), ys[0].rows());
    Matrix xx = Matrix::Zero(xs[0].rows(), xs[0].rows());
    Matrix yy = Matrix::Zero(ys[0].rows(), ys[0].rows());
    for (size_t t = 0; t < xs.size(); ++t) {
        if (xs[t].cols() != ys[t].cols()) {
            throw DimensionError("X_t and Y_t must have conformable columns");
        }
        xy += xs[t] * ys[t].transpose();
        xx += xs[t] * xs[t].transpose();
        yy += ys[t] * ys[t].transpose();
    }
    BoundCheck out;
    const double cross = spectral_norm(xy / alpha);
    out.lhs = cross * cross;
    out.rhs = lambda_max_sym(xx / alpha) * lambda_max_sym(yy / alpha);
    out.holds = out.lhs <= out.rhs * (1.0 + 1e-12) + 1e-15;
    return out;
}

}  // namespace reprocs::analysis
