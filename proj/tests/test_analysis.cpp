#include <doctest.h>

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "reprocs/analysis.hpp"
#include "reprocs/synth.hpp"

using namespace reprocs;
using namespace reprocs::analysis;

namespace {

// Independent kappa reference: triple loop over all size-3 subsets with
// singular values from JacobiSVD.
double kappa3_reference(const Matrix& p) {
    const Index n = p.rows();
    double best = 0.0;
    for (Index a = 0; a < n; ++a) {
        for (Index b = a + 1; b < n; ++b) {
            for (Index c = b + 1; c < n; ++c) {
                Matrix rows(3, p.cols());
                rows.row(0) = p.row(a);
                rows.row(1) = p.row(b);
                rows.row(2) = p.row(c);
                Eigen::JacobiSVD<Matrix> svd(rows);
                best = std::max(best, svd.singularValues()[0]);
            }
        }
    }
    return best;
}

synth::SupportSequence sequence_of(Index n, int s,
                                   std::vector<std::vector<int>> supports) {
    synth::SupportSequence seq;
    seq.n = n;
    seq.s = s;
    seq.supports = std::move(supports);
    seq.model_tag = "manual";
    return seq;
}

}  // namespace

TEST_CASE("kappa of a standard basis column is 1 with certificate") {
    Matrix p = Matrix::Zero(6, 1);
    p(0, 0) = 1.0;
    const auto k = kappa_s(Basis(p, 1e-10), 1);
    CHECK(k.value == doctest::Approx(1.0));
    REQUIRE(k.attaining.size() == 1);
    CHECK(k.attaining[0] == 0);
}

TEST_CASE("kappa of the flat ones column is 1/sqrt(n)") {
    const Index n = 9;
    Matrix p = Matrix::Constant(n, 1, 1.0 / 3.0);
    const auto k = kappa_s(Basis(p, 1e-10), 1);
    CHECK(k.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("exact kappa matches an independent subset scan") {
    Rng rng(5);
    const Basis p = gen_basis(12, 2, rng);
    const auto k = kappa_s(p, 3);
    CHECK(k.value == doctest::Approx(kappa3_reference(p.mat())).epsilon(1e-12));
}

TEST_CASE("kappa monotonicity, saturation, and the sqrt(s) bound") {
    Rng rng(6);
    for (int trial = 0; trial < 10; ++trial) {
        Rng r = rng.split(trial);
        const Index n = 8 + static_cast<Index>(r.uniform_int(0, 4));
        const Basis p = gen_basis(n, 1 + r.uniform_int(0, 3), r);
        double prev = 0.0;
        for (int s = 1; s <= 4; ++s) {
            const double value = kappa_s(p, s).value;
            CHECK(value >= prev - 1e-12);
            CHECK(value <= kappa_s(p, s, KappaMode::bound).value + 1e-12);
            prev = value;
        }
        CHECK(kappa_s(p, static_cast<int>(n)).value ==
              doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("kappa budget gate") {
    Rng rng(7);
    const Basis p = gen_basis(40, 2, rng);
    CHECK_THROWS_AS(kappa_s(p, 10), BudgetError);
    CHECK_NOTHROW(kappa_s(p, 10, KappaMode::bound));
}

TEST_CASE("delta_s of the identity is 0 and of the zero map is 1") {
    CHECK(ric_delta_s(Matrix::Identity(8, 8), 3) == doctest::Approx(0.0));
    CHECK(ric_delta_s(Matrix::Zero(8, 8), 2) == doctest::Approx(1.0));
}

TEST_CASE("lemma-1 identity on sample instances") {
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        Rng r = rng.split(trial);
        const Index n = 6 + static_cast<Index>(r.uniform_int(0, 8));
        const Index rank =
            1 + static_cast<Index>(r.uniform_int(0, std::min<Index>(3, n - 1)));
        const int s = 1 + static_cast<int>(r.uniform_int(0, 2));
        const Basis p = gen_basis(n, rank, r);
        const Matrix a =
            Matrix::Identity(n, n) - p.mat() * p.mat().transpose();
        const double kappa = kappa_s(p, s).value;
        CHECK(std::abs(ric_delta_s(a, s) - kappa * kappa) <= 1e-8);
    }
}

TEST_CASE("h: constant support gives beta in both modes") {
    const auto seq = sequence_of(
        8, 2, std::vector<std::vector<int>>(6, std::vector<int>{2, 3}));
    CHECK(h_star(seq, 6, HMode::constructive) == 6);
    CHECK(h_star(seq, 6, HMode::brute) == 6);
}

TEST_CASE("h: example-1 motion gives move_every; brute agrees at small n") {
    const auto seq = synth::gen_support_example1(12, 4, 2, 2, 8, 0);
    CHECK(h_star(seq, 8, HMode::constructive) == 2);
    CHECK(h_star(seq, 8, HMode::brute) == 2);

    // Paper motion at a window short enough to avoid wrap revisits:
    // 22 runs of 18 frames travel 210 + 20 indices <= 256.
    const auto paper = synth::gen_support_example1(256, 20, 10, 18, 792, 0);
    CHECK(h_star(paper, 396, HMode::constructive) == 18);

    // At the paper's own alpha = 800 the support wraps around inside one
    // window and revisits indices, so the construction must refuse.
    const auto full = synth::gen_support_example1(256, 20, 10, 18, 800, 0);
    CHECK_THROWS_AS(h_star(full, 800, HMode::constructive), ModelError);
}

TEST_CASE("h: disjoint one-frame supports give h* = 1") {
    const auto seq = sequence_of(8, 2, {{0, 1}, {2, 3}, {4, 5}, {6, 7}});
    CHECK(h_star(seq, 4, HMode::brute) == 1);
    CHECK(h_star(seq, 4, HMode::constructive) == 1);
}

TEST_CASE("h ordering: brute <= constructive <= beta on random hops") {
    Rng rng(9);
    int compared = 0;
    for (int trial = 0; trial < 30; ++trial) {
        Rng r = rng.split(trial);
        const Index n = 10;
        const int s = 2 + static_cast<int>(r.uniform_int(0, 1));
        const long beta = 6;
        std::vector<std::vector<int>> supports;
        long start = 0;
        for (long t = 0; t < beta; ++t) {
            if (t > 0 && r.bernoulli(0.6)) {
                start += s;  // disjoint hop keeps the partition valid
            }
            std::vector<int> block;
            for (int i = 0; i < s; ++i) {
                block.push_back(static_cast<int>((start + i) % n));
            }
            std::sort(block.begin(), block.end());
            supports.push_back(std::move(block));
        }
        const auto seq = sequence_of(n, s, std::move(supports));
        long constructive = 0;
        try {
            constructive = h_star(seq, beta, HMode::constructive);
        } catch (const ModelError&) {
            continue;  // revisit after wrap; constructive not applicable
        }
        const long brute = h_star(seq, beta, HMode::brute);
        CHECK(brute <= constructive);
        CHECK(constructive <= beta);
        ++compared;
    }
    CHECK(compared > 10);
}

TEST_CASE("h: constructive mode rejects scattered supports") {
    const auto uniform = synth::gen_support_uniform(32, 4, 12, 3);
    CHECK_THROWS_AS(h_star(uniform, 12, HMode::constructive), ModelError);
}

TEST_CASE("h: brute mode is gated") {
    const auto seq = synth::gen_support_example1(64, 8, 4, 2, 12, 0);
    CHECK_THROWS_AS(h_star(seq, 12, HMode::brute), BudgetError);
    const auto small = synth::gen_support_example1(12, 4, 2, 2, 24, 0);
    CHECK_THROWS_AS(h_star(small, 24, HMode::brute), BudgetError);
}

TEST_CASE("zeta recursion: base value, early bounds, decay") {
    const auto seq = zeta_plus_sequence(10, 2, 2, 5e-7, 1.0, 1.0);
    REQUIRE(seq.zeta_k_plus.size() == 2);
    for (int j = 0; j < 2; ++j) {
        const auto& zk = seq.zeta_k_plus[j];
        CHECK(zk[0] == 1.0);
        CHECK(zk[1] < 0.1);
        CHECK(zk[2] <= 0.06);
        const double cz = 2 * 5e-7;
        for (int k = 1; k <= seq.K; ++k) {
            CHECK(zk[k] <= std::pow(0.72, k) + 0.83 * cz + 1e-12);
            CHECK(zk[k] <= zk[k - 1] + 1e-15);
        }
    }
    // Fact-2 closure.
    CHECK(seq.zeta_star_plus[1] ==
          doctest::Approx(seq.zeta_star_plus[0] + 2 * 5e-7).epsilon(1e-14));
}

TEST_CASE("zeta recursion: K matches the ceil formula") {
    const auto seq = zeta_plus_sequence(0, 1, 1, 1e-4, 1.0, 1.0);
    CHECK(seq.K == 34);  // ceil(log(0.17e-4)/log(0.72))
}

TEST_CASE("zeta recursion: violated bound and broken regime raise") {
    CHECK_THROWS_AS(zeta_plus_sequence(10, 2, 2, 1e-3, 1.0, 1.0), ConfigError);
    // An absurd condition-number bound g pushes D_{j,1} negative.
    CHECK_THROWS_AS(zeta_plus_sequence(10, 2, 2, 5e-7, 1.0, 25.0),
                    NumericalError);
}

TEST_CASE("theorem parameters at the paper scale") {
    const auto tp = theorem_params(10, 2, 2, 1.0, 1.0, 5.0, 0.04, 2.0,
                                   25.0 / 3.0, 256);
    const double r = 14.0;
    const double zeta_expected = std::min(
        {1e-4 / (r * r), 1.5e-4 / (r * r), 1.0 / (r * r * r * 25.0)});
    CHECK(tp.zeta == doctest::Approx(zeta_expected).epsilon(1e-15));
    CHECK(tp.xi ==
          doctest::Approx(std::sqrt(2.0) * 0.04 +
                          std::sqrt(tp.zeta) *
                              (std::sqrt(14.0) + std::sqrt(2.0)))
              .epsilon(1e-15));
    CHECK(tp.omega_lo == doctest::Approx(7 * tp.xi));
    CHECK(tp.omega == doctest::Approx(1.0));  // x_min / 2
    CHECK(tp.K ==
          static_cast<int>(
              std::ceil(std::log(0.17 * 2 * tp.zeta) / std::log(0.72))));
    const double c_add = 4800.0 / std::pow(tp.zeta * 25.0 / 3.0, 2.0) *
                         std::max(16.0, std::pow(1.2 * tp.xi, 4.0));
    CHECK(tp.c_add == doctest::Approx(c_add).epsilon(1e-12));
    CHECK(tp.alpha_min ==
          doctest::Approx(c_add * (std::log(6.0 * tp.K * 2) +
                                   11.0 * std::log(256.0))));
    CHECK(tp.g_ok);
}

TEST_CASE("theorem parameters: gamma_new = 0 gives xi = 2 sqrt(zeta)") {
    const auto tp = theorem_params(0, 1, 1, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 16);
    CHECK(tp.xi == doctest::Approx(2.0 * std::sqrt(tp.zeta)).epsilon(1e-15));
}

TEST_CASE("theorem parameters: infeasible omega interval raises") {
    CHECK_THROWS_AS(
        theorem_params(10, 2, 2, 1.0, 1.0, 5.0, 1.0, 2.0, 25.0 / 3.0, 256),
        ConfigError);
}

TEST_CASE("block bound: zero summands") {
    const auto seq = sequence_of(6, 2, {{0, 1}, {2, 3}, {2, 3}});
    std::vector<Matrix> a_t(3, Matrix::Zero(2, 2));
    const auto check = check_block_bound(seq, a_t, 1.0, 3);
    CHECK(check.lhs == 0.0);
    CHECK(check.holds);
}

TEST_CASE("block bound: disjoint supports with A = sigma I hit sigma h") {
    // Six disjoint blocks, one frame each: h* = 1.
    std::vector<std::vector<int>> supports;
    for (int b = 0; b < 6; ++b) supports.push_back({2 * b, 2 * b + 1});
    const auto seq = sequence_of(12, 2, std::move(supports));
    const double sigma_plus = 1.7;
    std::vector<Matrix> a_t(6, sigma_plus * Matrix::Identity(2, 2));
    const auto check = check_block_bound(seq, a_t, sigma_plus, 6, /*d=*/1);
    CHECK(check.h == 1);
    CHECK(check.lhs == doctest::Approx(sigma_plus).epsilon(1e-12));
    CHECK(check.rhs == doctest::Approx(2 * sigma_plus).epsilon(1e-12));
    CHECK(check.holds);
}

TEST_CASE("block bound: input validation") {
    const auto seq = sequence_of(6, 2, {{0, 1}});
    Matrix bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1: not PSD
    CHECK_THROWS_AS(check_block_bound(seq, {bad}, 3.0, 1), NumericalError);

    Matrix oversized = 2.0 * Matrix::Identity(2, 2);
    CHECK_THROWS_AS(check_block_bound(seq, {oversized}, 1.0, 1),
                    NumericalError);

    CHECK_THROWS_AS(check_block_bound(seq, {Matrix::Identity(3, 3)}, 1.0, 1),
                    DimensionError);
}

TEST_CASE("block bound: example-1 Monte Carlo sample") {
    Rng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        Rng r = rng.split(trial);
        const auto seq = synth::gen_support_example1(64, 8, 5, 4, 40, 0);
        std::vector<Matrix> a_t;
        const double sigma_plus = 1.0;
        for (long t = 0; t < 40; ++t) {
            Matrix g(8, 8);
            for (Index i = 0; i < 8; ++i) {
                for (Index j = 0; j < 8; ++j) g(i, j) = r.normal();
            }
            Matrix a = g * g.transpose();
            a *= r.uniform(0.1, 1.0) / spectral_norm(a);
            a_t.push_back(std::move(a));
        }
        const auto check = check_block_bound(seq, a_t, sigma_plus, 40);
        CHECK(check.holds);
    }
}

TEST_CASE("sin-theta: zero perturbation gives exact eigenvectors") {
    Rng rng(13);
    const Basis e_new = gen_basis(8, 2, rng);
    const Matrix a_top = 2.0 * Matrix::Identity(2, 2);
    const Matrix a_perp = 0.5 * Matrix::Identity(6, 6);
    const auto check =
        check_sin_theta(a_top, a_perp, Matrix::Zero(8, 8), e_new);
    CHECK(check.lhs <= 1e-10);
    CHECK(check.holds);
}

TEST_CASE("sin-theta: 2x2 closed form") {
    // M = [[a, h], [h, d]]; the top eigenvector's angle theta against e1
    // satisfies tan(2 theta) = 2h / (a - d).
    const double a = 3.0, d = 1.0, h = 0.2;
    Matrix e1(2, 1);
    e1 << 1.0, 0.0;
    Matrix a_top(1, 1), a_perp(1, 1), h_mat(2, 2);
    a_top << a;
    a_perp << d;
    h_mat << 0.0, h, h, 0.0;
    const auto check = check_sin_theta(a_top, a_perp, h_mat, Basis(e1, 1e-10));
    const double theta = 0.5 * std::atan2(2.0 * h, a - d);
    CHECK(check.lhs ==
          doctest::Approx(std::abs(std::sin(theta))).epsilon(1e-10));
    CHECK(check.gap == doctest::Approx(a - d - h).epsilon(1e-12));
    CHECK(check.holds);
}

TEST_CASE("sin-theta: nonpositive gap raises") {
    Rng rng(14);
    const Basis e_new = gen_basis(6, 1, rng);
    const Matrix a_top = Matrix::Identity(1, 1);
    const Matrix a_perp = 0.9 * Matrix::Identity(5, 5);
    Matrix h = 0.5 * Matrix::Identity(6, 6);
    CHECK_THROWS_AS(check_sin_theta(a_top, a_perp, h, e_new), NumericalError);
}

TEST_CASE("matrix Cauchy-Schwarz: equality for a single rank-1 term") {
    Rng rng(15);
    Matrix x(5, 1), y(5, 1);
    for (Index i = 0; i < 5; ++i) {
        x(i, 0) = rng.normal();
        y(i, 0) = rng.normal();
    }
    const auto check = matrix_cs_check({x}, {y});
    CHECK(check.lhs == doctest::Approx(check.rhs).epsilon(1e-10));
    CHECK(check.holds);
}

TEST_CASE("matrix Cauchy-Schwarz: Y = X and random batches hold") {
    Rng rng(16);
    for (int trial = 0; trial < 25; ++trial) {
        Rng r = rng.split(trial);
        std::vector<Matrix> xs, ys;
        const int terms = 1 + static_cast<int>(r.uniform_int(0, 5));
        for (int t = 0; t < terms; ++t) {
            Matrix x(5, 3), y(5, 3);
            for (Index i = 0; i < 5; ++i) {
                for (Index j = 0; j < 3; ++j) {
                    x(i, j) = r.normal();
                    y(i, j) = r.normal();
                }
            }
            xs.push_back(x);
            ys.push_back(t % 2 == 0 ? y : x);
        }
        CHECK(matrix_cs_check(xs, ys).holds);
        CHECK(matrix_cs_check(xs, xs).holds);
    }
}
