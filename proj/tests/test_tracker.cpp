#include <doctest.h>

#include <cmath>

#include "reprocs/metrics.hpp"
#include "reprocs/synth.hpp"
#include "reprocs/tracker.hpp"
#include "scenario64.hpp"

using namespace reprocs;

namespace {

ReprocsParams basic_params() {
    ReprocsParams params;
    params.xi = 0.01;
    params.omega = 1.0;
    params.alpha = 16;
    params.K = 2;
    return params;
}

}  // namespace

TEST_CASE("params validation enforces 7 xi <= omega and spacing") {
    ReprocsParams params = basic_params();
    params.xi = 0.2;  // 7 xi = 1.4 > omega = 1
    CHECK_THROWS_AS(params.validate(), ConfigError);

    params = basic_params();
    params.change_times = {10, 20};  // 10 apart <= K alpha = 32
    params.c_new = {1, 1};
    CHECK_THROWS_AS(params.validate(), ConfigError);
}

TEST_CASE("project: inside, outside, and empty basis") {
    Rng rng(3);
    const Basis p = gen_basis(16, 3, rng);
    Tracker tracker(basic_params(), p);

    const Vector inside = p.mat() * Vector::Ones(3);
    CHECK(tracker.project(inside).norm() <= 1e-10);

    const Matrix comp = orthonormal_complement(p.mat());
    const Vector outside = comp.col(0);
    CHECK((tracker.project(outside) - outside).norm() <= 1e-10);

    Tracker empty(basic_params(), Basis::empty(16));
    Vector any(16);
    for (Index i = 0; i < 16; ++i) any[i] = rng.normal();
    CHECK((empty.project(any) - any).norm() == 0.0);
}

TEST_CASE("estimate_support thresholds strictly") {
    Vector x(3);
    x << 3.0, 0.1, -5.0;
    CHECK(estimate_support(x, 1.0) == std::vector<Index>{0, 2});
    CHECK(estimate_support(Vector::Zero(4), 0.5).empty());

    Vector boundary(2);
    boundary << 1.0, 1.0000001;
    CHECK(estimate_support(boundary, 1.0) == std::vector<Index>{1});
}

TEST_CASE("ls_refine: empty support, identity projector, exact recovery") {
    const Matrix no_basis(3, 0);
    Vector y(3);
    y << 1.0, 7.0, 0.0;

    CHECK(ls_refine(no_basis, y, {}).x.norm() == 0.0);

    const auto identity_case = ls_refine(no_basis, y, {1});
    CHECK(identity_case.x[0] == 0.0);
    CHECK(identity_case.x[1] == doctest::Approx(7.0).epsilon(1e-14));
    CHECK(identity_case.x[2] == 0.0);

    // Noiseless projected observation recovers x exactly on its support.
    Rng rng(5);
    const Basis p = gen_basis(24, 4, rng);
    Vector x = Vector::Zero(24);
    x[3] = 2.0;
    x[11] = -1.5;
    x[17] = 4.0;
    const Vector y_proj = p.project_out(x);
    const auto exact = ls_refine(p.mat(), y_proj, {3, 11, 17});
    CHECK((exact.x - x).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(exact.sigma_min > 0.5);
}

TEST_CASE("ls_refine flags rank deficiency with sigma_min") {
    Matrix p = Matrix::Zero(5, 1);
    p(0, 0) = 1.0;
    Vector y = Vector::Zero(5);
    // Phi e_0 = e_0 - P P' e_0 = 0: singular on support {0}.
    CHECK_THROWS_AS(ls_refine(p, y, {0}), NumericalError);
}

TEST_CASE("proj_pca: degenerate window flags a warning") {
    Rng rng(7);
    const Basis p = gen_basis(12, 2, rng);
    Matrix d(12, 6);
    for (Index c = 0; c < 6; ++c) {
        d.col(c) = p.mat() * Vector::Random(2);
    }
    const auto result = proj_pca(d, p, 1);
    CHECK(result.rank_warning);
    CHECK(result.q.rank() == 1);
    // The filler direction is still orthogonal to P.
    CHECK((p.mat().transpose() * result.q.mat()).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("proj_pca: rank-1 data with empty P recovers the direction") {
    Rng rng(8);
    Vector v(10), w(20);
    for (Index i = 0; i < 10; ++i) v[i] = rng.normal();
    for (Index i = 0; i < 20; ++i) w[i] = rng.normal();
    const Matrix d = v * w.transpose();
    const auto result = proj_pca(d, Basis::empty(10), 1);
    CHECK_FALSE(result.rank_warning);
    const Vector q = result.q.mat().col(0);
    CHECK(std::abs(std::abs(q.dot(v.normalized())) - 1.0) <= 1e-10);
    // Sign convention: first nonzero coordinate positive.
    Index first = 0;
    while (q[first] == 0.0) ++first;
    CHECK(q[first] > 0.0);
}

TEST_CASE("proj_pca: planted new directions within the noise budget") {
    Rng rng(9);
    const Index n = 32;
    const long window = 200;
    const Basis p = gen_basis(n, 3, rng);
    const Matrix comp = orthonormal_complement(p.mat());
    const Matrix p_new = comp.leftCols(2);

    Matrix signal(n, window), noise(n, window);
    for (long t = 0; t < window; ++t) {
        Vector a(2);
        a << rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0);
        signal.col(t) = p_new * a;
        for (Index i = 0; i < n; ++i) noise(i, t) = rng.normal(0.0, 1e-3);
    }
    const Matrix d = signal + noise;
    const auto result = proj_pca(d, p, 2);
    const double ratio = spectral_norm(noise) / spectral_norm(signal);
    CHECK(subspace_error(result.q.mat(), p_new) <= 10.0 * ratio);
}

TEST_CASE("noiseless oracle: exact support and x recovery every frame") {
    Rng rng(11);
    const Index n = 64;
    const Basis p = gen_basis(n, 4, rng);
    const auto supports = synth::gen_support_uniform(n, 3, 50, 13);

    ReprocsParams params = basic_params();
    Tracker tracker(params, p);

    Rng coeff(17);
    for (long t = 1; t <= 50; ++t) {
        Vector x = Vector::Zero(n);
        for (int i : supports.at(t)) {
            x[i] = coeff.bernoulli(0.5) ? coeff.uniform(2.0, 6.0)
                                        : -coeff.uniform(2.0, 6.0);
        }
        Vector a(4);
        for (Index i = 0; i < 4; ++i) a[i] = coeff.uniform(-5.0, 5.0);
        const Vector l = p.mat() * a;
        const auto out = tracker.step(x + l, t);
        for (Index i = 0; i < n; ++i) {
            CHECK((out.x_hat[i] != 0.0) == (x[i] != 0.0));
        }
        CHECK((out.x_hat - x).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK((out.x_hat + out.l_hat - (x + l)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("error formula: e_t = I_T (Phi_T' Phi_T)^{-1} I_T' Phi l_t") {
    Rng rng(21);
    const Index n = 48;
    const Basis p_true = gen_basis(n, 3, rng);
    Rng noise_rng(22);
    const auto perturbed =
        synth::perturb_initial_estimate(p_true, 1e-4, noise_rng);
    const Basis& p_hat = perturbed.basis;

    ReprocsParams params = basic_params();
    Tracker tracker(params, p_hat);

    const auto supports = synth::gen_support_uniform(n, 3, 20, 23);
    Rng coeff(24);
    for (long t = 1; t <= 20; ++t) {
        Vector x = Vector::Zero(n);
        for (int i : supports.at(t)) x[i] = coeff.uniform(2.0, 6.0);
        Vector a(3);
        for (Index i = 0; i < 3; ++i) a[i] = coeff.uniform(-5.0, 5.0);
        const Vector l = p_true.mat() * a;
        const auto out = tracker.step(x + l, t);

        bool exact = true;
        for (Index i = 0; i < n && exact; ++i) {
            exact = (out.x_hat[i] != 0.0) == (x[i] != 0.0);
        }
        REQUIRE(exact);

        const auto& support = supports.at(t);
        const auto k = static_cast<Index>(support.size());
        Matrix phi_t(n, k);
        for (Index c = 0; c < k; ++c) {
            Vector e = Vector::Zero(n);
            e[support[c]] = 1.0;
            phi_t.col(c) =
                e - p_hat.mat() * p_hat.mat().row(support[c]).transpose();
        }
        const Matrix gram = phi_t.transpose() * phi_t;
        const Vector rhs = phi_t.transpose() * p_hat.project_out(l);
        const Vector e_support = gram.ldlt().solve(rhs);
        Vector e_expected = Vector::Zero(n);
        for (Index c = 0; c < k; ++c) e_expected[support[c]] = e_support[c];
        CHECK((out.x_hat - x - e_expected).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("P_hat is untouched away from PCA boundaries") {
    auto sc = scenario64::exact_support_scenario(4, 2, 1);
    const synth::StreamSynthesizer stream(sc.model, sc.supports, sc.x_lo,
                                          sc.x_hi, 31);
    const Basis p0(Matrix(sc.model.segment_basis(0)), 0.0);
    Tracker tracker(sc.params, p0);

    const long t1 = sc.params.change_times[0];
    Matrix before = tracker.p_hat();
    for (long t = 1; t <= t1 + 10; ++t) {
        const auto out = tracker.step(stream.at(t).m, t);
        const bool boundary = out.diag.pca_k > 0;
        if (!boundary) {
            CHECK(tracker.p_hat().cols() == before.cols());
            CHECK((tracker.p_hat() - before).cwiseAbs().maxCoeff() == 0.0);
        }
        before = tracker.p_hat();
    }
}

TEST_CASE("state basis stays orthonormal through PCA updates") {
    auto sc = scenario64::exact_support_scenario(4, 3, 1);
    const synth::StreamSynthesizer stream(sc.model, sc.supports, sc.x_lo,
                                          sc.x_hi, 33);
    const Basis p0(Matrix(sc.model.segment_basis(0)), 0.0);
    Tracker tracker(sc.params, p0);

    int pca_steps = 0;
    for (long t = 1; t <= stream.t_max(); ++t) {
        const auto out = tracker.step(stream.at(t).m, t);
        if (out.diag.pca_k > 0) {
            ++pca_steps;
            const Matrix p = tracker.p_hat();
            Matrix g = p.transpose() * p;
            g.diagonal().array() -= 1.0;
            CHECK(g.cwiseAbs().maxCoeff() <= 1e-8);
            if (!tracker.p_new().is_empty()) {
                CHECK((tracker.p_star().mat().transpose() *
                       tracker.p_new().mat())
                          .cwiseAbs()
                          .maxCoeff() <= 1e-8);
            }
        }
        if (out.diag.committed) {
            CHECK(tracker.p_star().rank() == 2);
        }
    }
    CHECK(pca_steps == 3);
}

TEST_CASE("subspace error shrinks across the PCA ladder") {
    // Strong new-direction signal so each projection-PCA step visibly
    // improves the estimate.
    auto sc = scenario64::exact_support_scenario(4, 3, 1);
    sc.model.gamma_new = 0.5;
    sc.params.xi = 0.51 + 0.012;
    sc.params.omega = 7.5;
    sc.x_lo = 15.0;
    sc.x_hi = 20.0;

    const synth::StreamSynthesizer stream(sc.model, sc.supports, sc.x_lo,
                                          sc.x_hi, 35);
    const Basis p0(Matrix(sc.model.segment_basis(0)), 0.0);
    const auto run = run_stream(stream, sc.params, p0);
    const auto log = analysis::compute_metrics(run, stream);

    const long t1 = sc.params.change_times[0];
    std::vector<double> window_se;
    for (int k = 1; k <= sc.params.K; ++k) {
        window_se.push_back(log.rows[t1 + k * sc.params.alpha - 1].se);
    }
    CHECK(window_se[1] < window_se[0]);
    CHECK(window_se[2] < window_se[1]);
    CHECK(log.support_exact_fraction(1, stream.t_max()) == 1.0);
}

TEST_CASE("run_stream: empty stream and determinism") {
    const auto empty = run_stream(
        0, [](long) { return Vector(); }, basic_params(), Basis::empty(8));
    CHECK(empty.diags.empty());
    CHECK(empty.x_hat.cols() == 0);

    auto sc = scenario64::exact_support_scenario(4, 2, 0);
    const synth::StreamSynthesizer stream(sc.model, sc.supports, sc.x_lo,
                                          sc.x_hi, 37);
    const Basis p0(Matrix(sc.model.segment_basis(0)), 0.0);
    const auto run1 = run_stream(stream, sc.params, p0);
    const auto run2 = run_stream(stream, sc.params, p0);
    CHECK((run1.x_hat - run2.x_hat).cwiseAbs().maxCoeff() == 0.0);
    CHECK((run1.p_final - run2.p_final).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("run_stream: s = 0 keeps x_hat at zero and SE constant") {
    synth::SubspaceModel model;
    model.n = 64;
    model.t_max = 300;
    Matrix p(64, 1);
    p.col(0) = scenario64::hadamard_column(64, 1);
    model.p_full = Basis(std::move(p), 1e-12);
    model.ranks = {1};
    model.gamma = 5.0;
    model.lambda_minus = model.lambda_plus = 25.0 / 3.0;

    const auto supports = synth::gen_support_uniform(64, 0, 300, 1);
    const synth::StreamSynthesizer stream(model, supports, 2.0, 6.0, 39);

    ReprocsParams params = basic_params();
    const Basis p0(Matrix(model.segment_basis(0)), 0.0);
    const auto run = run_stream(stream, params, p0);
    CHECK(run.x_hat.cwiseAbs().maxCoeff() == 0.0);
    const auto log = analysis::compute_metrics(run, stream);
    for (const auto& row : log.rows) {
        CHECK(row.se == log.rows[0].se);
        CHECK(row.support_exact);
    }
}

TEST_CASE("time must increase strictly") {
    Tracker tracker(basic_params(), Basis::empty(4));
    tracker.step(Vector::Zero(4), 5);
    CHECK_THROWS_AS(tracker.step(Vector::Zero(4), 5), ConfigError);
    CHECK_THROWS_AS(tracker.step(Vector::Zero(4), 4), ConfigError);
    CHECK_NOTHROW(tracker.step(Vector::Zero(4), 6));
}

TEST_CASE("checkpoint state round-trips through pause/resume") {
    auto sc = scenario64::exact_support_scenario(4, 2, 1);
    const synth::StreamSynthesizer stream(sc.model, sc.supports, sc.x_lo,
                                          sc.x_hi, 41);
    const Basis p0(Matrix(sc.model.segment_basis(0)), 0.0);

    Tracker full(sc.params, p0);
    Tracker first_half(sc.params, p0);
    const long t_break = sc.params.change_times[0] + 30;  // mid-window
    Matrix full_x(64, stream.t_max());
    for (long t = 1; t <= stream.t_max(); ++t) {
        full_x.col(t - 1) = full.step(stream.at(t).m, t).x_hat;
        if (t <= t_break) first_half.step(stream.at(t).m, t);
    }

    Tracker resumed(sc.params, first_half.state());
    for (long t = t_break + 1; t <= stream.t_max(); ++t) {
        const auto out = resumed.step(stream.at(t).m, t);
        CHECK((out.x_hat - full_x.col(t - 1)).cwiseAbs().maxCoeff() <= 1e-9);
    }
    CHECK((resumed.p_hat() - full.p_hat()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("support overflow is flagged, not fatal") {
    ReprocsParams params = basic_params();
    params.support_size_hint = 1;
    Tracker tracker(params, Basis::empty(8));
    Vector m(8);
    m << 5, 5, 5, 0, 0, 0, 0, 0;  // three large entries, hint says s = 1
    const auto out = tracker.step(m, 1);
    CHECK(out.diag.support_size == 3);
    CHECK(out.diag.support_overflow);
}
