#include "reprocs/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace reprocs::experiment {

using nlohmann::json;

namespace {

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& context) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("unknown key '" + it.key() + "' in " + context);
        }
    }
}

SupportSpec::Kind support_kind_from(const std::string& name) {
    if (name == "example1") return SupportSpec::Kind::example1;
    if (name == "probabilistic") return SupportSpec::Kind::probabilistic;
    if (name == "everyframe") return SupportSpec::Kind::everyframe;
    if (name == "uniform") return SupportSpec::Kind::uniform;
    throw ConfigError("unknown support kind '" + name + "'");
}

std::string support_kind_name(SupportSpec::Kind kind) {
    switch (kind) {
        case SupportSpec::Kind::example1: return "example1";
        case SupportSpec::Kind::probabilistic: return "probabilistic";
        case SupportSpec::Kind::everyframe: return "everyframe";
        case SupportSpec::Kind::uniform: return "uniform";
    }
    return "?";
}

Rng trial_root(const ExperimentConfig& cfg, int trial) {
    return Rng(cfg.seed).split("trial").split(static_cast<std::uint64_t>(trial));
}

}  // namespace

void ExperimentConfig::finalize() {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    if (params.alpha < 1 || params.K < 1) {
        throw ConfigError("params.alpha and params.K must be set");
    }
    if (model.ramp == 0) {
        model.ramp = static_cast<long>(params.K) * params.alpha;
    }
    params.change_times = model.change_times;
    params.c_new = model.c_new;
    params.support_size_hint = support.s;

    const double lambda_minus =
        model.lambda_minus > 0 ? model.lambda_minus
                               : model.gamma * model.gamma / 3.0;
    if (params.xi <= 0.0 || params.omega <= 0.0) {
        const int c = model.c_new.empty()
                          ? 1
                          : *std::max_element(model.c_new.begin(),
                                              model.c_new.end());
        const auto tp = analysis::theorem_params(
            model.r0, c, static_cast<int>(model.change_times.size()), model.f,
            model.g, model.gamma, model.gamma_new, x_lo, lambda_minus, model.n);
        if (params.xi <= 0.0) params.xi = tp.xi;
        if (params.omega <= 0.0) params.omega = tp.omega;  // = x_min / 2
    }
    if (pcp.stride == 0) pcp.stride = params.alpha;
    params.validate();
}

ExperimentConfig fig1_config() {
    ExperimentConfig cfg;
    cfg.scenario = "fig1";
    cfg.trials = 10;
    cfg.seed = 20140331;  // arbitrary fixed default

    cfg.model.n = 256;
    cfg.model.t_max = 10000;
    cfg.model.r0 = 10;
    cfg.model.change_times = {25, 5001};
    cfg.model.c_new = {2, 2};
    cfg.model.gamma = 5.0;
    cfg.model.gamma_new = 0.04;
    cfg.model.f = 1.0;
    cfg.model.g = 1.0;

    cfg.support.kind = SupportSpec::Kind::example1;
    cfg.support.s = 20;
    cfg.support.step = 10;
    cfg.support.move_every = 18;  // floor(alpha / 44)

    cfg.x_lo = 2.0;
    cfg.x_hi = 6.0;
    cfg.init_noise_std = 1e-4;

    cfg.params.alpha = 800;
    cfg.params.K = 6;

    cfg.pcp.stride = 1600;  // every 2*alpha
    cfg.finalize();
    return cfg;
}

ExperimentConfig fig2_config() {
    ExperimentConfig cfg = fig1_config();
    cfg.scenario = "fig2";
    cfg.support = SupportSpec{};
    cfg.support.kind = SupportSpec::Kind::uniform;
    cfg.support.s = 20;
    cfg.params.xi = 0.0;
    cfg.params.omega = 0.0;
    cfg.finalize();
    return cfg;
}

ExperimentConfig parse_config(const json& doc) {
    require_keys(doc,
                 {"schema_version", "scenario", "trials", "seed", "out", "emit",
                  "model", "support", "x_range", "init_noise_std", "params",
                  "pcp"},
                 "config");
    if (doc.contains("schema_version") &&
        doc.at("schema_version").get<int>() != 1) {
        throw ConfigError("unsupported config schema_version");
    }

    ExperimentConfig cfg;
    const std::string scenario =
        doc.value("scenario", std::string("custom"));
    if (scenario == "fig1") {
        cfg = fig1_config();
    } else if (scenario == "fig2") {
        cfg = fig2_config();
    } else if (scenario == "custom") {
        cfg.scenario = "custom";
    } else {
        throw ConfigError("unknown scenario preset '" + scenario + "'");
    }

    if (doc.contains("trials")) cfg.trials = doc.at("trials").get<int>();
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("out")) cfg.out_dir = doc.at("out").get<std::string>();
    if (doc.contains("emit")) {
        const json& e = doc.at("emit");
        require_keys(e, {"csv", "svg", "json"}, "emit");
        cfg.emit_csv = e.value("csv", cfg.emit_csv);
        cfg.emit_svg = e.value("svg", cfg.emit_svg);
        cfg.emit_json = e.value("json", cfg.emit_json);
    }
    if (doc.contains("model")) {
        const json& m = doc.at("model");
        require_keys(m,
                     {"n", "t_max", "r0", "change_times", "c_new", "gamma",
                      "gamma_new", "ramp", "lambda_minus", "lambda_plus", "f",
                      "g"},
                     "model");
        if (m.contains("n")) cfg.model.n = m.at("n").get<Index>();
        if (m.contains("t_max")) cfg.model.t_max = m.at("t_max").get<long>();
        if (m.contains("r0")) cfg.model.r0 = m.at("r0").get<int>();
        if (m.contains("change_times")) {
            cfg.model.change_times =
                m.at("change_times").get<std::vector<long>>();
        }
        if (m.contains("c_new")) {
            cfg.model.c_new = m.at("c_new").get<std::vector<int>>();
        }
        if (m.contains("gamma")) cfg.model.gamma = m.at("gamma").get<double>();
        if (m.contains("gamma_new")) {
            cfg.model.gamma_new = m.at("gamma_new").get<double>();
        }
        if (m.contains("ramp")) cfg.model.ramp = m.at("ramp").get<long>();
        if (m.contains("lambda_minus")) {
            cfg.model.lambda_minus = m.at("lambda_minus").get<double>();
        }
        if (m.contains("lambda_plus")) {
            cfg.model.lambda_plus = m.at("lambda_plus").get<double>();
        }
        if (m.contains("f")) cfg.model.f = m.at("f").get<double>();
        if (m.contains("g")) cfg.model.g = m.at("g").get<double>();
    }
    if (doc.contains("support")) {
        const json& s = doc.at("support");
        require_keys(s, {"kind", "s", "step", "move_every", "q", "sigma2", "a"},
                     "support");
        cfg.support.kind =
            support_kind_from(s.value("kind", support_kind_name(cfg.support.kind)));
        if (s.contains("s")) cfg.support.s = s.at("s").get<int>();
        if (s.contains("step")) cfg.support.step = s.at("step").get<int>();
        if (s.contains("move_every")) {
            cfg.support.move_every = s.at("move_every").get<long>();
        }
        if (s.contains("q")) cfg.support.q = s.at("q").get<double>();
        if (s.contains("sigma2")) cfg.support.sigma2 = s.at("sigma2").get<double>();
        if (s.contains("a")) cfg.support.a = s.at("a").get<int>();
    }
    if (doc.contains("x_range")) {
        const auto range = doc.at("x_range").get<std::vector<double>>();
        if (range.size() != 2) throw ConfigError("x_range must be [lo, hi]");
        cfg.x_lo = range[0];
        cfg.x_hi = range[1];
    }
    if (doc.contains("init_noise_std")) {
        cfg.init_noise_std = doc.at("init_noise_std").get<double>();
    }
    if (doc.contains("params")) {
        const json& p = doc.at("params");
        require_keys(p,
                     {"xi", "omega", "alpha", "K", "solver_tol",
                      "solver_max_inner", "solver_max_outer"},
                     "params");
        if (p.contains("xi")) cfg.params.xi = p.at("xi").get<double>();
        if (p.contains("omega")) cfg.params.omega = p.at("omega").get<double>();
        if (p.contains("alpha")) cfg.params.alpha = p.at("alpha").get<long>();
        if (p.contains("K")) cfg.params.K = p.at("K").get<int>();
        if (p.contains("solver_tol")) {
            cfg.params.solver.tol = p.at("solver_tol").get<double>();
        }
        if (p.contains("solver_max_inner")) {
            cfg.params.solver.max_inner = p.at("solver_max_inner").get<int>();
        }
        if (p.contains("solver_max_outer")) {
            cfg.params.solver.max_outer = p.at("solver_max_outer").get<int>();
        }
    }
    if (doc.contains("pcp")) {
        const json& p = doc.at("pcp");
        require_keys(p, {"stride", "tol", "max_iter"}, "pcp");
        if (p.contains("stride")) cfg.pcp.stride = p.at("stride").get<long>();
        if (p.contains("tol")) cfg.pcp.tol = p.at("tol").get<double>();
        if (p.contains("max_iter")) cfg.pcp.max_iter = p.at("max_iter").get<int>();
    }
    cfg.finalize();
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json support{{"kind", support_kind_name(cfg.support.kind)},
                 {"s", cfg.support.s}};
    switch (cfg.support.kind) {
        case SupportSpec::Kind::example1:
            support["step"] = cfg.support.step;
            support["move_every"] = cfg.support.move_every;
            break;
        case SupportSpec::Kind::probabilistic:
            support["q"] = cfg.support.q;
            support["sigma2"] = cfg.support.sigma2;
            break;
        case SupportSpec::Kind::everyframe:
            support["a"] = cfg.support.a;
            break;
        case SupportSpec::Kind::uniform:
            break;
    }
    return json{
        {"schema_version", cfg.schema_version},
        {"scenario", cfg.scenario},
        {"trials", cfg.trials},
        {"seed", cfg.seed},
        {"out", cfg.out_dir},
        {"emit",
         {{"csv", cfg.emit_csv}, {"svg", cfg.emit_svg}, {"json", cfg.emit_json}}},
        {"model",
         {{"n", cfg.model.n},
          {"t_max", cfg.model.t_max},
          {"r0", cfg.model.r0},
          {"change_times", cfg.model.change_times},
          {"c_new", cfg.model.c_new},
          {"gamma", cfg.model.gamma},
          {"gamma_new", cfg.model.gamma_new},
          {"ramp", cfg.model.ramp},
          {"f", cfg.model.f},
          {"g", cfg.model.g}}},
        {"support", support},
        {"x_range", {cfg.x_lo, cfg.x_hi}},
        {"init_noise_std", cfg.init_noise_std},
        {"params",
         {{"xi", cfg.params.xi},
          {"omega", cfg.params.omega},
          {"alpha", cfg.params.alpha},
          {"K", cfg.params.K},
          {"solver_tol", cfg.params.solver.tol}}},
        {"pcp",
         {{"stride", cfg.pcp.stride},
          {"tol", cfg.pcp.tol},
          {"max_iter", cfg.pcp.max_iter}}}};
}

synth::SubspaceModel make_model(const ExperimentConfig& cfg, int trial) {
    Rng rng = trial_root(cfg, trial).split("model");
    return synth::gen_subspace_model(cfg.model, rng);
}

synth::SupportSequence make_supports(const ExperimentConfig& cfg, int trial) {
    const std::uint64_t seed =
        trial_root(cfg, trial).split("support").next_u64();
    const auto& s = cfg.support;
    switch (s.kind) {
        case SupportSpec::Kind::example1:
            return synth::gen_support_example1(cfg.model.n, s.s, s.step,
                                               s.move_every, cfg.model.t_max,
                                               seed);
        case SupportSpec::Kind::probabilistic:
            return synth::gen_support_probabilistic(
                cfg.model.n, s.s, s.q, s.sigma2, cfg.model.t_max, seed);
        case SupportSpec::Kind::everyframe:
            return synth::gen_support_everyframe(cfg.model.n, s.s, s.a,
                                                 cfg.model.t_max, seed);
        case SupportSpec::Kind::uniform:
            return synth::gen_support_uniform(cfg.model.n, s.s, cfg.model.t_max,
                                              seed);
    }
    throw ConfigError("unreachable support kind");
}

synth::StreamSynthesizer make_stream(const ExperimentConfig& cfg, int trial) {
    const std::uint64_t seed = trial_root(cfg, trial).split("stream").next_u64();
    return synth::StreamSynthesizer(make_model(cfg, trial),
                                    make_supports(cfg, trial), cfg.x_lo,
                                    cfg.x_hi, seed);
}

synth::PerturbedBasis make_initial_estimate(const ExperimentConfig& cfg,
                                            int trial,
                                            const synth::SubspaceModel& model) {
    Rng rng = trial_root(cfg, trial).split("init");
    const Basis p0(Matrix(model.segment_basis(0)), 0.0);
    return synth::perturb_initial_estimate(p0, cfg.init_noise_std, rng);
}

ReprocsTrialResult run_reprocs_trial(const ExperimentConfig& cfg, int trial) {
    const auto stream = make_stream(cfg, trial);
    const auto init = make_initial_estimate(cfg, trial, stream.model());
    ReprocsTrialResult result;
    result.run = run_stream(stream, cfg.params, init.basis);
    result.metrics = analysis::compute_metrics(result.run, stream);
    return result;
}

PcpTrialResult run_pcp_trial(const ExperimentConfig& cfg, int trial) {
    const auto stream = make_stream(cfg, trial);
    Matrix m(stream.n(), stream.t_max());
    Matrix x(stream.n(), stream.t_max());
    for (long t = 1; t <= stream.t_max(); ++t) {
        const auto sample = stream.at(t);
        m.col(t - 1) = sample.m;
        x.col(t - 1) = sample.x_true;
    }
    pcp::PcpOptions opt;
    opt.tol = cfg.pcp.tol;
    opt.max_iter = cfg.pcp.max_iter;
    PcpTrialResult result;
    result.snapshots = pcp::pcp_schedule(m, x, cfg.pcp.stride, opt);
    return result;
}

std::vector<double> pcp_error_timeline(
    const std::vector<pcp::PcpSnapshot>& snapshots) {
    std::vector<double> timeline;
    if (snapshots.empty()) return timeline;
    timeline.resize(snapshots.back().t);
    long from = 0;
    for (const auto& snap : snapshots) {
        for (long t = from; t < snap.t; ++t) {
            timeline[t] = snap.col_rel_err[t];
        }
        from = snap.t;
    }
    return timeline;
}

std::vector<double> mean_rows(const std::vector<std::vector<double>>& rows) {
    std::vector<double> mean;
    if (rows.empty()) return mean;
    mean.assign(rows[0].size(), 0.0);
    for (const auto& row : rows) {
        if (row.size() != mean.size()) {
            throw DimensionError("row length mismatch in mean_rows");
        }
        for (size_t i = 0; i < row.size(); ++i) mean[i] += row[i];
    }
    for (double& v : mean) v /= static_cast<double>(rows.size());
    return mean;
}

// ---- verification suites ----------------------------------------------

namespace {

double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

Matrix random_psd(Index k, double norm_target, Rng& rng) {
    Matrix g(k, k);
    for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < k; ++j) g(i, j) = rng.normal();
    }
    Matrix a = g * g.transpose();
    const double top = spectral_norm(a);
    if (top > 0.0) a *= norm_target / top;
    return a;
}

Matrix random_symmetric(Index k, double norm_target, Rng& rng) {
    Matrix g(k, k);
    for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < k; ++j) g(i, j) = rng.normal();
    }
    Matrix a = 0.5 * (g + g.transpose());
    const double top = spectral_norm(a);
    if (top > 0.0) a *= norm_target / top;
    return a;
}

}  // namespace

VerifyReport verify_lemma1(std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    VerifyReport report;
    report.suite = "lemma1";
    Rng root(seed);
    bool all = true;
    for (int trial = 0; trial < 200; ++trial) {
        Rng rng = root.split(trial);
        const Index n = 6 + static_cast<Index>(rng.uniform_int(0, 8));  // 6..14
        const Index r = 1 + static_cast<Index>(
                                rng.uniform_int(0, std::min<Index>(3, n - 1)));
        const int s = 1 + static_cast<int>(rng.uniform_int(0, 2));  // 1..3
        const Basis p = gen_basis(n, r, rng);
        const double kappa = analysis::kappa_s(p, s).value;
        Matrix a = Matrix::Identity(n, n) - p.mat() * p.mat().transpose();
        const double delta = analysis::ric_delta_s(a, s);

        VerifyCheck check;
        check.quantity = "|delta_s(I-PP') - kappa_s(P)^2|";
        check.lhs = std::abs(delta - kappa * kappa);
        check.rhs = 1e-8;
        check.holds = check.lhs <= check.rhs;
        std::ostringstream cfg;
        cfg << "n=" << n << " r=" << r << " s=" << s;
        check.config = cfg.str();
        check.seed = seed;
        all = all && check.holds;
        report.checks.push_back(std::move(check));
    }
    report.passed = all;
    report.seconds = elapsed_since(t0);
    return report;
}

VerifyReport verify_zeta() {
    const auto t0 = std::chrono::steady_clock::now();
    VerifyReport report;
    report.suite = "zeta";
    bool all = true;
    const int r0_grid[] = {1, 5, 10, 20};
    const int c_grid[] = {1, 2, 4};
    const int j_grid[] = {1, 2, 3};
    const double f_grid[] = {1.0, 10.0, 100.0};
    const double g_grid[] = {1.0, 1.2, 1.4142135623730951};
    const double gamma_grid[] = {1.0, 5.0};

    for (int r0 : r0_grid)
        for (int c : c_grid)
            for (int J : j_grid)
                for (double f : f_grid)
                    for (double g : g_grid)
                        for (double gamma : gamma_grid) {
                            const double r = r0 + static_cast<double>(J) * c;
                            const double zeta =
                                std::min({1e-4 / (r * r), 1.5e-4 / (r * r * f),
                                          1.0 / (r * r * r * gamma * gamma)});
                            const auto seq = analysis::zeta_plus_sequence(
                                r0, c, J, zeta, f, g);
                            const double cz = c * zeta;

                            double worst_decay = -1.0;
                            double worst_monotone = -1.0;
                            double zeta1 = 0.0, zeta2 = 0.0;
                            double worst_closure = 0.0;
                            for (int j = 1; j <= J; ++j) {
                                const auto& zk = seq.zeta_k_plus[j - 1];
                                zeta1 = std::max(zeta1, zk[1]);
                                zeta2 = std::max(zeta2, zk[2]);
                                for (int k = 1; k <= seq.K; ++k) {
                                    worst_decay = std::max(
                                        worst_decay,
                                        zk[k] - (std::pow(0.72, k) + 0.83 * cz));
                                    worst_monotone = std::max(
                                        worst_monotone, zk[k] - zk[k - 1]);
                                }
                                if (j < J) {
                                    worst_closure = std::max(
                                        worst_closure,
                                        std::abs(seq.zeta_star_plus[j] -
                                                 (seq.zeta_star_plus[j - 1] +
                                                  cz)));
                                }
                            }
                            std::ostringstream cfg;
                            cfg << "r0=" << r0 << " c=" << c << " J=" << J
                                << " f=" << f << " g=" << g
                                << " gamma=" << gamma;

                            auto push = [&](const std::string& q, double lhs,
                                            double rhs) {
                                VerifyCheck check;
                                check.quantity = q;
                                check.lhs = lhs;
                                check.rhs = rhs;
                                check.holds = lhs <= rhs;
                                check.config = cfg.str();
                                all = all && check.holds;
                                report.checks.push_back(std::move(check));
                            };
                            push("max_k zeta_k+ - (0.72^k + 0.83 c zeta)",
                                 worst_decay, 1e-12);
                            push("zeta_1+", zeta1, 0.1);
                            push("zeta_2+", zeta2, 0.06 + 1e-12);
                            push("max_k zeta_k+ - zeta_{k-1}+", worst_monotone,
                                 1e-15);
                            push("|zeta_{j+1,*}+ - (zeta_{j,*}+ + c zeta)|",
                                 worst_closure, 1e-12);
                        }
    report.passed = all;
    report.seconds = elapsed_since(t0);
    return report;
}

VerifyReport verify_blockbound(std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    VerifyReport report;
    report.suite = "blockbound";
    Rng root(seed);
    bool all = true;

    const Index n = 64;
    const int s = 8;
    const long beta = 40;
    // (move_every, step) pairs whose span stays inside n over one window.
    const std::pair<long, int> motions[] = {{4, 5}, {5, 6}, {7, 9}, {8, 12}};

    for (int trial = 0; trial < 1000; ++trial) {
        Rng rng = root.split(trial);
        const bool disjoint = trial % 2 == 1;
        const double sigma_plus = rng.uniform(0.5, 2.0);

        synth::SupportSequence window;
        int d;
        if (disjoint) {
            // step == s gives pairwise-disjoint supports; one pass over the
            // vector per window, no revisits.
            const long w = rng.uniform_int(5, 7);
            window = synth::gen_support_example1(n, s, s, w, beta,
                                                 rng.next_u64());
            d = 1;
        } else {
            const auto[w, step] = motions[rng.uniform_int(0, 3)];
            window = synth::gen_support_example1(n, s, step, w, beta,
                                                 rng.next_u64());
            d = 2;
        }

        std::vector<Matrix> a_t;
        a_t.reserve(beta);
        for (long t = 1; t <= beta; ++t) {
            const auto k = static_cast<Index>(window.at(t).size());
            a_t.push_back(random_psd(k, sigma_plus * rng.uniform(0.2, 1.0), rng));
        }
        const auto check_result = analysis::check_block_bound(
            window, a_t, sigma_plus, beta, d, analysis::HMode::constructive);

        VerifyCheck check;
        check.quantity = disjoint ? "||M||_2 vs 2 sigma+ h (disjoint)"
                                  : "||M||_2 vs 8 sigma+ h";
        check.lhs = check_result.lhs;
        check.rhs = check_result.rhs;
        check.holds = check_result.holds;
        std::ostringstream cfg;
        cfg << "trial=" << trial << " h=" << check_result.h
            << " sigma+=" << sigma_plus;
        check.config = cfg.str();
        check.seed = seed;
        all = all && check.holds;
        report.checks.push_back(std::move(check));
    }
    report.passed = all;
    report.seconds = elapsed_since(t0);
    return report;
}

VerifyReport verify_sintheta(std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    VerifyReport report;
    report.suite = "sintheta";
    Rng root(seed);
    bool all = true;
    const Index n = 32;

    for (int trial = 0; trial < 1000; ++trial) {
        Rng rng = root.split(trial);
        const Index c = 1 + static_cast<Index>(rng.uniform_int(0, 2));
        const Basis e_new = gen_basis(n, c, rng);

        Matrix a_top = random_psd(c, rng.uniform(2.0, 3.0), rng);
        a_top.diagonal().array() += 1.5;  // keeps lambda_min well above A_perp
        const Matrix a_perp = random_psd(n - c, rng.uniform(0.0, 0.5), rng);
        const Matrix h = random_symmetric(n, rng.uniform(0.01, 0.4), rng);

        const auto check_result =
            analysis::check_sin_theta(a_top, a_perp, h, e_new);
        VerifyCheck check;
        check.quantity = "||(I-QQ')E_new||_2 vs ||H||/gap";
        check.lhs = check_result.lhs;
        check.rhs = check_result.rhs;
        check.holds = check_result.holds;
        std::ostringstream cfg;
        cfg << "trial=" << trial << " c=" << c << " gap=" << check_result.gap;
        check.config = cfg.str();
        check.seed = seed;
        all = all && check.holds;
        report.checks.push_back(std::move(check));
    }
    report.passed = all;
    report.seconds = elapsed_since(t0);
    return report;
}

VerifyReport verify_matrixcs(std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    VerifyReport report;
    report.suite = "matrixcs";
    Rng root(seed);
    bool all = true;

    for (int trial = 0; trial < 1000; ++trial) {
        Rng rng = root.split(trial);
        const int terms = static_cast<int>(rng.uniform_int(1, 8));
        std::vector<Matrix> xs, ys;
        for (int t = 0; t < terms; ++t) {
            Matrix x(5, 3), y(5, 3);
            for (Index i = 0; i < 5; ++i) {
                for (Index j = 0; j < 3; ++j) {
                    x(i, j) = rng.normal();
                    y(i, j) = rng.normal();
                }
            }
            xs.push_back(std::move(x));
            ys.push_back(std::move(y));
        }
        const auto check_result = analysis::matrix_cs_check(xs, ys);
        VerifyCheck check;
        check.quantity = "||avg X Y'||^2 vs lmax(avg XX') lmax(avg YY')";
        check.lhs = check_result.lhs;
        check.rhs = check_result.rhs;
        check.holds = check_result.holds;
        check.config = "terms=" + std::to_string(terms);
        check.seed = seed;
        all = all && check.holds;
        report.checks.push_back(std::move(check));
    }
    report.passed = all;
    report.seconds = elapsed_since(t0);
    return report;
}

std::vector<VerifyReport> verify_all(std::uint64_t seed) {
    return {verify_lemma1(seed), verify_zeta(), verify_blockbound(seed),
            verify_sintheta(seed), verify_matrixcs(seed)};
}

json report_to_json(const VerifyReport& report) {
    json checks = json::array();
    for (const auto& c : report.checks) {
        checks.push_back({{"quantity", c.quantity},
                          {"lhs", c.lhs},
                          {"rhs", c.rhs},
                          {"holds", c.holds},
                          {"config", c.config},
                          {"seed", c.seed}});
    }
    return json{{"suite", report.suite},
                {"passed", report.passed},
                {"seconds", report.seconds},
                {"checks", std::move(checks)}};
}

int thread_budget() {
    if (const char* env = std::getenv("REPROCS_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

}  // namespace reprocs::experiment
