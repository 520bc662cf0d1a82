// Experiment runner: dataset generation, seeded ReProCS/PCP runs,
// comparison plots, and the numerical verification suites.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <vector>

#include "reprocs/experiment.hpp"
#include "reprocs/io.hpp"
#include "reprocs/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace reprocs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitVerifyFailed = 3;
constexpr int kExitNumerical = 4;

struct CommonArgs {
    std::string config;
    std::string out;
    std::string algo = "reprocs";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int trials = 0;
};

experiment::ExperimentConfig load_config(const CommonArgs& args) {
    experiment::ExperimentConfig cfg;
    if (args.config == "fig1") {
        cfg = experiment::fig1_config();
    } else if (args.config == "fig2") {
        cfg = experiment::fig2_config();
    } else {
        std::ifstream in(args.config);
        if (!in) throw ConfigError("cannot open config: " + args.config);
        json doc;
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config is not valid JSON: ") +
                              e.what());
        }
        cfg = experiment::parse_config(doc);
    }
    if (args.seed_set) cfg.seed = args.seed;
    if (args.trials > 0) cfg.trials = args.trials;
    if (!args.out.empty()) cfg.out_dir = args.out;
    cfg.finalize();
    return cfg;
}

std::string trial_dir(const experiment::ExperimentConfig& cfg, int trial) {
    return cfg.out_dir + "/trial_" + std::to_string(trial);
}

json matrix_to_json_array(const Matrix& m) {
    std::vector<double> flat;
    flat.reserve(m.size());
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

Matrix matrix_from_json_array(const json& j) {
    const Index rows = j.at("rows").get<Index>();
    const Index cols = j.at("cols").get<Index>();
    const auto flat = j.at("data").get<std::vector<double>>();
    if (static_cast<Index>(flat.size()) != rows * cols) {
        throw ConfigError("manifest matrix payload size mismatch");
    }
    Matrix m(rows, cols);
    size_t k = 0;
    for (Index i = 0; i < rows; ++i) {
        for (Index j2 = 0; j2 < cols; ++j2) m(i, j2) = flat[k++];
    }
    return m;
}

void write_matrix_csv(const fs::path& path, const Matrix& m,
                      const std::string& prefix) {
    std::vector<std::string> header{"t"};
    for (Index i = 0; i < m.rows(); ++i) {
        header.push_back(prefix + "_" + std::to_string(i + 1));
    }
    std::vector<std::vector<std::string>> rows;
    rows.reserve(m.cols());
    for (Index t = 0; t < m.cols(); ++t) {
        std::vector<std::string> row{std::to_string(t + 1)};
        for (Index i = 0; i < m.rows(); ++i) {
            row.push_back(io::format_double(m(i, t)));
        }
        rows.push_back(std::move(row));
    }
    io::write_csv(path, header, rows);
}

Matrix read_matrix_csv(const fs::path& path) {
    const io::Csv csv = io::read_csv(path);
    const Index n = static_cast<Index>(csv.header.size()) - 1;
    Matrix m(n, static_cast<Index>(csv.rows.size()));
    for (size_t r = 0; r < csv.rows.size(); ++r) {
        for (Index i = 0; i < n; ++i) {
            m(i, static_cast<Index>(r)) = std::stod(csv.rows[r][i + 1]);
        }
    }
    return m;
}

int cmd_gen(const CommonArgs& args) {
    const auto cfg = load_config(args);
    fs::create_directories(cfg.out_dir);

    json manifest;
    manifest["schema_version"] = 1;
    manifest["seed"] = cfg.seed;
    manifest["trials"] = cfg.trials;
    manifest["config"] = experiment::config_to_json(cfg);
    json trials = json::array();

    for (int trial = 0; trial < cfg.trials; ++trial) {
        const auto stream = experiment::make_stream(cfg, trial);
        const auto init =
            experiment::make_initial_estimate(cfg, trial, stream.model());
        const fs::path dir = trial_dir(cfg, trial);
        fs::create_directories(dir);

        Matrix m(stream.n(), stream.t_max());
        Matrix x(stream.n(), stream.t_max());
        Matrix l(stream.n(), stream.t_max());
        for (long t = 1; t <= stream.t_max(); ++t) {
            const auto sample = stream.at(t);
            m.col(t - 1) = sample.m;
            x.col(t - 1) = sample.x_true;
            l.col(t - 1) = sample.l_true;
        }
        io::write_stream_csv(dir / "stream.csv", m);
        write_matrix_csv(dir / "truth_x.csv", x, "x");
        write_matrix_csv(dir / "truth_l.csv", l, "l");

        json t;
        t["trial"] = trial;
        t["p_hat_0"] = matrix_to_json_array(init.basis.mat());
        t["p_hat_0_se"] = init.se;
        t["truth_basis"] = matrix_to_json_array(stream.model().p_full.mat());
        t["ranks"] = stream.model().ranks;
        trials.push_back(std::move(t));
        std::cout << "gen: wrote trial " << trial << " under " << dir.string()
                  << "\n";
    }
    manifest["trial_data"] = std::move(trials);
    std::ofstream out(fs::path(cfg.out_dir) / "manifest.json");
    out << manifest.dump(2) << '\n';
    std::cout << "gen: manifest at " << cfg.out_dir << "/manifest.json\n";
    return kExitOk;
}

json load_manifest(const experiment::ExperimentConfig& cfg) {
    const fs::path path = fs::path(cfg.out_dir) / "manifest.json";
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("dataset manifest not found: " + path.string() +
                          " (run `gen` first)");
    }
    json manifest;
    in >> manifest;
    if (manifest.at("seed").get<std::uint64_t>() != cfg.seed) {
        throw ConfigError("dataset was generated with a different seed");
    }
    return manifest;
}

int cmd_run(const CommonArgs& args) {
    const auto cfg = load_config(args);
    const json manifest = load_manifest(cfg);
    const int trials =
        std::min<int>(cfg.trials, manifest.at("trials").get<int>());

    if (args.algo == "reprocs") {
        std::vector<analysis::MetricsLog> logs(trials);
        experiment::parallel_for(trials, [&](int trial) {
            const fs::path dir = trial_dir(cfg, trial);
            const Matrix m = io::read_stream_csv(dir / "stream.csv");
            const json& td = manifest.at("trial_data").at(trial);
            const Basis p0(matrix_from_json_array(td.at("p_hat_0")), 1e-8);

            auto run = run_stream(
                m.cols(), [&m](long t) { return Vector(m.col(t - 1)); },
                cfg.params, p0);

            analysis::GroundTruth truth;
            truth.x_true = read_matrix_csv(dir / "truth_x.csv");
            truth.p_full = matrix_from_json_array(td.at("truth_basis"));
            truth.change_times = cfg.model.change_times;
            truth.ranks = td.at("ranks").get<std::vector<int>>();
            logs[trial] = analysis::compute_metrics(run, truth);
            io::write_metrics_csv(dir / "metrics_reprocs.csv", logs[trial]);
        });

        json agg;
        agg["algo"] = "reprocs";
        agg["trials"] = trials;
        json windows = json::array();
        for (size_t j = 0; j < cfg.model.change_times.size(); ++j) {
            std::vector<std::vector<double>> per_trial;
            for (int trial = 0; trial < trials; ++trial) {
                per_trial.push_back(analysis::window_mean_rel_err(
                    logs[trial], cfg.model.change_times[j], cfg.params.alpha,
                    cfg.params.K));
            }
            windows.push_back({{"t_j", cfg.model.change_times[j]},
                               {"mean_rel_x_err", experiment::mean_rows(per_trial)}});
        }
        agg["per_window"] = std::move(windows);
        double exact = 0.0;
        for (const auto& log : logs) {
            exact += log.support_exact_fraction(1, cfg.model.t_max);
        }
        agg["support_exact_fraction"] = exact / std::max(trials, 1);
        std::ofstream out(fs::path(cfg.out_dir) / "aggregate_reprocs.json");
        out << agg.dump(2) << '\n';
        std::cout << "run: reprocs metrics for " << trials
                  << " trial(s) in " << cfg.out_dir << "\n";
        return kExitOk;
    }

    if (args.algo == "pcp") {
        json agg;
        agg["algo"] = "pcp";
        agg["trials"] = trials;
        json snaps_out = json::array();
        std::mutex agg_mutex;
        experiment::parallel_for(trials, [&](int trial) {
            const fs::path dir = trial_dir(cfg, trial);
            const Matrix m = io::read_stream_csv(dir / "stream.csv");
            const Matrix x = read_matrix_csv(dir / "truth_x.csv");
            pcp::PcpOptions opt;
            opt.tol = cfg.pcp.tol;
            opt.max_iter = cfg.pcp.max_iter;
            const auto snapshots = pcp::pcp_schedule(m, x, cfg.pcp.stride, opt);
            const auto timeline = experiment::pcp_error_timeline(snapshots);

            std::vector<std::vector<std::string>> rows;
            rows.reserve(timeline.size());
            for (size_t t = 0; t < timeline.size(); ++t) {
                rows.push_back({std::to_string(t + 1),
                                io::format_double(timeline[t])});
            }
            io::write_csv(dir / "metrics_pcp.csv", {"t", "rel_x_err"}, rows);

            json per_trial = json::array();
            for (const auto& snap : snapshots) {
                double mean = 0.0;
                for (double e : snap.col_rel_err) mean += e;
                mean /= std::max<size_t>(snap.col_rel_err.size(), 1);
                per_trial.push_back({{"t", snap.t},
                                     {"iterations", snap.iterations},
                                     {"converged", snap.converged},
                                     {"mean_col_rel_err", mean}});
            }
            std::lock_guard<std::mutex> lock(agg_mutex);
            snaps_out.push_back({{"trial", trial},
                                 {"snapshots", std::move(per_trial)}});
        });
        agg["runs"] = std::move(snaps_out);
        std::ofstream out(fs::path(cfg.out_dir) / "aggregate_pcp.json");
        out << agg.dump(2) << '\n';
        std::cout << "run: pcp metrics for " << trials << " trial(s) in "
                  << cfg.out_dir << "\n";
        return kExitOk;
    }
    throw ConfigError("unknown --algo '" + args.algo + "'");
}

int cmd_compare(const CommonArgs& args) {
    const auto cfg = load_config(args);
    const json manifest = load_manifest(cfg);
    const int trials =
        std::min<int>(cfg.trials, manifest.at("trials").get<int>());

    std::vector<std::vector<double>> reprocs_rows, pcp_rows;
    for (int trial = 0; trial < trials; ++trial) {
        const fs::path dir = trial_dir(cfg, trial);
        {
            const io::Csv csv = io::read_csv(dir / "metrics_reprocs.csv");
            std::vector<double> rel;
            rel.reserve(csv.rows.size());
            for (const auto& row : csv.rows) rel.push_back(std::stod(row[3]));
            reprocs_rows.push_back(std::move(rel));
        }
        {
            const io::Csv csv = io::read_csv(dir / "metrics_pcp.csv");
            std::vector<double> rel;
            rel.reserve(csv.rows.size());
            for (const auto& row : csv.rows) rel.push_back(std::stod(row[1]));
            pcp_rows.push_back(std::move(rel));
        }
    }
    const auto reprocs_mean = experiment::mean_rows(reprocs_rows);
    const auto pcp_mean = experiment::mean_rows(pcp_rows);

    std::vector<svg::Series> series(1);
    series[0].label = "ReProCS";
    series[0].color = "#c0392b";
    for (size_t t = 0; t < reprocs_mean.size(); ++t) {
        series[0].x.push_back(static_cast<double>(t + 1));
        series[0].y.push_back(reprocs_mean[t]);
    }
    if (!pcp_mean.empty()) {
        svg::Series pcp_series;
        pcp_series.label = "PCP";
        pcp_series.color = "#2c3e50";
        for (size_t t = 0; t < pcp_mean.size(); ++t) {
            pcp_series.x.push_back(static_cast<double>(t + 1));
            pcp_series.y.push_back(pcp_mean[t]);
        }
        series.push_back(std::move(pcp_series));
    }
    const fs::path plot_path = fs::path(cfg.out_dir) / "compare.svg";
    svg::write_log_plot(plot_path, cfg.scenario + ": relative error of x_t",
                        "t", "||x_hat - x|| / ||x||", series);

    const Matrix x0 = read_matrix_csv(fs::path(trial_dir(cfg, 0)) / "truth_x.csv");
    const auto supports = synth::supports_from_columns(x0);
    const long stride = std::max<long>(1, supports.t_max() / 2000);
    svg::write_support_raster(fs::path(cfg.out_dir) / "support_raster.svg",
                              cfg.scenario + ": support pattern of X",
                              supports, stride);

    json report;
    report["scenario"] = cfg.scenario;
    report["trials"] = trials;
    report["series_length_reprocs"] = reprocs_mean.size();
    report["series_length_pcp"] = pcp_mean.size();
    std::ofstream out(fs::path(cfg.out_dir) / "compare.json");
    out << report.dump(2) << '\n';
    std::cout << "compare: wrote " << plot_path.string() << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed,
               const std::string& out_dir) {
    std::vector<experiment::VerifyReport> reports;
    if (suite == "all") {
        reports = experiment::verify_all(seed);
    } else if (suite == "lemma1") {
        reports.push_back(experiment::verify_lemma1(seed));
    } else if (suite == "zeta") {
        reports.push_back(experiment::verify_zeta());
    } else if (suite == "blockbound") {
        reports.push_back(experiment::verify_blockbound(seed));
    } else if (suite == "sintheta") {
        reports.push_back(experiment::verify_sintheta(seed));
    } else if (suite == "matrixcs") {
        reports.push_back(experiment::verify_matrixcs(seed));
    } else {
        throw ConfigError("unknown verify suite '" + suite + "'");
    }

    bool all_passed = true;
    json out = json::array();
    for (const auto& report : reports) {
        all_passed = all_passed && report.passed;
        out.push_back(experiment::report_to_json(report));
        std::cout << "verify " << report.suite << ": "
                  << (report.passed ? "PASS" : "FAIL") << " ("
                  << report.checks.size() << " checks, " << report.seconds
                  << "s)\n";
        if (!report.passed) {
            for (const auto& check : report.checks) {
                if (!check.holds) {
                    std::cout << "  FAILED " << check.quantity
                              << " lhs=" << check.lhs << " rhs=" << check.rhs
                              << " [" << check.config << "]\n";
                }
            }
        }
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream f(fs::path(out_dir) / ("verify_" + suite + ".json"));
        f << out.dump(2) << '\n';
    }
    return all_passed ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming robust PCA toolkit: online sparse + low-rank "
                 "separation, batch PCP comparator, and numerical "
                 "verification suites"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string suite = "all";

    auto add_common = [&](CLI::App* sub, bool need_config) {
        auto* opt = sub->add_option("--config", args.config,
                                    "config JSON path, or preset fig1|fig2");
        if (need_config) opt->required();
        sub->add_option("--seed", args.seed, "override experiment seed")
            ->each([&](const std::string&) { args.seed_set = true; });
        sub->add_option("--out", args.out, "output directory override");
        sub->add_option("--trials", args.trials, "trial count override");
    };

    auto* gen = app.add_subcommand("gen", "synthesize a dataset to disk");
    add_common(gen, true);
    auto* run = app.add_subcommand("run", "run an algorithm over a dataset");
    add_common(run, true);
    run->add_option("--algo", args.algo, "reprocs|pcp")
        ->check(CLI::IsMember({"reprocs", "pcp"}));
    auto* compare =
        app.add_subcommand("compare", "combined report and plots");
    add_common(compare, true);
    auto* verify =
        app.add_subcommand("verify", "numerical verification suites");
    verify->add_option(
        "--suite", suite,
        "all|lemma1|zeta|blockbound|sintheta|matrixcs");
    verify->add_option("--seed", args.seed, "suite RNG seed")
        ->each([&](const std::string&) { args.seed_set = true; });
    verify->add_option("--out", args.out, "directory for the JSON report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(args);
        if (run->parsed()) return cmd_run(args);
        if (compare->parsed()) return cmd_compare(args);
        if (verify->parsed()) {
            return cmd_verify(suite, args.seed_set ? args.seed : 0, args.out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
