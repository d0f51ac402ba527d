#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ggm/io.hpp"

namespace ggm {

namespace cli_detail {

struct PriorFlags {
    std::string family = "uniform";
    double h = 1.0;
    double c = 0.5;
    double phi = 0.1;
    double a = 1.0;
    double b = 1.0;
};

inline void add_prior_flags(CLI::App* cmd, PriorFlags& f) {
    cmd->add_option("--prior", f.family, "Graph prior family")
        ->check(CLI::IsMember(
            {"uniform", "loss-based", "carvalho-scott", "villa-lee", "mixture", "bernoulli", "beta-binomial"}))
        ->capture_default_str();
    cmd->add_option("--h", f.h, "Loss scale h (loss-based, villa-lee)")->capture_default_str();
    cmd->add_option("--c", f.c, "Complexity mix c in [0,1] (loss-based)")->capture_default_str();
    cmd->add_option("--phi", f.phi, "Edge inclusion probability (bernoulli)")->capture_default_str();
    cmd->add_option("--a", f.a, "Beta shape a (beta-binomial)")->capture_default_str();
    cmd->add_option("--b", f.b, "Beta shape b (beta-binomial)")->capture_default_str();
}

inline PriorSpec build_prior(const PriorFlags& f, int m) {
    if (f.family == "uniform") return PriorSpec::uniform(m);
    if (f.family == "loss-based") return PriorSpec::loss_based(m, f.h, f.c);
    if (f.family == "carvalho-scott") return PriorSpec::carvalho_scott(m);
    if (f.family == "villa-lee") return PriorSpec::villa_lee(m, f.h);
    if (f.family == "mixture") return PriorSpec::mixture(m);
    if (f.family == "bernoulli") return PriorSpec::bernoulli(m, f.phi);
    if (f.family == "beta-binomial") return PriorSpec::beta_binomial(m, f.a, f.b);
    throw DomainError("unknown prior family: " + f.family);
}

inline EmitFlags parse_emit(const std::string& spec) {
    EmitFlags flags{false, false, false};
    std::string tok;
    std::istringstream ss(spec);
    while (std::getline(ss, tok, ',')) {
        if (tok == "json")
            flags.json = true;
        else if (tok == "dot")
            flags.dot = true;
        else if (tok == "csv")
            flags.csv = true;
        else
            throw DomainError("unknown emit target '" + tok + "' (expected json, dot or csv)");
    }
    return flags;
}

}  // namespace cli_detail

/// Builds and runs the command line surface. `argv[0]` is the program name.
inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Structure learning toolkit for decomposable Gaussian graphical models"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key=value file supplying defaults; command-line flags win");
    // The loss scale is spelled --h, so help must not claim the short -h.
    app.set_help_flag("--help", "Print this help message and exit");
    auto add_command = [&app](const std::string& name, const std::string& desc) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        cmd->set_help_flag("--help", "Print this help message and exit");
        return cmd;
    };

    // ---- search ----------------------------------------------------------
    struct SearchArgs {
        std::string data_path;
        bool header = false;
        cli_detail::PriorFlags prior;
        std::optional<double> g;
        SearchConfig cfg;
        std::string out = ".";
        std::string emit = "json,dot,csv";
    };
    auto sa = std::make_shared<SearchArgs>();
    CLI::App* search = add_command("search", "Run the stochastic graph search on a CSV dataset");
    search->add_option("--data", sa->data_path, "Input CSV (rows = observations)")
        ->required()
        ->check(CLI::ExistingFile);
    search->add_flag("--header", sa->header, "Skip the first CSV line");
    cli_detail::add_prior_flags(search, sa->prior);
    search->add_option("--g", sa->g, "Likelihood fraction g (default 1/n)");
    search->add_option("--iterations", sa->cfg.iterations)->capture_default_str();
    search->add_option("--global-period", sa->cfg.global_period)->capture_default_str();
    search->add_option("--resample-period", sa->cfg.resample_period)->capture_default_str();
    search->add_option("--list-capacity", sa->cfg.list_capacity)->capture_default_str();
    search->add_option("--clamp", sa->cfg.inclusion_clamp, "Proposal weight clamp")->capture_default_str();
    search->add_option("--resync", sa->cfg.inclusion_resync, "Full inclusion recompute period")->capture_default_str();
    search->add_option("--seed", sa->cfg.seed, "RNG seed")->required();
    search->add_option("--progress", sa->cfg.progress_period, "Progress line period (stderr)")->capture_default_str();
    auto* no_memo = search->add_flag("--no-memo", "Disable the score memo cache");
    search->add_option("--out", sa->out, "Output directory")->capture_default_str();
    search->add_option("--emit", sa->emit, "Comma list of outputs: json,dot,csv")->capture_default_str();
    search->callback([sa, no_memo]() {
        sa->cfg.use_score_memo = no_memo->count() == 0;
        const DataMatrix data = ingest_csv(sa->data_path, sa->header);
        const PriorSpec prior = cli_detail::build_prior(sa->prior, data.p * (data.p - 1) / 2);
        LikelihoodConfig lik;
        lik.g = sa->g;
        const SearchResult res = run_fincs(data, prior, sa->cfg, lik);
        ResultBundle bundle;
        bundle.command = "search";
        bundle.input_path = sa->data_path;
        bundle.has_header = sa->header;
        bundle.prior = prior;
        bundle.search = sa->cfg;
        bundle.g_override = sa->g;
        bundle.n = data.n;
        bundle.p = data.p;
        bundle.dropped_rows = data.dropped_rows;
        bundle.top = res.list.entries_descending();
        bundle.inclusion = res.inclusion;
        bundle.median = res.median;
        bundle.stats = res.stats;
        emit_results(bundle, sa->out, cli_detail::parse_emit(sa->emit));
        std::cout << "best log score " << format_number(res.stats.best_score) << " (size "
                  << res.list.best().graph.edge_count() << ", list " << res.list.size() << ", median "
                  << res.median.edge_count() << " edges)\n";
    });

    // ---- calibrate -------------------------------------------------------
    struct CalArgs {
        int vertices = 0;
        int edges = 0;
        double mean = 0.0;
        std::optional<double> variance;
        std::optional<double> fixed_c;
        std::string out;
    };
    auto ca = std::make_shared<CalArgs>();
    CLI::App* cal = add_command("calibrate", "Solve (h,c) for target size moments");
    auto* cal_v = cal->add_option("--vertices", ca->vertices, "Vertex count (m = p(p-1)/2)");
    auto* cal_m = cal->add_option("--edges", ca->edges, "Maximum edge count m directly");
    cal_v->excludes(cal_m);
    cal->add_option("--mean", ca->mean, "Target mean edge count")->required();
    cal->add_option("--variance", ca->variance, "Target variance of the edge count");
    cal->add_option("--fixed-c", ca->fixed_c, "Pin c and solve for h only");
    cal->add_option("--out", ca->out, "Directory for size_pmf.csv and results.json");
    cal->callback([ca, cal_v, cal_m]() {
        if (cal_v->count() == 0 && cal_m->count() == 0)
            throw DomainError("calibrate needs --vertices or --edges");
        const int m = cal_v->count() ? ca->vertices * (ca->vertices - 1) / 2 : ca->edges;
        const PriorSpec spec = calibrate(m, ca->mean, ca->variance, ca->fixed_c);
        const SizeDistribution dist = size_distribution(spec, SizeWeighting::PerSize);
        const Moments mom = size_moments(dist);
        std::cout << "h " << format_number(spec.h) << "\nc " << format_number(spec.c) << "\nmean "
                  << format_number(mom.mean) << "\nvariance " << format_number(mom.variance) << "\n";
        if (!ca->out.empty()) {
            std::filesystem::create_directories(ca->out);
            write_text_file(std::filesystem::path(ca->out) / "size_pmf.csv", size_pmf_csv(dist));
            Json j{{"schema_version", 1},
                   {"command", "calibrate"},
                   {"m", m},
                   {"target_mean", ca->mean},
                   {"target_variance", ca->variance ? Json(*ca->variance) : Json(nullptr)},
                   {"fixed_c", ca->fixed_c ? Json(*ca->fixed_c) : Json(nullptr)},
                   {"h", spec.h},
                   {"c", spec.c},
                   {"mean", mom.mean},
                   {"variance", mom.variance}};
            write_text_file(std::filesystem::path(ca->out) / "results.json", j.dump(2) + "\n");
        }
    });

    // ---- simulate --------------------------------------------------------
    struct SimArgs {
        int noise = 5;
        int n = 50;
        std::uint64_t seed = 0;
        std::string out;
        std::string truth;
    };
    auto si = std::make_shared<SimArgs>();
    CLI::App* sim = add_command("simulate", "Emit a synthetic dataset from the benchmark model");
    sim->add_option("--noise", si->noise, "Isolated noise vertices appended to the 10-vertex base")
        ->capture_default_str();
    sim->add_option("--n", si->n, "Observations")->capture_default_str();
    sim->add_option("--seed", si->seed, "RNG seed")->required();
    sim->add_option("--out", si->out, "Output CSV path")->required();
    sim->add_option("--truth", si->truth, "Also write the true edge list here");
    sim->callback([si]() {
        const CovarianceModel model = build_true_model(SimStudySpec{si->noise, si->n, {}});
        Rng rng(si->seed);
        const Eigen::MatrixXd rows = sample_mvn_rows(model.sigma, si->n, rng);
        write_text_file(si->out, data_to_csv(rows));
        if (!si->truth.empty()) {
            std::ostringstream ss;
            write_edge_list(*model.graph, ss);
            write_text_file(si->truth, ss.str());
        }
        std::cout << "wrote " << si->n << " x " << model.sigma.rows() << " dataset to " << si->out << "\n";
    });

    // ---- sim-study -------------------------------------------------------
    struct StudyArgs {
        SimStudySpec spec;
        SearchConfig cfg;
        std::string out = ".";
    };
    auto st = std::make_shared<StudyArgs>();
    CLI::App* study = add_command("sim-study", "Prior comparison on synthetic data (FP/FN per seed)");
    study->add_option("--noise", st->spec.noise_vertices)->capture_default_str();
    study->add_option("--n", st->spec.n)->capture_default_str();
    study->add_option("--seeds", st->spec.seeds, "Replicate seeds")->required()->delimiter(',');
    study->add_option("--iterations", st->cfg.iterations)->capture_default_str();
    study->add_option("--list-capacity", st->cfg.list_capacity)->capture_default_str();
    study->add_option("--out", st->out, "Output directory")->capture_default_str();
    study->callback([st]() {
        const SimStudyReport report = run_sim_study(st->spec, st->cfg);
        std::filesystem::create_directories(st->out);
        write_text_file(std::filesystem::path(st->out) / "sim_study.csv", sim_study_csv(report));
        Json runs = Json::array();
        for (const SimStudyRun& r : report.runs)
            runs.push_back(Json{{"seed", r.seed},
                                {"prior", r.prior_label},
                                {"h", r.h},
                                {"c", r.c},
                                {"false_positives", r.false_positives},
                                {"false_negatives", r.false_negatives},
                                {"true_positives", r.true_positives},
                                {"median_edges", r.median_edges},
                                {"mean_true_edge_inclusion", r.mean_true_edge_inclusion},
                                {"best_score", r.best_score}});
        Json j{{"schema_version", 1},
               {"command", "sim-study"},
               {"noise_vertices", report.spec.noise_vertices},
               {"n", report.spec.n},
               {"seeds", report.spec.seeds},
               {"iterations", st->cfg.iterations},
               {"runs", std::move(runs)}};
        write_text_file(std::filesystem::path(st->out) / "results.json", j.dump(2) + "\n");
        std::map<std::string, std::pair<int, int>> totals;
        for (const SimStudyRun& r : report.runs) {
            totals[r.prior_label].first += r.false_positives;
            totals[r.prior_label].second += r.false_negatives;
        }
        for (const auto& [label, t] : totals)
            std::cout << label << ": total FP " << t.first << ", total FN " << t.second << "\n";
    });

    // ---- kl-study --------------------------------------------------------
    struct KlArgs {
        KlStudySpec spec;
        std::string out = ".";
    };
    auto ka = std::make_shared<KlArgs>();
    CLI::App* kl = add_command("kl-study", "Expected cost of the best single-edge deletion vs graph size");
    kl->add_option("--sizes", ka->spec.sizes, "Graph sizes")->delimiter(',')->capture_default_str();
    kl->add_option("--draws", ka->spec.mc_samples, "Monte Carlo draws per size")->capture_default_str();
    kl->add_option("--variant", ka->spec.variant, "Prior scale matrix")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, KlScaleVariant>{{"identity", KlScaleVariant::Identity},
                                                  {"dense", KlScaleVariant::Dense},
                                                  {"dense-inverse", KlScaleVariant::DenseInverse}}))
        ->capture_default_str();
    kl->add_option("--delta", ka->spec.delta, "Prior shape")->capture_default_str();
    kl->add_option("--seed", ka->spec.seed, "RNG seed")->required();
    kl->add_option("--out", ka->out, "Output directory")->capture_default_str();
    kl->callback([ka]() {
        const std::vector<KlCurvePoint> curve = run_kl_study(ka->spec);
        std::filesystem::create_directories(ka->out);
        write_text_file(std::filesystem::path(ka->out) / "kl_curve.csv", kl_curve_csv(curve));
        Json pts = Json::array();
        for (const KlCurvePoint& pt : curve)
            pts.push_back(Json{{"size", pt.size}, {"mean_kl", pt.mean}, {"std_error", pt.std_error}});
        Json j{{"schema_version", 1},
               {"command", "kl-study"},
               {"variant", to_string(ka->spec.variant)},
               {"delta", ka->spec.delta},
               {"draws", ka->spec.mc_samples},
               {"seed", ka->spec.seed},
               {"curve", std::move(pts)}};
        write_text_file(std::filesystem::path(ka->out) / "results.json", j.dump(2) + "\n");
        for (const KlCurvePoint& pt : curve)
            std::cout << pt.size << " " << format_number(pt.mean) << " " << format_number(pt.std_error) << "\n";
    });

    // ---- score -----------------------------------------------------------
    struct ScoreArgs {
        std::string data_path;
        bool header = false;
        std::string graph_path;
        cli_detail::PriorFlags prior;
        std::optional<double> g;
    };
    auto sc = std::make_shared<ScoreArgs>();
    CLI::App* score = add_command("score", "Log posterior score of one graph on a dataset");
    score->add_option("--data", sc->data_path)->required()->check(CLI::ExistingFile);
    score->add_flag("--header", sc->header, "Skip the first CSV line");
    score->add_option("--graph", sc->graph_path, "Edge list file (1-based 'i j' lines)")
        ->required()
        ->check(CLI::ExistingFile);
    cli_detail::add_prior_flags(score, sc->prior);
    score->add_option("--g", sc->g, "Likelihood fraction g (default 1/n)");
    score->callback([sc]() {
        const DataMatrix data = ingest_csv(sc->data_path, sc->header);
        const Graph g = read_edge_list(sc->graph_path, data.p);
        const PriorSpec prior = cli_detail::build_prior(sc->prior, data.p * (data.p - 1) / 2);
        LikelihoodConfig lik;
        lik.g = sc->g;
        const double marginal = log_marginal_likelihood(data, g, lik);
        const double lp = log_prior(prior, g);
        std::cout << "log_marginal " << format_number(marginal) << "\nlog_prior " << format_number(lp)
                  << "\nlog_score " << format_number(marginal + lp) << "\n";
    });

    // ---- enumerate -------------------------------------------------------
    struct EnumArgs {
        std::string data_path;
        bool header = false;
        cli_detail::PriorFlags prior;
        std::optional<double> g;
        std::string out = ".";
    };
    auto en = std::make_shared<EnumArgs>();
    CLI::App* enumc = add_command("enumerate", "Exact posterior over all decomposable graphs (p <= 6)");
    enumc->add_option("--data", en->data_path)->required()->check(CLI::ExistingFile);
    enumc->add_flag("--header", en->header, "Skip the first CSV line");
    cli_detail::add_prior_flags(enumc, en->prior);
    enumc->add_option("--g", en->g, "Likelihood fraction g (default 1/n)");
    enumc->add_option("--out", en->out, "Output directory")->capture_default_str();
    enumc->callback([en]() {
        const DataMatrix data = ingest_csv(en->data_path, en->header);
        const PriorSpec prior = cli_detail::build_prior(en->prior, data.p * (data.p - 1) / 2);
        LikelihoodConfig lik;
        lik.g = en->g;
        const std::vector<Graph> all = enumerate_decomposable(data.p);
        MarginalLikelihood ml(data, lik);
        std::vector<ScoredGraph> scored;
        scored.reserve(all.size());
        double mx = -std::numeric_limits<double>::infinity();
        for (const Graph& g : all) {
            const double s = ml.log_marginal(g) + log_prior(prior, g);
            mx = std::max(mx, s);
            scored.push_back({g, s});
        }
        std::stable_sort(scored.begin(), scored.end(),
                         [](const ScoredGraph& x, const ScoredGraph& y) { return x.score > y.score; });
        double denom = 0.0;
        for (const ScoredGraph& sg : scored) denom += std::exp(sg.score - mx);
        Eigen::MatrixXd incl = Eigen::MatrixXd::Zero(data.p, data.p);
        std::string csv = "rank,log_score,posterior,size,edges\n";
        Json tops = Json::array();
        int rank = 1;
        for (const ScoredGraph& sg : scored) {
            const double post = std::exp(sg.score - mx) / denom;
            for (const Edge& e : sg.graph.edges()) {
                incl(e.a, e.b) += post;
                incl(e.b, e.a) += post;
            }
            csv += std::to_string(rank) + ',' + format_number(sg.score) + ',' + format_number(post) + ',' +
                   std::to_string(sg.graph.edge_count()) + ",\"" + edges_to_string(sg.graph) + "\"\n";
            if (rank <= 100)
                tops.push_back(Json{{"rank", rank},
                                    {"log_score", sg.score},
                                    {"posterior", post},
                                    {"size", sg.graph.edge_count()},
                                    {"edges", edges_to_string(sg.graph)}});
            ++rank;
        }
        std::filesystem::create_directories(en->out);
        write_text_file(std::filesystem::path(en->out) / "posterior.csv", csv);
        write_text_file(std::filesystem::path(en->out) / "inclusion_exact.csv", matrix_to_csv(incl));
        Json j{{"schema_version", 1},
               {"command", "enumerate"},
               {"input", en->data_path},
               {"prior", prior_to_json(prior)},
               {"decomposable_count", scored.size()},
               {"map", Json{{"log_score", scored.front().score}, {"edges", edges_to_string(scored.front().graph)}}},
               {"top_graphs", std::move(tops)}};
        write_text_file(std::filesystem::path(en->out) / "results.json", j.dump(2) + "\n");
        std::cout << scored.size() << " decomposable graphs; MAP size " << scored.front().graph.edge_count()
                  << ", log score " << format_number(scored.front().score) << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

inline int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("ggmkit");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace ggm
