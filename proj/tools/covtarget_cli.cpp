// covtarget command-line front end: cluster, fit, simulate, graph, cliques, evaluate.

#include "covtarget/clustering.hpp"
#include "covtarget/error.hpp"
#include "covtarget/json_io.hpp"
#include "covtarget/market_data.hpp"
#include "covtarget/netgraph.hpp"
#include "covtarget/pipeline.hpp"
#include "covtarget/targeting.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fs = std::filesystem;
using namespace covtarget;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 2, kDataError = 3, kEstimationFailure = 4 };

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// COVTARGET_LOG=quiet|info|debug, default quiet.
int log_level() {
    static const int level = [] {
        const char* v = std::getenv("COVTARGET_LOG");
        if (v == nullptr) return 0;
        const std::string s(v);
        return s == "debug" ? 2 : (s == "info" ? 1 : 0);
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[covtarget] " << msg << "\n";
}

struct Options {
    std::string input;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    double delta = 0.0;
    std::vector<std::string> models;
    long sim_len = 0;
    int starts = 5;
    int max_iters = 2000;
    std::string format;
    std::string params;
    int k = 0;
    bool serial = false;

    CLI::Option* delta_opt = nullptr;
    CLI::Option* sim_len_opt = nullptr;
    CLI::Option* k_opt = nullptr;

    bool has_delta() const { return delta_opt->count() > 0; }
};

std::vector<ModelKind> parse_models(const Options& o, std::vector<ModelKind> fallback) {
    if (o.models.empty()) return fallback;
    std::vector<ModelKind> out;
    for (const auto& name : o.models) {
        try {
            out.push_back(parse_model_kind(name));
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
    }
    return out;
}

void require_input(const Options& o) {
    if (o.input.empty()) throw UsageError("--input is required");
}

void require_delta_for(const Options& o, const std::vector<ModelKind>& models) {
    for (ModelKind m : models) {
        if (is_modified(m) && !o.has_delta()) throw UsageError(to_string(m) + " requires --delta");
    }
}

OptimizerOptions optimizer_options(const Options& o) {
    OptimizerOptions opts;
    opts.n_starts = o.starts;
    opts.max_iters = o.max_iters;
    opts.seed = o.seed;
    opts.parallel = !o.serial;
    validate(opts);
    return opts;
}

fs::path output_path(const Options& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    return fs::path(o.out_dir) / name;
}

void emit(const fs::path& path, const std::string& content) {
    write_file_atomic(path, content);
    std::cout << path.string() << "\n";
}

struct CorrelationSource {
    std::vector<std::string> labels;
    Matrix corr;
};

CorrelationSource load_correlation(const Options& o) {
    const std::string text = read_text_file(o.input);
    if (is_correlation_text(text)) {
        CorrelationInput in = parse_correlation(text);
        return {std::move(in.labels), std::move(in.corr)};
    }
    const ReturnPanel panel = parse_returns(text);
    return {panel.labels, sample_moments(panel).corr};
}

std::string clique_line(const Clique& c, const std::vector<std::string>& labels) {
    std::string s = "{";
    for (std::size_t k = 0; k < c.size(); ++k) {
        s += (k ? ", " : "") + labels[static_cast<std::size_t>(c[k])];
    }
    return s + "}";
}

int cmd_fit(const Options& o) {
    require_input(o);
    if (o.models.empty()) throw UsageError("fit needs --model");
    const auto models = parse_models(o, {});
    require_delta_for(o, models);
    const OptimizerOptions opts = optimizer_options(o);

    const ReturnPanel panel = load_returns(o.input);
    std::optional<TargetSpec> target;
    if (o.has_delta()) target = build_target(sample_moments(panel), o.delta);
    for (ModelKind kind : models) {
        log_info("fitting " + to_string(kind));
        const FittedModel m = fit_model(kind, panel, target, opts);
        if (!m.fit.report.converged) log_info(to_string(kind) + ": optimizer did not report convergence");
        emit(output_path(o, "params." + to_string(kind) + ".json"), to_json(m).dump(2) + "\n");
    }
    return kOk;
}

int cmd_simulate(const Options& o) {
    fs::path params_path = o.params;
    if (params_path.empty()) {
        if (o.models.size() != 1) throw UsageError("simulate needs --params or exactly one --model");
        params_path = fs::path(o.out_dir) / ("params." + to_string(parse_models(o, {}).front()) + ".json");
    }
    Json doc;
    try {
        doc = Json::parse(read_text_file(params_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON in ") + params_path.string() + ": " + e.what(), 0, 0);
    }
    const FittedModel m = fitted_model_from_json(doc);

    Eigen::Index t_len = o.sim_len;
    if (o.sim_len_opt->count() == 0) {
        t_len = m.periods;
        if (t_len == 0 && !o.input.empty()) t_len = load_returns(o.input).periods();
    }
    if (t_len < 2) throw UsageError("simulation length unknown or below 2; pass --sim-len");
    const ReturnPanel sim = simulate_model(m, t_len, o.seed);
    emit(output_path(o, "simulated." + to_string(m.kind) + ".csv"), format_returns_csv(sim));
    return kOk;
}

int cmd_graph(const Options& o) {
    require_input(o);
    if (!o.has_delta()) throw UsageError("graph needs --delta");
    const std::string format = o.format.empty() ? "json" : o.format;
    if (format != "json" && format != "dot") throw UsageError("graph supports --format json or dot");
    CorrelationSource src = load_correlation(o);
    const ThresholdGraph g = build_graph(src.corr, std::move(src.labels), o.delta);
    if (format == "dot") {
        emit(output_path(o, "graph.dot"), to_dot(g));
    } else {
        emit(output_path(o, "graph.json"), to_json(g).dump(2) + "\n");
    }
    return kOk;
}

int cmd_cliques(const Options& o) {
    require_input(o);
    const std::string text = read_text_file(o.input);
    ThresholdGraph g;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            g = graph_from_json(Json::parse(text));
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("invalid graph JSON: ") + e.what(), 0, 0);
        }
    } else {
        if (!o.has_delta()) throw UsageError("cliques on a data file needs --delta");
        CorrelationSource src = load_correlation(o);
        g = build_graph(src.corr, std::move(src.labels), o.delta);
    }
    const CliqueSet cliques = maximal_cliques(g);
    if (o.format == "text") {
        for (const auto& c : cliques) std::cout << clique_line(c, g.labels) << "\n";
    }
    emit(output_path(o, "cliques.json"), cliques_to_json(cliques, g.labels).dump(2) + "\n");
    return kOk;
}

int cmd_cluster(const Options& o) {
    require_input(o);
    CorrelationSource src = load_correlation(o);
    const Dendrogram dend = complete_linkage(corr_distance(src.corr), src.labels);
    Json out = to_json(dend);
    std::vector<int> assignment;
    if (o.k_opt->count() > 0) {
        assignment = cut_tree(dend, o.k);
        Json groups = Json::array();
        for (int c = 0; c < o.k; ++c) {
            Json members = Json::array();
            for (std::size_t leaf = 0; leaf < assignment.size(); ++leaf) {
                if (assignment[leaf] == c) members.push_back(dend.labels[leaf]);
            }
            groups.push_back(std::move(members));
        }
        out["cut"] = {{"k", o.k}, {"assignment", assignment}, {"groups", std::move(groups)}};
    }
    if (o.format == "text") {
        std::cout << to_newick(dend) << "\n";
        if (!assignment.empty()) {
            for (const auto& g : out["cut"]["groups"]) std::cout << g.dump() << "\n";
        }
    }
    emit(output_path(o, "dendrogram.json"), out.dump(2) + "\n");
    return kOk;
}

int cmd_evaluate(const Options& o) {
    require_input(o);
    EvalConfig cfg;
    cfg.models = parse_models(o, {ModelKind::Bekk, ModelKind::BekkMod, ModelKind::Dcc, ModelKind::DccMod});
    require_delta_for(o, cfg.models);
    cfg.delta = o.has_delta() ? o.delta : 0.0;
    cfg.sim_len = o.sim_len;
    cfg.seed = o.seed;
    cfg.optimizer = optimizer_options(o);
    const std::string format = o.format.empty() ? "text" : o.format;
    if (format != "json" && format != "text") throw UsageError("evaluate supports --format json or text");

    const ReturnPanel panel = load_returns(o.input);
    log_info("evaluating " + std::to_string(cfg.models.size()) + " model(s) on " + std::to_string(panel.periods()) +
             " observations");
    const EvalReport report = evaluate(panel, cfg);
    const std::string table = format_table(report);
    write_file_atomic(output_path(o, "report.json"), to_json(report).dump(2) + "\n");
    write_file_atomic(output_path(o, "report.txt"), table);
    if (format == "text") {
        std::cout << table;
    } else {
        std::cout << (fs::path(o.out_dir) / "report.json").string() << "\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Targeted multivariate GARCH estimation and correlation-network evaluation", "covtarget"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");

    Options o;
    app.add_option("--input", o.input, "price, #returns, #correlation or graph JSON file");
    app.add_option("--out-dir", o.out_dir, "directory for output files")->capture_default_str();
    app.add_option("--seed", o.seed, "seed for start perturbations and simulation")->capture_default_str();
    o.delta_opt = app.add_option("--delta", o.delta, "correlation threshold in [0, 1)");
    app.add_option("--model", o.models, "bekk, bekk_mod, dcc, dcc_mod (repeat or comma-separate)")->delimiter(',');
    o.sim_len_opt = app.add_option("--sim-len", o.sim_len, "simulated length (default: in-sample T)");
    app.add_option("--starts", o.starts, "optimizer starts per fit")->capture_default_str();
    app.add_option("--max-iters", o.max_iters, "quasi-Newton iterations per start")->capture_default_str();
    app.add_option("--format", o.format, "json, dot, csv or text");
    app.add_flag("--serial", o.serial, "run optimizer starts and models sequentially");

    auto* fit = app.add_subcommand("fit", "estimate model parameters")->fallthrough();
    auto* simulate = app.add_subcommand("simulate", "simulate returns from fitted parameters")->fallthrough();
    simulate->add_option("--params", o.params, "parameter JSON written by fit");
    auto* graph = app.add_subcommand("graph", "threshold correlation graph")->fallthrough();
    auto* cliques = app.add_subcommand("cliques", "maximal cliques of a threshold graph")->fallthrough();
    auto* cluster = app.add_subcommand("cluster", "complete-linkage clustering on 1 - rho")->fallthrough();
    o.k_opt = cluster->add_option("--k", o.k, "number of clusters to cut");
    auto* evaluate_cmd = app.add_subcommand("evaluate", "fit, simulate and compare all requested models")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (o.has_delta() && !(o.delta >= 0.0 && o.delta < 1.0)) throw UsageError("--delta must lie in [0, 1)");
        if (o.sim_len_opt->count() > 0 && o.sim_len < 2) throw UsageError("--sim-len must be at least 2");
        if (o.starts < 1) throw UsageError("--starts must be at least 1");
        if (*fit) return cmd_fit(o);
        if (*simulate) return cmd_simulate(o);
        if (*graph) return cmd_graph(o);
        if (*cliques) return cmd_cliques(o);
        if (*cluster) return cmd_cluster(o);
        if (*evaluate_cmd) return cmd_evaluate(o);
        return kUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const EstimationError& e) {
        std::cerr << "estimation failure: " << e.what() << "\n";
        return kEstimationFailure;
    } catch (const Error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kDataError;
    }
}
