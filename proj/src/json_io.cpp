#include "covtarget/json_io.hpp"

#include "covtarget/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace covtarget {
namespace {

Json vector_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Vector vector_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("expected a numeric array", 0, 0);
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

const Json& field(const Json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) throw ParseError(std::string("missing field '") + name + "'", 0, 0);
    return j.at(name);
}

std::string clique_text(const Clique& c) {
    std::string s = "{";
    for (std::size_t k = 0; k < c.size(); ++k) s += (k ? "," : "") + std::to_string(c[k] + 1);
    return s + "}";
}

Json edges_json(const std::vector<Edge>& edges) {
    Json out = Json::array();
    for (const Edge& e : edges) out.push_back(Json::array({e.i, e.j, e.weight}));
    return out;
}

FitReport report_from_json(const Json& j) {
    FitReport r;
    r.objective = j.value("objective", 0.0);
    r.grad_norm = j.value("grad_norm", 0.0);
    r.iterations = j.value("iterations", 0);
    r.start_winner = j.value("start_winner", 0);
    r.converged = j.value("converged", false);
    for (const Json& s : j.value("per_start", Json::array())) {
        r.per_start.push_back({s.value("objective", 0.0), s.value("converged", false), s.value("iterations", 0)});
    }
    return r;
}

}  // namespace

Json to_json(const Matrix& m) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("expected a matrix (array of rows)", 0, 0);
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw ParseError("ragged matrix", 0, 0);
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    return m;
}

Json to_json(const FitReport& r) {
    Json per_start = Json::array();
    for (const auto& s : r.per_start) {
        per_start.push_back({{"objective", s.objective}, {"converged", s.converged}, {"iterations", s.iterations}});
    }
    return {{"objective", r.objective},       {"grad_norm", r.grad_norm},  {"iterations", r.iterations},
            {"start_winner", r.start_winner}, {"converged", r.converged}, {"per_start", std::move(per_start)}};
}

Json to_json(const FittedModel& m) {
    Json j;
    const bool bekk = is_bekk(m.kind);
    j["model"] = bekk ? "bekk" : "dcc";
    j["variant"] = to_string(m.kind);
    j["n"] = m.labels.size();
    j["periods"] = m.periods;
    j["labels"] = m.labels;
    if (const auto* b = std::get_if<BekkState>(&m.state)) {
        Json c = Json::array();
        for (Eigen::Index i = 0; i < b->params.dim(); ++i) {
            for (Eigen::Index k = 0; k <= i; ++k) c.push_back(b->params.c_lower(i, k));
        }
        j["c_lower"] = std::move(c);
        j["a_diag"] = vector_json(b->params.a_diag);
        j["b_diag"] = vector_json(b->params.b_diag);
    } else {
        const auto& d = std::get<DccState>(m.state);
        Json uni = Json::array();
        for (const auto& g : d.params.univariate) uni.push_back({{"omega", g.omega}, {"alpha", g.alpha}, {"beta", g.beta}});
        j["univariate"] = std::move(uni);
        j["theta1"] = d.params.theta1;
        j["theta2"] = d.params.theta2;
        j["q_bar"] = to_json(d.params.q_bar);
    }
    j["target"] = m.target ? Json{{"delta", m.target->delta}, {"pd_adjusted", m.target->pd_adjusted}} : Json(nullptr);
    j["mu"] = vector_json(m.mu);
    if (const auto* b = std::get_if<BekkState>(&m.state)) {
        j["h1"] = to_json(b->h1);
    } else {
        j["h1"] = vector_json(std::get<DccState>(m.state).h1);
    }
    j["fit"] = {{"loglik", m.fit.loglik}, {"penalty", m.fit.penalty}, {"report", to_json(m.fit.report)}};
    return j;
}

FittedModel fitted_model_from_json(const Json& j) {
    try {
        FittedModel m;
        const std::string model = field(j, "model").get<std::string>();
        m.labels = field(j, "labels").get<std::vector<std::string>>();
        const auto n = static_cast<Eigen::Index>(m.labels.size());
        if (field(j, "n").get<Eigen::Index>() != n) throw ParseError("'n' does not match the label count", 0, 0);
        m.mu = vector_from_json(field(j, "mu"));
        if (m.mu.size() != n) throw ParseError("'mu' has wrong length", 0, 0);
        m.periods = j.value("periods", Eigen::Index{0});
        const Json& target = field(j, "target");
        if (!target.is_null()) {
            m.target = TargetInfo{field(target, "delta").get<double>(), field(target, "pd_adjusted").get<bool>()};
        }
        if (model == "bekk") {
            m.kind = m.target ? ModelKind::BekkMod : ModelKind::Bekk;
            const Vector c = vector_from_json(field(j, "c_lower"));
            if (c.size() != n * (n + 1) / 2) throw ParseError("c_lower has wrong length", 0, 0);
            BekkParams p{Matrix::Zero(n, n), vector_from_json(field(j, "a_diag")), vector_from_json(field(j, "b_diag"))};
            Eigen::Index k = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index c2 = 0; c2 <= i; ++c2) p.c_lower(i, c2) = c(k++);
            }
            if (!p.valid()) throw DomainError("bekk parameters violate their constraints");
            m.state = BekkState{std::move(p), matrix_from_json(field(j, "h1"))};
        } else if (model == "dcc") {
            m.kind = m.target ? ModelKind::DccMod : ModelKind::Dcc;
            DccParams p;
            for (const Json& g : field(j, "univariate")) {
                p.univariate.push_back({field(g, "omega").get<double>(), field(g, "alpha").get<double>(),
                                        field(g, "beta").get<double>()});
            }
            p.theta1 = field(j, "theta1").get<double>();
            p.theta2 = field(j, "theta2").get<double>();
            p.q_bar = matrix_from_json(field(j, "q_bar"));
            if (!p.valid() || p.dim() != n) throw DomainError("dcc parameters violate their constraints");
            m.state = DccState{std::move(p), vector_from_json(field(j, "h1"))};
        } else {
            throw ParseError("unknown model '" + model + "'", 0, 0);
        }
        if (j.contains("variant") && parse_model_kind(j.at("variant").get<std::string>()) != m.kind) {
            throw ParseError("'variant' disagrees with model and target", 0, 0);
        }
        if (j.contains("fit")) {
            m.fit.loglik = j["fit"].value("loglik", 0.0);
            m.fit.penalty = j["fit"].value("penalty", 0.0);
            if (j["fit"].contains("report")) m.fit.report = report_from_json(j["fit"]["report"]);
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed parameter JSON: ") + e.what(), 0, 0);
    }
}

Json to_json(const ThresholdGraph& g) {
    return {{"labels", g.labels}, {"delta", g.delta}, {"edges", edges_json(g.edges)}};
}

ThresholdGraph graph_from_json(const Json& j) {
    try {
        auto labels = field(j, "labels").get<std::vector<std::string>>();
        const double delta = field(j, "delta").get<double>();
        std::vector<Edge> edges;
        for (const Json& e : field(j, "edges")) {
            if (!e.is_array() || e.size() != 3) throw ParseError("edge must be [i, j, rho]", 0, 0);
            edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
        }
        return graph_from_edges(std::move(labels), delta, edges);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed graph JSON: ") + e.what(), 0, 0);
    }
}

Json cliques_to_json(const CliqueSet& cliques, const std::vector<std::string>& labels) {
    Json out = Json::array();
    for (const auto& c : cliques) {
        Json names = Json::array();
        for (int v : c) names.push_back(labels.at(static_cast<std::size_t>(v)));
        out.push_back(std::move(names));
    }
    return out;
}

Json to_json(const Dendrogram& d) {
    Json merges = Json::array();
    for (const auto& m : d.merges) merges.push_back({{"a", m.a}, {"b", m.b}, {"height", m.height}, {"size", m.size}});
    return {{"labels", d.labels}, {"merges", std::move(merges)}, {"newick", to_newick(d)}};
}

Json to_json(const GraphComparison& c, const std::vector<std::string>& labels) {
    return {{"edges_only_observed", edges_json(c.edges_only_observed)},
            {"edges_only_simulated", edges_json(c.edges_only_simulated)},
            {"edge_jaccard", c.edge_jaccard},
            {"cliques_matched", c.cliques_matched},
            {"clique_best_jaccard", c.clique_best_jaccard},
            {"simulated_cliques", cliques_to_json(c.simulated_cliques, labels)}};
}

Json to_json(const EvalReport& r) {
    Json models = Json::array();
    for (const auto& ev : r.models) {
        models.push_back({{"model", to_string(ev.model.kind)},
                          {"params", to_json(ev.model)},
                          {"pd_adjusted", r.target.pd_adjusted},
                          {"losses",
                           {{"delta", r.delta},
                            {"frobenius_target", ev.frobenius_target},
                            {"frobenius_sample", ev.frobenius_sample},
                            {"kl_target", ev.kl_target},
                            {"kl_sample", ev.kl_sample}}},
                          {"simulated_graph", to_json(ev.simulated_graph)},
                          {"comparison", to_json(ev.comparison, r.labels)}});
    }
    return {{"labels", r.labels},
            {"delta", r.delta},
            {"periods", r.periods},
            {"sim_len", r.sim_len},
            {"seed", r.seed},
            {"target",
             {{"delta", r.target.delta},
              {"pd_adjusted", r.target.pd_adjusted},
              {"z_hat", to_json(r.target.z_hat)},
              {"sigma_hat", to_json(r.target.sigma_hat)}}},
            {"observed", {{"graph", to_json(r.observed_graph)}, {"cliques", cliques_to_json(r.observed_cliques, r.labels)}}},
            {"models", std::move(models)}};
}

std::string format_table(const EvalReport& r) {
    std::ostringstream out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", r.delta);
    const std::string delta = buf;
    out << "N=" << r.labels.size() << "  T=" << r.periods << "  simulated T=" << r.sim_len << "  delta=" << delta
        << (r.target.pd_adjusted ? "  (target PD-adjusted)" : "") << "\n";
    out << "vertices:";
    for (std::size_t i = 0; i < r.labels.size(); ++i) out << " " << i + 1 << "-" << r.labels[i];
    out << "\nobserved maximal cliques:";
    for (const auto& c : r.observed_cliques) out << " " << clique_text(c);
    out << "\n\n";

    auto pad = [&](const std::string& s, int width) {
        out << s;
        for (int k = static_cast<int>(s.size()); k < width; ++k) out << ' ';
    };
    auto cell = [&](const std::string& s) { pad(s, 12); };
    auto head = [&](const std::string& s) { pad(s, 24); };
    head("");
    for (const auto& ev : r.models) cell(to_string(ev.model.kind));
    out << "\n";
    auto numeric_row = [&](const std::string& name, auto getter) {
        head(name + " (d=" + delta + ")");
        for (const auto& ev : r.models) {
            std::snprintf(buf, sizeof buf, "%.4f", getter(ev));
            cell(buf);
        }
        out << "\n";
    };
    numeric_row("F", [](const ModelEvaluation& e) { return e.frobenius_target; });
    numeric_row("F sample", [](const ModelEvaluation& e) { return e.frobenius_sample; });
    numeric_row("KL", [](const ModelEvaluation& e) { return e.kl_target; });
    numeric_row("KL sample", [](const ModelEvaluation& e) { return e.kl_sample; });
    numeric_row("edge Jaccard", [](const ModelEvaluation& e) { return e.comparison.edge_jaccard; });
    head("cliques matched");
    for (const auto& ev : r.models) {
        cell(std::to_string(ev.comparison.cliques_matched) + "/" + std::to_string(r.observed_cliques.size()));
    }
    out << "\n\nmaximal cliques of simulated graphs:\n";
    for (const auto& ev : r.models) {
        out << "  " << to_string(ev.model.kind) << ":";
        for (const auto& c : ev.comparison.simulated_cliques) out << " " << clique_text(c);
        out << "\n";
    }
    return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace covtarget
