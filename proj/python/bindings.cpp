#include "covtarget/clustering.hpp"
#include "covtarget/error.hpp"
#include "covtarget/garch.hpp"
#include "covtarget/json_io.hpp"
#include "covtarget/linalg.hpp"
#include "covtarget/market_data.hpp"
#include "covtarget/netgraph.hpp"
#include "covtarget/pipeline.hpp"
#include "covtarget/targeting.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace covtarget;

namespace {

OptimizerOptions options(int starts, std::uint64_t seed) {
    OptimizerOptions o;
    o.n_starts = starts;
    o.seed = seed;
    validate(o);
    return o;
}

ReturnPanel panel_of(const Matrix& returns, std::vector<std::string> labels) {
    return make_return_panel(returns, std::move(labels));
}

std::vector<ModelKind> kinds(const std::vector<std::string>& names) {
    std::vector<ModelKind> out;
    for (const auto& n : names) out.push_back(parse_model_kind(n));
    return out;
}

}  // namespace

PYBIND11_MODULE(_covtarget, m) {
    m.doc() = "Targeted multivariate GARCH estimation and correlation networks";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base.ptr());
    py::register_exception<DegenerateSeriesError>(m, "DegenerateSeriesError", base.ptr());
    py::register_exception<NotPositiveDefiniteError>(m, "NotPositiveDefiniteError", base.ptr());
    py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
    py::register_exception<NumericalOverflowError>(m, "NumericalOverflowError", base.ptr());
    py::register_exception<EstimationError>(m, "EstimationError", base.ptr());

    m.def("kl_divergence", py::overload_cast<const Matrix&, const Matrix&>(&kl_divergence), py::arg("p"),
          py::arg("q"));
    m.def("frobenius_path_loss", &frobenius_path_loss, py::arg("path"), py::arg("target"));
    m.def("nearest_pd", &nearest_pd, py::arg("m"), py::arg("floor") = kDefaultPdFloor);
    m.def("chol_sqrt", &chol_sqrt, py::arg("m"));
    m.def("logdet", [](const Matrix& a) { return cholesky(a).logdet(); }, py::arg("m"));

    m.def("threshold_correlation", &threshold_correlation, py::arg("corr"), py::arg("delta"));
    m.def(
        "build_target",
        [](const Matrix& returns, double delta) {
            const TargetSpec t = build_target(sample_moments(panel_of(returns, {})), delta);
            py::dict d;
            d["delta"] = t.delta;
            d["z_hat"] = t.z_hat;
            d["sigma_hat"] = t.sigma_hat;
            d["pd_adjusted"] = t.pd_adjusted;
            return d;
        },
        py::arg("returns"), py::arg("delta"));

    m.def(
        "graph_json",
        [](const Matrix& corr, double delta, std::vector<std::string> labels) {
            return to_json(build_graph(corr, std::move(labels), delta)).dump();
        },
        py::arg("corr"), py::arg("delta"), py::arg("labels") = std::vector<std::string>{});
    m.def(
        "graph_dot",
        [](const Matrix& corr, double delta, std::vector<std::string> labels) {
            return to_dot(build_graph(corr, std::move(labels), delta));
        },
        py::arg("corr"), py::arg("delta"), py::arg("labels") = std::vector<std::string>{});
    m.def(
        "maximal_cliques",
        [](const Matrix& corr, double delta) { return maximal_cliques(build_graph(corr, {}, delta)); },
        py::arg("corr"), py::arg("delta"), "0-based vertex lists in canonical order");
    m.def(
        "cliques_of_edges",
        [](int n, const std::vector<std::pair<int, int>>& edges) {
            std::vector<std::string> labels;
            for (int i = 0; i < n; ++i) labels.push_back(std::to_string(i + 1));
            std::vector<Edge> es;
            for (auto [i, j] : edges) es.push_back({std::min(i, j), std::max(i, j), 1.0});
            return maximal_cliques(graph_from_edges(labels, 0.0, es));
        },
        py::arg("n"), py::arg("edges"));

    m.def(
        "dendrogram_json",
        [](const Matrix& corr, std::vector<std::string> labels) {
            return to_json(complete_linkage(corr_distance(corr), std::move(labels))).dump();
        },
        py::arg("corr"), py::arg("labels") = std::vector<std::string>{});
    m.def(
        "cut_tree",
        [](const Matrix& corr, int k) { return cut_tree(complete_linkage(corr_distance(corr)), k); },
        py::arg("corr"), py::arg("k"));

    m.def(
        "garch11_fit",
        [](const Vector& eps, int starts, std::uint64_t seed) {
            const Garch11Fit f = garch11_fit(std::span<const double>(eps.data(), eps.size()), options(starts, seed));
            py::dict d;
            d["omega"] = f.params.omega;
            d["alpha"] = f.params.alpha;
            d["beta"] = f.params.beta;
            d["loglik"] = f.loglik;
            d["converged"] = f.converged;
            return d;
        },
        py::arg("eps"), py::arg("starts") = 5, py::arg("seed") = 0);

    m.def(
        "fit_json",
        [](const std::string& model, const Matrix& returns, std::optional<double> delta,
           std::vector<std::string> labels, int starts, std::uint64_t seed) {
            const ReturnPanel panel = panel_of(returns, std::move(labels));
            std::optional<TargetSpec> target;
            if (delta) target = build_target(sample_moments(panel), *delta);
            py::gil_scoped_release release;
            return to_json(fit_model(parse_model_kind(model), panel, target, options(starts, seed))).dump();
        },
        py::arg("model"), py::arg("returns"), py::arg("delta") = py::none(),
        py::arg("labels") = std::vector<std::string>{}, py::arg("starts") = 5, py::arg("seed") = 0);
    m.def(
        "simulate",
        [](const std::string& params_json, Eigen::Index t_len, std::uint64_t seed) {
            Json j;
            try {
                j = Json::parse(params_json);
            } catch (const nlohmann::json::parse_error& e) {
                throw ParseError(e.what(), 0, 0);
            }
            return simulate_model(fitted_model_from_json(j), t_len, seed).returns;
        },
        py::arg("params_json"), py::arg("t_len"), py::arg("seed"));
    m.def(
        "evaluate_json",
        [](const Matrix& returns, double delta, std::vector<std::string> models, std::vector<std::string> labels,
           std::uint64_t seed, Eigen::Index sim_len, int starts) {
            EvalConfig cfg;
            cfg.models = kinds(models);
            cfg.delta = delta;
            cfg.seed = seed;
            cfg.sim_len = sim_len;
            cfg.optimizer = options(starts, seed);
            const ReturnPanel panel = panel_of(returns, std::move(labels));
            py::gil_scoped_release release;
            return to_json(evaluate(panel, cfg)).dump();
        },
        py::arg("returns"), py::arg("delta"),
        py::arg("models") = std::vector<std::string>{"bekk", "bekk_mod", "dcc", "dcc_mod"},
        py::arg("labels") = std::vector<std::string>{}, py::arg("seed") = 0, py::arg("sim_len") = 0,
        py::arg("starts") = 5);
    m.def(
        "load_returns",
        [](const std::string& path) {
            ReturnPanel p = load_returns(path);
            return py::make_tuple(p.returns, p.labels, p.dates);
        },
        py::arg("path"));
}
