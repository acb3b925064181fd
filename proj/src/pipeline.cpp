#include "covtarget/pipeline.hpp"

#include "covtarget/error.hpp"

#include <future>

namespace covtarget {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Bekk: return "bekk";
        case ModelKind::BekkMod: return "bekk_mod";
        case ModelKind::Dcc: return "dcc";
        case ModelKind::DccMod: return "dcc_mod";
    }
    return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "bekk") return ModelKind::Bekk;
    if (name == "bekk_mod") return ModelKind::BekkMod;
    if (name == "dcc") return ModelKind::Dcc;
    if (name == "dcc_mod") return ModelKind::DccMod;
    throw DomainError("unknown model '" + name + "' (expected bekk, bekk_mod, dcc or dcc_mod)");
}

bool is_modified(ModelKind kind) {
    return kind == ModelKind::BekkMod || kind == ModelKind::DccMod;
}

bool is_bekk(ModelKind kind) {
    return kind == ModelKind::Bekk || kind == ModelKind::BekkMod;
}

FittedModel fit_model(ModelKind kind, const ReturnPanel& panel, const std::optional<TargetSpec>& target,
                      const OptimizerOptions& opts) {
    if (is_modified(kind) && !target) throw DomainError(to_string(kind) + " requires a target (delta)");
    const std::optional<TargetSpec> used = is_modified(kind) ? target : std::nullopt;

    FittedModel m;
    m.kind = kind;
    m.labels = panel.labels;
    m.mu = panel.mean;
    m.periods = panel.periods();
    if (used) m.target = TargetInfo{used->delta, used->pd_adjusted};
    if (is_bekk(kind)) {
        BekkFit fit = bekk_fit(panel.demeaned(), used, opts);
        m.state = BekkState{std::move(fit.params), std::move(fit.h1)};
        m.fit = {fit.loglik, fit.penalty, std::move(fit.report)};
    } else {
        DccFit fit = dcc_fit(panel, used, opts);
        m.state = DccState{std::move(fit.params), std::move(fit.stage1.h1)};
        m.fit = {fit.loglik, fit.penalty, std::move(fit.report)};
    }
    return m;
}

CovPath fitted_covariance_path(const FittedModel& model, const ReturnPanel& panel) {
    const Matrix eps = panel.returns.rowwise() - model.mu.transpose();
    if (const auto* b = std::get_if<BekkState>(&model.state)) return bekk_filter(eps, b->params, b->h1);

    const auto& d = std::get<DccState>(model.state);
    const Eigen::Index n = eps.cols();
    if (d.params.dim() != n || d.h1.size() != n) throw ShapeError("fitted_covariance_path: dimension mismatch");
    Matrix z(eps.rows(), n);
    Matrix variance(eps.rows(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Vector col = eps.col(j);
        const VariancePath vp = garch11_filter(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
                                               d.params.univariate[static_cast<std::size_t>(j)], d.h1(j));
        z.col(j) = vp.z;
        variance.col(j) = vp.h;
    }
    return dcc_covariance_path(variance, dcc_filter(z, d.params).r);
}

ReturnPanel simulate_model(const FittedModel& model, Eigen::Index t_len, std::uint64_t seed) {
    if (const auto* b = std::get_if<BekkState>(&model.state)) {
        return bekk_simulate(b->params, model.mu, t_len, seed, b->h1, model.labels);
    }
    const auto& d = std::get<DccState>(model.state);
    return dcc_simulate(d.params, model.mu, t_len, seed, d.h1, model.labels);
}

double simulated_kl(const Matrix& simulated, const Matrix& reference) {
    return kl_divergence(reference, simulated);
}

EvalReport evaluate(const ReturnPanel& panel, const EvalConfig& config) {
    if (config.models.empty()) throw DomainError("evaluate: no models requested");
    const SampleMoments moments = sample_moments(panel);

    EvalReport report;
    report.labels = panel.labels;
    report.delta = config.delta;
    report.periods = panel.periods();
    report.sim_len = config.sim_len > 0 ? config.sim_len : panel.periods();
    if (report.sim_len < 2) throw DomainError("evaluate: simulation length must be at least 2");
    report.seed = config.seed;
    report.target = build_target(moments, config.delta);
    report.observed_graph = build_graph(moments.corr, panel.labels, config.delta);
    report.observed_cliques = maximal_cliques(report.observed_graph);

    OptimizerOptions opts = config.optimizer;
    opts.seed = config.seed;

    auto run_one = [&](ModelKind kind) {
        ModelEvaluation ev;
        ev.model = fit_model(kind, panel, report.target, opts);
        const CovPath path = fitted_covariance_path(ev.model, panel);
        ev.frobenius_target = frobenius_path_loss(path, report.target.sigma_hat);
        ev.frobenius_sample = frobenius_path_loss(path, moments.cov);

        const ReturnPanel sim = simulate_model(ev.model, report.sim_len, config.seed);
        const Matrix sim_cov = column_covariance(sim.returns);
        ev.kl_target = simulated_kl(sim_cov, report.target.sigma_hat);
        ev.kl_sample = simulated_kl(sim_cov, moments.cov);
        ev.simulated_graph = build_graph(column_correlation(sim.returns), panel.labels, config.delta);
        ev.comparison = compare_graphs(report.observed_graph, ev.simulated_graph);
        return ev;
    };

    if (config.optimizer.parallel && config.models.size() > 1) {
        std::vector<std::future<ModelEvaluation>> jobs;
        for (ModelKind kind : config.models) jobs.push_back(std::async(std::launch::async, run_one, kind));
        for (auto& job : jobs) report.models.push_back(job.get());
    } else {
        for (ModelKind kind : config.models) report.models.push_back(run_one(kind));
    }
    return report;
}

}  // namespace covtarget
