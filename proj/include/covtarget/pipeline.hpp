#pragma once

#include "covtarget/bekk.hpp"
#include "covtarget/dcc.hpp"
#include "covtarget/market_data.hpp"
#include "covtarget/netgraph.hpp"
#include "covtarget/optimizer.hpp"
#include "covtarget/targeting.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace covtarget {

enum class ModelKind { Bekk, BekkMod, Dcc, DccMod };

std::string to_string(ModelKind kind);
/// Accepts bekk, bekk_mod, dcc, dcc_mod. Throws DomainError otherwise.
ModelKind parse_model_kind(const std::string& name);
bool is_modified(ModelKind kind);
bool is_bekk(ModelKind kind);

struct BekkState {
    BekkParams params;
    Matrix h1;
};

struct DccState {
    DccParams params;
    Vector h1;  ///< per-asset initial variances used by the stage-one filters
};

struct TargetInfo {
    double delta = 0.0;
    bool pd_adjusted = false;
};

struct FitDiagnostics {
    double loglik = 0.0;
    double penalty = 0.0;
    FitReport report;
};

/// A fitted model with everything needed to refilter or simulate it.
struct FittedModel {
    ModelKind kind = ModelKind::Bekk;
    std::vector<std::string> labels;
    Vector mu;
    Eigen::Index periods = 0;  ///< in-sample length, the default simulation length
    std::variant<BekkState, DccState> state;
    std::optional<TargetInfo> target;  ///< set for the modified variants
    FitDiagnostics fit;
};

/// Modified variants need `target`; it is ignored by the plain ones.
FittedModel fit_model(ModelKind kind, const ReturnPanel& panel, const std::optional<TargetSpec>& target,
                      const OptimizerOptions& opts);

/// In-sample conditional covariances H_t recomputed from the parameters.
CovPath fitted_covariance_path(const FittedModel& model, const ReturnPanel& panel);

/// Both families start from the in-sample initial state (sample covariance or
/// sample variances), so near-integrated fits do not start at a huge
/// unconditional level.
ReturnPanel simulate_model(const FittedModel& model, Eigen::Index t_len, std::uint64_t seed);

struct EvalConfig {
    std::vector<ModelKind> models;
    double delta = 0.0;
    Eigen::Index sim_len = 0;  ///< 0 means the in-sample length
    std::uint64_t seed = 0;
    OptimizerOptions optimizer;
};

struct ModelEvaluation {
    FittedModel model;
    double frobenius_target = 0.0;  ///< fitted path against Σ̂(delta)
    double frobenius_sample = 0.0;  ///< fitted path against the sample covariance
    double kl_target = 0.0;         ///< simulated-series KL against Σ̂(delta)
    double kl_sample = 0.0;         ///< simulated-series KL against the sample covariance
    ThresholdGraph simulated_graph;
    GraphComparison comparison;
};

struct EvalReport {
    std::vector<std::string> labels;
    double delta = 0.0;
    Eigen::Index periods = 0;
    Eigen::Index sim_len = 0;
    std::uint64_t seed = 0;
    TargetSpec target;
    ThresholdGraph observed_graph;
    CliqueSet observed_cliques;
    std::vector<ModelEvaluation> models;
};

/**
 * Simulated-series KL: ½[log(|Σ_S|/|Σ|) + Tr(Σ_S⁻¹ Σ) − N], the divergence
 * with the simulated sample covariance `simulated` in the second slot.
 */
double simulated_kl(const Matrix& simulated, const Matrix& reference);

/// Fit, simulate, graph and score every requested model.
EvalReport evaluate(const ReturnPanel& panel, const EvalConfig& config);

}  // namespace covtarget
