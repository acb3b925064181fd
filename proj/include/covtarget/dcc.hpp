#pragma once

#include "covtarget/garch.hpp"
#include "covtarget/linalg.hpp"
#include "covtarget/market_data.hpp"
#include "covtarget/optimizer.hpp"
#include "covtarget/targeting.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace covtarget {

/// Two-stage DCC(1,1):
///   Q_t = (1 − θ1 − θ2)·Q̂ + θ1·z_{t−1}z'_{t−1} + θ2·Q_{t−1},  Q_1 = Q̂
///   R_t = diag(Q_t)^{−1/2} Q_t diag(Q_t)^{−1/2}
struct DccParams {
    std::vector<Garch11Params> univariate;
    double theta1 = 0.0;
    double theta2 = 0.0;
    Matrix q_bar;

    Eigen::Index dim() const noexcept { return q_bar.rows(); }
    bool valid() const noexcept;
};

struct CorrPath {
    CovPath r;
    CovPath q;
};

struct DccStage1 {
    std::vector<Garch11Fit> fits;
    Matrix z;         ///< T×N standardized residuals
    Matrix variance;  ///< T×N conditional variances
    Vector h1;        ///< per-asset initial variance
    Matrix q_bar;     ///< sample correlation of z
};

struct DccObjective {
    double loglik = 0.0;
    double penalty = 0.0;  ///< Σ_t KL(Ẑ, R_t); 0 without a target
};

/// Per-asset GARCH(1,1) fits on the demeaned returns. Failures name the asset.
DccStage1 dcc_stage1(const ReturnPanel& r, const OptimizerOptions& opts);

CorrPath dcc_filter(const Matrix& z, const DccParams& p);

/// Fused stage-two evaluation; `z_hat` may be null.
DccObjective dcc_objective(const Matrix& z, double theta1, double theta2, const Matrix& q_bar, const Matrix* z_hat);

/// −½Σ_t(ln|R_t| + z'_t R_t⁻¹ z_t)
double dcc_stage2_loglik(const Matrix& z, const DccParams& p);

/// dcc_stage2_loglik − weight·Σ_t KL(Ẑ, R_t)
double dcc_modified_loglik(const Matrix& z, const DccParams& p, const TargetSpec& target, double weight = 1.0);

struct DccFit {
    DccParams params;
    DccStage1 stage1;
    double loglik = 0.0;
    double penalty = 0.0;
    FitReport report;
};

/// Stage two only, on given standardized residuals. Returns (θ1, θ2) and the report.
struct DccStage2Fit {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double loglik = 0.0;
    double penalty = 0.0;
    FitReport report;
};
DccStage2Fit dcc_fit_stage2(const Matrix& z, const Matrix& q_bar, const std::optional<TargetSpec>& target,
                            const OptimizerOptions& opts, double weight = 1.0);

/// Both stages; the target only enters stage two.
DccFit dcc_fit(const ReturnPanel& r, const std::optional<TargetSpec>& target, const OptimizerOptions& opts,
               double weight = 1.0);

/// H_t = D_t R_t D_t from conditional variances (T×N) and a correlation path.
CovPath dcc_covariance_path(const Matrix& variance, const CovPath& r);

/// Seeded simulation. `h1` holds initial per-asset variances; empty means
/// the unconditional GARCH variances.
ReturnPanel dcc_simulate(const DccParams& p, const Vector& mu, Eigen::Index t_len, std::uint64_t seed,
                         const Vector& h1 = Vector(), std::vector<std::string> labels = {});

}  // namespace covtarget
