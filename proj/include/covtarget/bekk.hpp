#pragma once

#include "covtarget/linalg.hpp"
#include "covtarget/market_data.hpp"
#include "covtarget/optimizer.hpp"
#include "covtarget/targeting.hpp"

#include <cstdint>
#include <optional>

namespace covtarget {

/// Diagonal BEKK(1,1): H_t = CC' + A ε_{t−1}ε'_{t−1} A' + B H_{t−1} B'
/// with A = diag(a_diag), B = diag(b_diag).
struct BekkParams {
    Matrix c_lower;
    Vector a_diag;
    Vector b_diag;

    Eigen::Index dim() const noexcept { return c_lower.rows(); }
    /// Shapes agree, C lower triangular with nonnegative diagonal,
    /// a, b >= 0 and a_i² + b_i² < 1.
    bool valid() const noexcept;
    Matrix intercept() const { return c_lower * c_lower.transpose(); }
    /// Σ_ij = (CC')_ij / (1 − a_i a_j − b_i b_j)
    Matrix unconditional_covariance() const;

    static Eigen::Index parameter_count(Eigen::Index n) { return n * (n + 1) / 2 + 2 * n; }
    /// C (lower triangle, row-major), then a, then b.
    Vector pack() const;
    static BekkParams unpack(const Vector& x, Eigen::Index n);
};

/// Objective split into its likelihood and KL-penalty parts.
struct BekkObjective {
    double loglik = 0.0;
    double penalty = 0.0;  ///< Σ_t KL(Σ̂, H_t); 0 without a target
};

CovPath bekk_filter(const Matrix& eps, const BekkParams& p, const Matrix& h1);

/// Evaluates likelihood and (optionally) the penalty in one pass without
/// storing the path. `sigma_hat` may be null.
BekkObjective bekk_objective(const Matrix& eps, const BekkParams& p, const Matrix& h1, const Matrix* sigma_hat);

/// H1 = sample covariance of eps.
double bekk_loglik(const Matrix& eps, const BekkParams& p);
double bekk_loglik(const Matrix& eps, const BekkParams& p, const Matrix& h1);

/// bekk_loglik − weight·Σ_t KL(Σ̂, H_t).
double bekk_modified_loglik(const Matrix& eps, const BekkParams& p, const TargetSpec& target, double weight = 1.0);
double bekk_modified_loglik(const Matrix& eps, const BekkParams& p, const Matrix& h1, const TargetSpec& target,
                            double weight = 1.0);

struct BekkFit {
    BekkParams params;
    Matrix h1;
    double loglik = 0.0;
    double penalty = 0.0;
    FitReport report;
};

/// Maximizes the plain (no target) or modified likelihood.
/// Throws InsufficientDataError when T < parameter count + 10.
BekkFit bekk_fit(const Matrix& eps, const std::optional<TargetSpec>& target, const OptimizerOptions& opts,
                 double weight = 1.0);

/// Seeded simulation of T returns r_t = mu + chol(H_t)·eta_t.
ReturnPanel bekk_simulate(const BekkParams& p, const Vector& mu, Eigen::Index t_len, std::uint64_t seed,
                          const Matrix& h1, std::vector<std::string> labels = {});

}  // namespace covtarget
