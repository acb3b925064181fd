#pragma once

#include "covtarget/linalg.hpp"
#include "covtarget/optimizer.hpp"

#include <span>

namespace covtarget {

/// h_t = omega + alpha·eps²_{t−1} + beta·h_{t−1}
struct Garch11Params {
    double omega = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    bool valid() const noexcept;
    /// omega / (1 − alpha − beta)
    double unconditional_variance() const noexcept;
};

struct VariancePath {
    Vector h;  ///< conditional variances
    Vector z;  ///< standardized residuals eps_t / sqrt(h_t)
};

struct Garch11Fit {
    Garch11Params params;
    bool converged = false;
    double grad_norm = 0.0;
    double loglik = 0.0;
    FitReport report;
};

inline constexpr Eigen::Index kGarchMinObservations = 50;

/// Throws DomainError on invalid params or h1 <= 0, NumericalOverflowError
/// on a non-finite variance.
VariancePath garch11_filter(std::span<const double> eps, const Garch11Params& p, double h1);

/// Gaussian quasi log-likelihood −½Σ(ln 2π + ln h_t + eps²_t/h_t).
double garch11_loglik(std::span<const double> eps, const Garch11Params& p, double h1);

/// Sample variance (divisor T−1) used as h1 throughout.
double initial_variance(std::span<const double> eps);

/**
 * Quasi-ML estimate with h1 set to the sample variance of `eps`.
 * Throws DegenerateSeriesError for a constant series and
 * InsufficientDataError below `min_obs` observations.
 */
Garch11Fit garch11_fit(std::span<const double> eps, const OptimizerOptions& opts,
                       Eigen::Index min_obs = kGarchMinObservations);

}  // namespace covtarget
