#pragma once

#include "covtarget/linalg.hpp"
#include "covtarget/market_data.hpp"

namespace covtarget {

/**
 * Thresholded correlation target and its covariance-scale counterpart.
 *
 * `z_thresholded` keeps the raw thresholded matrix (off-diagonal entries
 * zeroed where |rho| <= delta). `z_hat` is the matrix actually used as a
 * target: equal to `z_thresholded` unless it had to be repaired into a
 * positive definite correlation matrix, in which case `pd_adjusted` is set.
 */
struct TargetSpec {
    double delta = 0.0;
    Matrix z_thresholded;
    Matrix z_hat;
    Matrix sigma_hat;
    bool pd_adjusted = false;
};

/// Off-diagonal rho_ij kept iff |rho_ij| > delta, unit diagonal.
/// Throws DomainError unless 0 <= delta < 1.
Matrix threshold_correlation(const Matrix& corr, double delta);

/**
 * Fills `z_hat` and `sigma_hat = Γ·z_hat·Γ` from a thresholded matrix.
 * A non-PD (or below-floor) thresholded matrix is clipped at `floor`
 * and rescaled back to unit diagonal.
 */
TargetSpec target_covariance(Matrix z_thresholded, double delta, const SampleMoments& moments,
                             double floor = kDefaultPdFloor);

/// threshold_correlation followed by target_covariance.
TargetSpec build_target(const SampleMoments& moments, double delta, double floor = kDefaultPdFloor);

}  // namespace covtarget
