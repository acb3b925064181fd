#include "covtarget/targeting.hpp"

#include "covtarget/error.hpp"

#include <cmath>

namespace covtarget {

Matrix threshold_correlation(const Matrix& corr, double delta) {
    if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("threshold delta must lie in [0, 1)");
    require_symmetric(corr, "threshold_correlation");
    Matrix z = corr;
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        for (Eigen::Index j = 0; j < z.cols(); ++j) {
            if (i == j) {
                z(i, j) = 1.0;
            } else if (!(std::abs(corr(i, j)) > delta)) {
                z(i, j) = 0.0;
            }
        }
    }
    return z;
}

TargetSpec target_covariance(Matrix z_thresholded, double delta, const SampleMoments& moments, double floor) {
    if (z_thresholded.rows() != moments.gamma.rows()) throw ShapeError("target_covariance: dimension mismatch");
    TargetSpec spec;
    spec.delta = delta;
    PdProjection proj = project_pd(z_thresholded, floor);
    spec.z_thresholded = std::move(z_thresholded);
    if (proj.adjusted) {
        const Vector inv_sd = proj.matrix.diagonal().cwiseSqrt().cwiseInverse();
        Matrix z = symmetrize(inv_sd.asDiagonal() * proj.matrix * inv_sd.asDiagonal());
        z.diagonal().setOnes();
        spec.z_hat = std::move(z);
        spec.pd_adjusted = true;
    } else {
        spec.z_hat = spec.z_thresholded;
    }
    const Vector sd = moments.gamma.diagonal();
    spec.sigma_hat = symmetrize(sd.asDiagonal() * spec.z_hat * sd.asDiagonal());
    return spec;
}

TargetSpec build_target(const SampleMoments& moments, double delta, double floor) {
    return target_covariance(threshold_correlation(moments.corr, delta), delta, moments, floor);
}

}  // namespace covtarget
