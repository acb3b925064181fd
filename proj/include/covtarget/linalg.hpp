#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace covtarget {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Sequence of T conditional covariance (or correlation) matrices.
using CovPath = std::vector<Matrix>;

inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kDefaultPdFloor = 1e-8;

/// (M + M')/2
Matrix symmetrize(const Matrix& m);

/// Throws ShapeError if `m` is not square or not symmetric to kSymmetryTol
/// (relative to the largest entry), DomainError on non-finite entries.
void require_symmetric(const Matrix& m, const char* what);

/**
 * Lower Cholesky factor of a symmetric positive definite matrix with its
 * cached log-determinant.
 *
 * All quadratic forms, traces against inverses and determinants in the
 * likelihood code go through this type; no explicit inverse is ever formed.
 */
class CholFactor {
public:
    /// Factorizes symmetrize(m). Throws NotPositiveDefiniteError on failure.
    explicit CholFactor(const Matrix& m);

    const Matrix& lower() const noexcept { return lower_; }
    double logdet() const noexcept { return logdet_; }
    Eigen::Index dim() const noexcept { return lower_.rows(); }

    /// v' M^{-1} v
    double quad_form(const Vector& v) const;
    /// Tr(M^{-1} P) for symmetric P.
    double trace_inv_times(const Matrix& p) const;
    /// M^{-1} b
    Matrix solve(const Matrix& b) const;
    /// Reconstructs L L'.
    Matrix reconstruct() const { return lower_ * lower_.transpose(); }

private:
    Matrix lower_;
    double logdet_ = 0.0;
};

/**
 * In-place lower Cholesky of the lower triangle of `m` into `out` (resized
 * on demand, never reallocated for a matching shape). Returns the 0-based
 * index of the first non-positive pivot, or -1 on success. The strictly
 * upper triangle of `out` is zeroed.
 */
Eigen::Index cholesky_into(const Matrix& m, Matrix& out);

CholFactor cholesky(const Matrix& m);

/// Result of an eigenvalue-clipping projection.
struct PdProjection {
    Matrix matrix;
    bool adjusted = false;
    double min_eigenvalue = 0.0;  ///< smallest eigenvalue of the input
};

/// Clips the eigenvalues of symmetrize(m) at `floor`. A matrix whose smallest
/// eigenvalue already reaches `floor` comes back unchanged with adjusted=false.
PdProjection project_pd(const Matrix& m, double floor = kDefaultPdFloor);

Matrix nearest_pd(const Matrix& m, double floor = kDefaultPdFloor);

/// Gaussian KL divergence ½[log(|Q|/|P|) + Tr(Q⁻¹P) − N].
double kl_divergence(const Matrix& p, const Matrix& q);

/// Same as kl_divergence with both factors precomputed.
double kl_divergence(const CholFactor& p, const CholFactor& q);

/// sqrt( Σ_t ‖H_t − target‖²_F )
double frobenius_path_loss(const CovPath& path, const Matrix& target);

/// Lower-triangular L with L L' = m.
Matrix chol_sqrt(const Matrix& m);

/// Pearson correlation of the columns of x (T×N), divisor-independent.
Matrix column_correlation(const Matrix& x);

/// Sample covariance of the columns of x with divisor T−1.
Matrix column_covariance(const Matrix& x);

}  // namespace covtarget
