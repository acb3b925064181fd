#include "covtarget/linalg.hpp"

#include "covtarget/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace covtarget {

Matrix symmetrize(const Matrix& m) {
    return 0.5 * (m + m.transpose());
}

void require_symmetric(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw ShapeError(std::string(what) + ": matrix is not square");
    }
    if (!m.allFinite()) {
        throw DomainError(std::string(what) + ": matrix has non-finite entries");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
        throw ShapeError(std::string(what) + ": matrix is not symmetric");
    }
}

Eigen::Index cholesky_into(const Matrix& m, Matrix& out) {
    const Eigen::Index n = m.rows();
    if (out.rows() != n || out.cols() != n) out.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = m(j, j);
        for (Eigen::Index k = 0; k < j; ++k) d -= out(j, k) * out(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return j;
        const double ljj = std::sqrt(d);
        out(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            // lower triangle of a symmetric input; m(i, j) with i > j
            double s = 0.5 * (m(i, j) + m(j, i));
            for (Eigen::Index k = 0; k < j; ++k) s -= out(i, k) * out(j, k);
            out(i, j) = s / ljj;
        }
        for (Eigen::Index i = 0; i < j; ++i) out(i, j) = 0.0;
    }
    return -1;
}

CholFactor::CholFactor(const Matrix& m) {
    if (m.rows() != m.cols()) throw ShapeError("cholesky: matrix is not square");
    const Eigen::Index bad = cholesky_into(m, lower_);
    if (bad >= 0) throw NotPositiveDefiniteError(static_cast<std::size_t>(bad));
    logdet_ = 2.0 * lower_.diagonal().array().log().sum();
}

double CholFactor::quad_form(const Vector& v) const {
    const Vector w = lower_.triangularView<Eigen::Lower>().solve(v);
    return w.squaredNorm();
}

double CholFactor::trace_inv_times(const Matrix& p) const {
    // Tr(L⁻ᵀ L⁻¹ P) = Tr(L⁻¹ P L⁻ᵀ)
    const Matrix x = lower_.triangularView<Eigen::Lower>().solve(p);
    const Matrix y = lower_.triangularView<Eigen::Lower>().solve(x.transpose());
    return y.trace();
}

Matrix CholFactor::solve(const Matrix& b) const {
    const Matrix x = lower_.triangularView<Eigen::Lower>().solve(b);
    return lower_.transpose().triangularView<Eigen::Upper>().solve(x);
}

CholFactor cholesky(const Matrix& m) {
    require_symmetric(m, "cholesky");
    return CholFactor(m);
}

PdProjection project_pd(const Matrix& m, double floor) {
    require_symmetric(m, "nearest_pd");
    if (!(floor > 0.0)) throw DomainError("nearest_pd: floor must be positive");
    const Matrix s = symmetrize(m);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    PdProjection out;
    out.min_eigenvalue = eig.eigenvalues().minCoeff();
    if (out.min_eigenvalue >= floor) {
        out.matrix = s;
        return out;
    }
    const Vector clipped = eig.eigenvalues().cwiseMax(floor);
    out.matrix = symmetrize(eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose());
    out.adjusted = true;
    return out;
}

Matrix nearest_pd(const Matrix& m, double floor) {
    return project_pd(m, floor).matrix;
}

double kl_divergence(const CholFactor& p, const CholFactor& q) {
    if (p.dim() != q.dim()) throw ShapeError("kl_divergence: dimension mismatch");
    // Tr(Q⁻¹P) = ‖Lq⁻¹ Lp‖²_F
    const Matrix x = q.lower().triangularView<Eigen::Lower>().solve(p.lower());
    return 0.5 * (q.logdet() - p.logdet() + x.squaredNorm() - static_cast<double>(p.dim()));
}

double kl_divergence(const Matrix& p, const Matrix& q) {
    if (p.rows() != q.rows() || p.cols() != q.cols()) {
        throw ShapeError("kl_divergence: dimension mismatch");
    }
    return kl_divergence(cholesky(p), cholesky(q));
}

double frobenius_path_loss(const CovPath& path, const Matrix& target) {
    double total = 0.0;
    for (const Matrix& h : path) {
        if (h.rows() != target.rows() || h.cols() != target.cols()) {
            throw ShapeError("frobenius_path_loss: dimension mismatch");
        }
        total += (h - target).squaredNorm();
    }
    return std::sqrt(total);
}

Matrix chol_sqrt(const Matrix& m) {
    return cholesky(m).lower();
}

Matrix column_covariance(const Matrix& x) {
    if (x.rows() < 2) throw InsufficientDataError("covariance needs at least two rows");
    const Matrix centered = x.rowwise() - x.colwise().mean();
    return symmetrize(centered.transpose() * centered / static_cast<double>(x.rows() - 1));
}

Matrix column_correlation(const Matrix& x) {
    const Matrix cov = column_covariance(x);
    const Vector inv_sd = cov.diagonal().cwiseSqrt().cwiseInverse();
    Matrix corr = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
    for (Eigen::Index i = 0; i < corr.rows(); ++i) {
        corr(i, i) = 1.0;
        for (Eigen::Index j = 0; j < corr.cols(); ++j) {
            corr(i, j) = std::clamp(corr(i, j), -1.0, 1.0);
        }
    }
    return symmetrize(corr);
}

}  // namespace covtarget
