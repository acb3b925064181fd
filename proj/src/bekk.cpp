#include "covtarget/bekk.hpp"

#include "covtarget/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace covtarget {
namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void require_inputs(const Matrix& eps, const BekkParams& p, const Matrix& h1) {
    if (!p.valid()) throw DomainError("bekk: invalid parameters");
    if (eps.cols() != p.dim() || h1.rows() != p.dim() || h1.cols() != p.dim()) {
        throw ShapeError("bekk: dimension mismatch between data, parameters and h1");
    }
}

// One step of the recursion into `out`; aa and bb are outer products of the diagonals.
void bekk_step(const Matrix& cc, const Matrix& aa, const Matrix& bb, const auto& e_prev, const Matrix& h_prev,
               Matrix& out) {
    out = cc;
    out.noalias() += aa.cwiseProduct(e_prev * e_prev.transpose());
    out += bb.cwiseProduct(h_prev);
}

}  // namespace

bool BekkParams::valid() const noexcept {
    const Eigen::Index n = dim();
    if (c_lower.cols() != n || a_diag.size() != n || b_diag.size() != n || n == 0) return false;
    if (!c_lower.allFinite() || !a_diag.allFinite() || !b_diag.allFinite()) return false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (c_lower(i, i) < 0.0 || a_diag(i) < 0.0 || b_diag(i) < 0.0) return false;
        if (a_diag(i) * a_diag(i) + b_diag(i) * b_diag(i) >= 1.0) return false;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (c_lower(i, j) != 0.0) return false;
        }
    }
    return true;
}

Matrix BekkParams::unconditional_covariance() const {
    const Matrix cc = intercept();
    Matrix s(dim(), dim());
    for (Eigen::Index i = 0; i < dim(); ++i) {
        for (Eigen::Index j = 0; j < dim(); ++j) {
            s(i, j) = cc(i, j) / (1.0 - a_diag(i) * a_diag(j) - b_diag(i) * b_diag(j));
        }
    }
    return s;
}

Vector BekkParams::pack() const {
    const Eigen::Index n = dim();
    Vector x(parameter_count(n));
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) x(k++) = c_lower(i, j);
    }
    x.segment(k, n) = a_diag;
    x.segment(k + n, n) = b_diag;
    return x;
}

BekkParams BekkParams::unpack(const Vector& x, Eigen::Index n) {
    if (x.size() != parameter_count(n)) throw ShapeError("bekk: parameter vector has wrong length");
    BekkParams p{Matrix::Zero(n, n), Vector(n), Vector(n)};
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) p.c_lower(i, j) = x(k++);
    }
    p.a_diag = x.segment(k, n);
    p.b_diag = x.segment(k + n, n);
    return p;
}

CovPath bekk_filter(const Matrix& eps, const BekkParams& p, const Matrix& h1) {
    require_inputs(eps, p, h1);
    require_symmetric(h1, "bekk_filter h1");
    const Matrix cc = p.intercept();
    const Matrix aa = p.a_diag * p.a_diag.transpose();
    const Matrix bb = p.b_diag * p.b_diag.transpose();
    CovPath path;
    path.reserve(static_cast<std::size_t>(eps.rows()));
    for (Eigen::Index t = 0; t < eps.rows(); ++t) {
        Matrix h(p.dim(), p.dim());
        if (t == 0) {
            h = symmetrize(h1);
        } else {
            bekk_step(cc, aa, bb, eps.row(t - 1).transpose(), path.back(), h);
        }
        if (!h.allFinite()) throw NumericalOverflowError("bekk_filter", static_cast<std::size_t>(t));
        path.push_back(std::move(h));
    }
    return path;
}

BekkObjective bekk_objective(const Matrix& eps, const BekkParams& p, const Matrix& h1, const Matrix* sigma_hat) {
    require_inputs(eps, p, h1);
    const Eigen::Index n = p.dim();
    const Matrix cc = p.intercept();
    const Matrix aa = p.a_diag * p.a_diag.transpose();
    const Matrix bb = p.b_diag * p.b_diag.transpose();

    std::optional<CholFactor> target;
    if (sigma_hat != nullptr) {
        if (sigma_hat->rows() != n) throw ShapeError("bekk: target dimension mismatch");
        target.emplace(*sigma_hat);
    }

    Matrix h = symmetrize(h1);
    Matrix h_next(n, n);
    Matrix lower(n, n);
    Vector w(n);
    Matrix x(n, n);
    double quad_logdet = 0.0;
    double kl_sum = 0.0;
    for (Eigen::Index t = 0; t < eps.rows(); ++t) {
        if (t > 0) {
            bekk_step(cc, aa, bb, eps.row(t - 1).transpose(), h, h_next);
            h.swap(h_next);
        }
        if (!h.allFinite()) throw NumericalOverflowError("bekk likelihood", static_cast<std::size_t>(t));
        const Eigen::Index bad = cholesky_into(h, lower);
        if (bad >= 0) throw NotPositiveDefiniteError(static_cast<std::size_t>(bad));
        const double logdet = 2.0 * lower.diagonal().array().log().sum();
        w = eps.row(t).transpose();
        lower.triangularView<Eigen::Lower>().solveInPlace(w);
        quad_logdet += logdet + w.squaredNorm();
        if (target) {
            x = target->lower();
            lower.triangularView<Eigen::Lower>().solveInPlace(x);
            kl_sum += 0.5 * (logdet - target->logdet() + x.squaredNorm() - static_cast<double>(n));
        }
    }
    const double t_len = static_cast<double>(eps.rows());
    return {-0.5 * t_len * static_cast<double>(n) * kLog2Pi - 0.5 * quad_logdet, kl_sum};
}

double bekk_loglik(const Matrix& eps, const BekkParams& p, const Matrix& h1) {
    return bekk_objective(eps, p, h1, nullptr).loglik;
}

double bekk_loglik(const Matrix& eps, const BekkParams& p) {
    return bekk_loglik(eps, p, column_covariance(eps));
}

double bekk_modified_loglik(const Matrix& eps, const BekkParams& p, const Matrix& h1, const TargetSpec& target,
                            double weight) {
    const BekkObjective o = bekk_objective(eps, p, h1, &target.sigma_hat);
    return o.loglik - weight * o.penalty;
}

double bekk_modified_loglik(const Matrix& eps, const BekkParams& p, const TargetSpec& target, double weight) {
    return bekk_modified_loglik(eps, p, column_covariance(eps), target, weight);
}

BekkFit bekk_fit(const Matrix& eps, const std::optional<TargetSpec>& target, const OptimizerOptions& opts,
                 double weight) {
    const Eigen::Index n = eps.cols();
    const Eigen::Index k = BekkParams::parameter_count(n);
    if (n < 1) throw ShapeError("bekk_fit: no assets");
    if (eps.rows() < k + 10) {
        throw InsufficientDataError("bekk_fit needs at least " + std::to_string(k + 10) + " observations, got " +
                                    std::to_string(eps.rows()));
    }
    if (target && target->sigma_hat.rows() != n) throw ShapeError("bekk_fit: target dimension mismatch");

    const Matrix h1 = column_covariance(eps);
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!(h1(j, j) > 0.0)) throw DegenerateSeriesError("column " + std::to_string(j));
    }

    const Transform transform{
        [n](const Vector& u) {
            Vector x(u.size());
            Eigen::Index k2 = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j <= i; ++j, ++k2) x(k2) = (i == j) ? reparam::positive(u(k2)) : u(k2);
            }
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto [a, b] = reparam::radial_pair(u(k2 + i), u(k2 + n + i));
                x(k2 + i) = a;
                x(k2 + n + i) = b;
            }
            return x;
        },
        [n](const Vector& x) {
            Vector u(x.size());
            Eigen::Index k2 = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j <= i; ++j, ++k2) u(k2) = (i == j) ? reparam::positive_inverse(x(k2)) : x(k2);
            }
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto [ur, ua] = reparam::radial_pair_inverse(x(k2 + i), x(k2 + n + i));
                u(k2 + i) = ur;
                u(k2 + n + i) = ua;
            }
            return u;
        }};

    const Matrix* sigma = target ? &target->sigma_hat : nullptr;
    const Objective objective = [&eps, &h1, sigma, n, weight](const Vector& x) {
        const BekkObjective o = bekk_objective(eps, BekkParams::unpack(x, n), h1, sigma);
        return o.loglik - weight * o.penalty;
    };

    // moment-matched start: a = 0.3, b = 0.9 everywhere, CC' = (1 − a² − b²)·S
    constexpr double a0 = 0.3;
    constexpr double b0 = 0.9;
    BekkParams start{chol_sqrt(symmetrize((1.0 - a0 * a0 - b0 * b0) * h1)), Vector::Constant(n, a0),
                     Vector::Constant(n, b0)};
    const OptimResult best = maximize(objective, transform, {start.pack()}, opts);

    BekkFit fit;
    fit.params = BekkParams::unpack(best.x, n);
    fit.h1 = h1;
    const BekkObjective parts = bekk_objective(eps, fit.params, h1, sigma);
    fit.loglik = parts.loglik;
    fit.penalty = parts.penalty;
    fit.report = best.report;
    return fit;
}

ReturnPanel bekk_simulate(const BekkParams& p, const Vector& mu, Eigen::Index t_len, std::uint64_t seed,
                          const Matrix& h1, std::vector<std::string> labels) {
    if (!p.valid()) throw DomainError("bekk_simulate: invalid parameters");
    const Eigen::Index n = p.dim();
    if (mu.size() != n || h1.rows() != n || h1.cols() != n) throw ShapeError("bekk_simulate: dimension mismatch");
    if (t_len < 1) throw DomainError("bekk_simulate: length must be positive");

    const Matrix cc = p.intercept();
    const Matrix aa = p.a_diag * p.a_diag.transpose();
    const Matrix bb = p.b_diag * p.b_diag.transpose();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    Matrix out(t_len, n);
    Matrix h = symmetrize(h1);
    Matrix h_next(n, n);
    Matrix lower(n, n);
    Vector eta(n);
    Vector e(n);
    for (Eigen::Index t = 0; t < t_len; ++t) {
        if (t > 0) {
            bekk_step(cc, aa, bb, e, h, h_next);
            h.swap(h_next);
        }
        if (!h.allFinite()) throw NumericalOverflowError("bekk_simulate", static_cast<std::size_t>(t));
        const Eigen::Index bad = cholesky_into(h, lower);
        if (bad >= 0) throw NotPositiveDefiniteError(static_cast<std::size_t>(bad));
        for (Eigen::Index i = 0; i < n; ++i) eta(i) = normal(rng);
        e.noalias() = lower.triangularView<Eigen::Lower>() * eta;
        out.row(t) = (mu + e).transpose();
    }
    return make_return_panel(std::move(out), std::move(labels));
}

}  // namespace covtarget
