#include "covtarget/dcc.hpp"

#include "covtarget/error.hpp"

#include <cmath>
#include <future>
#include <random>

namespace covtarget {
namespace {

void require_q_bar(const Matrix& q_bar) {
    require_symmetric(q_bar, "dcc q_bar");
    for (Eigen::Index i = 0; i < q_bar.rows(); ++i) {
        if (std::abs(q_bar(i, i) - 1.0) > 1e-10) throw DomainError("dcc: q_bar must have unit diagonal");
    }
}

void require_thetas(double theta1, double theta2) {
    if (!(theta1 >= 0.0 && theta2 >= 0.0 && theta1 + theta2 < 1.0)) {
        throw DomainError("dcc: require theta1 >= 0, theta2 >= 0, theta1 + theta2 < 1");
    }
}

void q_step(const Matrix& q_bar, double theta1, double theta2, const auto& z_prev, const Matrix& q_prev,
            Matrix& out) {
    out = (1.0 - theta1 - theta2) * q_bar;
    out.noalias() += theta1 * (z_prev * z_prev.transpose());
    out += theta2 * q_prev;
}

void rescale(const Matrix& q, Matrix& r) {
    const Vector inv_sd = q.diagonal().cwiseSqrt().cwiseInverse();
    r = inv_sd.asDiagonal() * q * inv_sd.asDiagonal();
    r.diagonal().setOnes();
}

}  // namespace

bool DccParams::valid() const noexcept {
    if (!(theta1 >= 0.0 && theta2 >= 0.0 && theta1 + theta2 < 1.0)) return false;
    if (q_bar.rows() != q_bar.cols() || static_cast<Eigen::Index>(univariate.size()) != q_bar.rows()) return false;
    for (const auto& g : univariate) {
        if (!g.valid()) return false;
    }
    return true;
}

DccStage1 dcc_stage1(const ReturnPanel& r, const OptimizerOptions& opts) {
    const Matrix eps = r.demeaned();
    const Eigen::Index n = eps.cols();
    std::vector<Vector> columns;
    for (Eigen::Index j = 0; j < n; ++j) columns.emplace_back(eps.col(j));

    auto fit_one = [&](Eigen::Index j) {
        const auto& col = columns[static_cast<std::size_t>(j)];
        const std::string& label = r.labels[static_cast<std::size_t>(j)];
        try {
            return garch11_fit(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), opts);
        } catch (const DegenerateSeriesError&) {
            throw DegenerateSeriesError(label);
        } catch (const InsufficientDataError& e) {
            throw InsufficientDataError(label + ": " + e.what());
        } catch (const Error& e) {
            throw EstimationError("stage one failed for " + label + ": " + e.what());
        }
    };

    DccStage1 out;
    if (opts.parallel && n > 1) {
        std::vector<std::future<Garch11Fit>> jobs;
        for (Eigen::Index j = 0; j < n; ++j) jobs.push_back(std::async(std::launch::async, fit_one, j));
        for (auto& job : jobs) out.fits.push_back(job.get());
    } else {
        for (Eigen::Index j = 0; j < n; ++j) out.fits.push_back(fit_one(j));
    }

    out.z.resize(eps.rows(), n);
    out.variance.resize(eps.rows(), n);
    out.h1.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto& col = columns[static_cast<std::size_t>(j)];
        const std::span<const double> s(col.data(), static_cast<std::size_t>(col.size()));
        out.h1(j) = initial_variance(s);
        const VariancePath path = garch11_filter(s, out.fits[static_cast<std::size_t>(j)].params, out.h1(j));
        out.z.col(j) = path.z;
        out.variance.col(j) = path.h;
    }
    out.q_bar = column_correlation(out.z);
    return out;
}

CorrPath dcc_filter(const Matrix& z, const DccParams& p) {
    require_thetas(p.theta1, p.theta2);
    require_q_bar(p.q_bar);
    if (z.cols() != p.dim()) throw ShapeError("dcc_filter: dimension mismatch");
    CorrPath path;
    path.q.reserve(static_cast<std::size_t>(z.rows()));
    path.r.reserve(static_cast<std::size_t>(z.rows()));
    for (Eigen::Index t = 0; t < z.rows(); ++t) {
        Matrix q(p.dim(), p.dim());
        if (t == 0) {
            q = p.q_bar;
        } else {
            q_step(p.q_bar, p.theta1, p.theta2, z.row(t - 1).transpose(), path.q.back(), q);
        }
        if (!q.allFinite()) throw NumericalOverflowError("dcc_filter", static_cast<std::size_t>(t));
        Matrix r;
        rescale(q, r);
        path.q.push_back(std::move(q));
        path.r.push_back(std::move(r));
    }
    return path;
}

DccObjective dcc_objective(const Matrix& z, double theta1, double theta2, const Matrix& q_bar, const Matrix* z_hat) {
    require_thetas(theta1, theta2);
    const Eigen::Index n = q_bar.rows();
    if (z.cols() != n) throw ShapeError("dcc: dimension mismatch");
    std::optional<CholFactor> target;
    if (z_hat != nullptr) {
        if (z_hat->rows() != n) throw ShapeError("dcc: target dimension mismatch");
        target.emplace(*z_hat);
    }

    Matrix q = q_bar;
    Matrix q_next(n, n);
    Matrix r(n, n);
    Matrix lower(n, n);
    Matrix x(n, n);
    Vector w(n);
    double quad_logdet = 0.0;
    double kl_sum = 0.0;
    for (Eigen::Index t = 0; t < z.rows(); ++t) {
        if (t > 0) {
            q_step(q_bar, theta1, theta2, z.row(t - 1).transpose(), q, q_next);
            q.swap(q_next);
        }
        if (!q.allFinite()) throw NumericalOverflowError("dcc likelihood", static_cast<std::size_t>(t));
        rescale(q, r);
        const Eigen::Index bad = cholesky_into(r, lower);
        if (bad >= 0) throw NotPositiveDefiniteError(static_cast<std::size_t>(bad));
        const double logdet = 2.0 * lower.diagonal().array().log().sum();
        w = z.row(t).transpose();
        lower.triangularView<Eigen::Lower>().solveInPlace(w);
        quad_logdet += logdet + w.squaredNorm();
        if (target) {
            x = target->lower();
            lower.triangularView<Eigen::Lower>().solveInPlace(x);
            kl_sum += 0.5 * (logdet - target->logdet() + x.squaredNorm() - static_cast<double>(n));
        }
    }
    return {-0.5 * quad_logdet, kl_sum};
}

double dcc_stage2_loglik(const Matrix& z, const DccParams& p) {
    require_q_bar(p.q_bar);
    return dcc_objective(z, p.theta1, p.theta2, p.q_bar, nullptr).loglik;
}

double dcc_modified_loglik(const Matrix& z, const DccParams& p, const TargetSpec& target, double weight) {
    require_q_bar(p.q_bar);
    const DccObjective o = dcc_objective(z, p.theta1, p.theta2, p.q_bar, &target.z_hat);
    return o.loglik - weight * o.penalty;
}

DccStage2Fit dcc_fit_stage2(const Matrix& z, const Matrix& q_bar, const std::optional<TargetSpec>& target,
                            const OptimizerOptions& opts, double weight) {
    require_q_bar(q_bar);
    if (target && target->z_hat.rows() != q_bar.rows()) throw ShapeError("dcc_fit: target dimension mismatch");
    const Transform transform{
        [](const Vector& u) {
            const auto [t1, t2] = reparam::simplex_pair(u(0), u(1));
            Vector x(2);
            x << t1, t2;
            return x;
        },
        [](const Vector& x) {
            const auto [u0, u1] = reparam::simplex_pair_inverse(x(0), x(1));
            Vector u(2);
            u << u0, u1;
            return u;
        }};
    const Matrix* z_hat = target ? &target->z_hat : nullptr;
    const Objective objective = [&z, &q_bar, z_hat, weight](const Vector& x) {
        const DccObjective o = dcc_objective(z, x(0), x(1), q_bar, z_hat);
        return o.loglik - weight * o.penalty;
    };
    Vector start(2);
    start << 0.05, 0.90;
    const OptimResult best = maximize(objective, transform, {start}, opts);

    DccStage2Fit fit;
    fit.theta1 = best.x(0);
    fit.theta2 = best.x(1);
    const DccObjective parts = dcc_objective(z, fit.theta1, fit.theta2, q_bar, z_hat);
    fit.loglik = parts.loglik;
    fit.penalty = parts.penalty;
    fit.report = best.report;
    return fit;
}

DccFit dcc_fit(const ReturnPanel& r, const std::optional<TargetSpec>& target, const OptimizerOptions& opts,
               double weight) {
    DccFit fit;
    fit.stage1 = dcc_stage1(r, opts);
    const DccStage2Fit s2 = dcc_fit_stage2(fit.stage1.z, fit.stage1.q_bar, target, opts, weight);
    for (const auto& g : fit.stage1.fits) fit.params.univariate.push_back(g.params);
    fit.params.theta1 = s2.theta1;
    fit.params.theta2 = s2.theta2;
    fit.params.q_bar = fit.stage1.q_bar;
    fit.loglik = s2.loglik;
    fit.penalty = s2.penalty;
    fit.report = s2.report;
    return fit;
}

CovPath dcc_covariance_path(const Matrix& variance, const CovPath& r) {
    if (static_cast<std::size_t>(variance.rows()) != r.size()) throw ShapeError("dcc_covariance_path: length mismatch");
    CovPath h;
    h.reserve(r.size());
    for (std::size_t t = 0; t < r.size(); ++t) {
        const Vector d = variance.row(static_cast<Eigen::Index>(t)).transpose().cwiseSqrt();
        if (d.size() != r[t].rows()) throw ShapeError("dcc_covariance_path: dimension mismatch");
        h.push_back(d.asDiagonal() * r[t] * d.asDiagonal());
    }
    return h;
}

ReturnPanel dcc_simulate(const DccParams& p, const Vector& mu, Eigen::Index t_len, std::uint64_t seed,
                         const Vector& h1, std::vector<std::string> labels) {
    if (!p.valid()) throw DomainError("dcc_simulate: invalid parameters");
    require_q_bar(p.q_bar);
    const Eigen::Index n = p.dim();
    if (mu.size() != n) throw ShapeError("dcc_simulate: mean has wrong length");
    if (t_len < 1) throw DomainError("dcc_simulate: length must be positive");

    Vector h(n);
    if (h1.size() == 0) {
        for (Eigen::Index j = 0; j < n; ++j) h(j) = p.univariate[static_cast<std::size_t>(j)].unconditional_variance();
    } else {
        if (h1.size() != n) throw ShapeError("dcc_simulate: h1 has wrong length");
        h = h1;
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix out(t_len, n);
    Matrix q = p.q_bar;
    Matrix q_next(n, n);
    Matrix r(n, n);
    Matrix lower(n, n);
    Vector eta(n);
    Vector z(n);
    for (Eigen::Index t = 0; t < t_len; ++t) {
        if (t > 0) {
            q_step(p.q_bar, p.theta1, p.theta2, z, q, q_next);
            q.swap(q_next);
            for (Eigen::Index j = 0; j < n; ++j) {
                const auto& g = p.univariate[static_cast<std::size_t>(j)];
                const double e = out(t - 1, j) - mu(j);
                h(j) = g.omega + g.alpha * e * e + g.beta * h(j);
            }
        }
        if (!q.allFinite() || !h.allFinite()) throw NumericalOverflowError("dcc_simulate", static_cast<std::size_t>(t));
        rescale(q, r);
        const Eigen::Index bad = cholesky_into(r, lower);
        if (bad >= 0) throw NotPositiveDefiniteError(static_cast<std::size_t>(bad));
        for (Eigen::Index i = 0; i < n; ++i) eta(i) = normal(rng);
        z.noalias() = lower.triangularView<Eigen::Lower>() * eta;
        out.row(t) = (mu + h.cwiseSqrt().cwiseProduct(z)).transpose();
    }
    return make_return_panel(std::move(out), std::move(labels));
}

}  // namespace covtarget
