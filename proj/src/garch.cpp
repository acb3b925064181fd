#include "covtarget/garch.hpp"

#include "covtarget/error.hpp"

#include <cmath>
#include <numbers>

namespace covtarget {
namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

Vector to_vector(std::span<const double> s) {
    return Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size()));
}

Garch11Params from_unconstrained(const Vector& u) {
    const auto [a, b] = reparam::simplex_pair(u(1), u(2));
    return {reparam::positive(u(0)), a, b};
}

}  // namespace

bool Garch11Params::valid() const noexcept {
    return omega > 0.0 && alpha >= 0.0 && beta >= 0.0 && alpha + beta < 1.0 && std::isfinite(omega);
}

double Garch11Params::unconditional_variance() const noexcept {
    return omega / (1.0 - alpha - beta);
}

VariancePath garch11_filter(std::span<const double> eps, const Garch11Params& p, double h1) {
    if (!p.valid()) throw DomainError("garch11_filter: invalid parameters");
    if (!(h1 > 0.0)) throw DomainError("garch11_filter: h1 must be positive");
    const auto t_len = static_cast<Eigen::Index>(eps.size());
    VariancePath path{Vector(t_len), Vector(t_len)};
    double h = h1;
    for (Eigen::Index t = 0; t < t_len; ++t) {
        if (t > 0) {
            const double e = eps[static_cast<std::size_t>(t - 1)];
            h = p.omega + p.alpha * e * e + p.beta * h;
        }
        if (!std::isfinite(h) || !(h > 0.0)) throw NumericalOverflowError("garch11_filter", static_cast<std::size_t>(t));
        path.h(t) = h;
        path.z(t) = eps[static_cast<std::size_t>(t)] / std::sqrt(h);
    }
    return path;
}

double garch11_loglik(std::span<const double> eps, const Garch11Params& p, double h1) {
    if (!p.valid()) throw DomainError("garch11_loglik: invalid parameters");
    double h = h1;
    double total = 0.0;
    for (std::size_t t = 0; t < eps.size(); ++t) {
        if (t > 0) h = p.omega + p.alpha * eps[t - 1] * eps[t - 1] + p.beta * h;
        if (!std::isfinite(h) || !(h > 0.0)) throw NumericalOverflowError("garch11_loglik", t);
        total += kLog2Pi + std::log(h) + eps[t] * eps[t] / h;
    }
    return -0.5 * total;
}

double initial_variance(std::span<const double> eps) {
    const Vector v = to_vector(eps);
    if (v.size() < 2) throw InsufficientDataError("variance needs at least two observations");
    return (v.array() - v.mean()).square().sum() / static_cast<double>(v.size() - 1);
}

Garch11Fit garch11_fit(std::span<const double> eps, const OptimizerOptions& opts, Eigen::Index min_obs) {
    if (static_cast<Eigen::Index>(eps.size()) < min_obs) {
        throw InsufficientDataError("garch11_fit needs at least " + std::to_string(min_obs) + " observations");
    }
    const Vector v = to_vector(eps);
    if ((v.array() == v(0)).all()) throw DegenerateSeriesError("garch input");
    const double h1 = initial_variance(eps);
    if (!(h1 > 0.0)) throw DegenerateSeriesError("garch input");

    const Transform transform{
        [](const Vector& u) {
            const Garch11Params p = from_unconstrained(u);
            Vector x(3);
            x << p.omega, p.alpha, p.beta;
            return x;
        },
        [](const Vector& x) {
            const auto [ua, ub] = reparam::simplex_pair_inverse(x(1), x(2));
            Vector u(3);
            u << reparam::positive_inverse(x(0)), ua, ub;
            return u;
        }};
    const Objective objective = [eps, h1](const Vector& x) {
        return garch11_loglik(eps, Garch11Params{x(0), x(1), x(2)}, h1);
    };

    Vector start(3);
    start << h1 * 0.05, 0.05, 0.90;
    const OptimResult best = maximize(objective, transform, {start}, opts);

    Garch11Fit fit;
    fit.params = {best.x(0), best.x(1), best.x(2)};
    fit.converged = best.report.converged;
    fit.grad_norm = best.report.grad_norm;
    fit.loglik = best.report.objective;
    fit.report = best.report;
    return fit;
}

}  // namespace covtarget
