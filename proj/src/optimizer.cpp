#include "covtarget/optimizer.hpp"

#include "covtarget/error.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace covtarget {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimization view of the problem in unconstrained coordinates.
class Problem {
public:
    Problem(const Objective& objective, const Transform& transform) : objective_(objective), transform_(transform) {}

    double operator()(const Vector& u) const {
        try {
            const double f = objective_(transform_.to_constrained(u));
            return std::isfinite(f) ? -f : kInf;
        } catch (const Error&) {
            return kInf;
        }
    }

private:
    const Objective& objective_;
    const Transform& transform_;
};

// Central differences where possible, one-sided next to an infeasible probe.
Vector safe_gradient(const Problem& g, const Vector& u, double fu, double step) {
    Vector grad(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double h = step * std::max(1.0, std::abs(u(i)));
        Vector probe = u;
        probe(i) = u(i) + h;
        const double up = g(probe);
        probe(i) = u(i) - h;
        const double down = g(probe);
        if (std::isfinite(up) && std::isfinite(down)) {
            grad(i) = (up - down) / (2.0 * h);
        } else if (std::isfinite(up)) {
            grad(i) = (up - fu) / h;
        } else if (std::isfinite(down)) {
            grad(i) = (fu - down) / h;
        } else {
            grad(i) = 0.0;
        }
    }
    return grad;
}

struct LocalResult {
    Vector u;
    double value = kInf;  // minimized value
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

bool small_change(double f_old, double f_new, const Vector& step, const Vector& u, const OptimizerOptions& o) {
    return std::abs(f_old - f_new) < o.tol_obj * (1.0 + std::abs(f_new)) &&
           step.lpNorm<Eigen::Infinity>() < o.tol_step * (1.0 + u.lpNorm<Eigen::Infinity>());
}

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
LocalResult nelder_mead(const Problem& g, Vector u0, const OptimizerOptions& o) {
    const Eigen::Index n = u0.size();
    std::vector<Vector> simplex(static_cast<std::size_t>(n + 1), u0);
    std::vector<double> values(static_cast<std::size_t>(n + 1));
    for (Eigen::Index i = 0; i < n; ++i) simplex[static_cast<std::size_t>(i + 1)](i) += 0.25;
    for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = g(simplex[i]);

    std::vector<std::size_t> order(simplex.size());
    LocalResult out;
    for (int it = 0; it < o.simplex_iters; ++it) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[order.size() - 2];
        out.iterations = it;

        double size = 0.0;
        for (const auto& v : simplex) size = std::max(size, (v - simplex[best]).lpNorm<Eigen::Infinity>());
        if (std::isfinite(values[worst]) &&
            values[worst] - values[best] < o.tol_obj * (1.0 + std::abs(values[best])) &&
            size < std::sqrt(o.tol_step)) {
            out.converged = true;
            break;
        }

        Vector centroid = Vector::Zero(n);
        for (std::size_t k = 0; k + 1 < order.size(); ++k) centroid += simplex[order[k]];
        centroid /= static_cast<double>(n);

        const Vector reflected = centroid + (centroid - simplex[worst]);
        const double fr = g(reflected);
        if (fr < values[best]) {
            const Vector expanded = centroid + 2.0 * (centroid - simplex[worst]);
            const double fe = g(expanded);
            if (fe < fr) {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if (fr < values[second]) {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            const bool outside = fr < values[worst];
            const Vector contracted = outside ? Vector(centroid + 0.5 * (reflected - centroid))
                                              : Vector(centroid + 0.5 * (simplex[worst] - centroid));
            const double fc = g(contracted);
            if (fc < std::min(fr, values[worst])) {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                for (std::size_t k = 1; k < order.size(); ++k) {
                    auto& v = simplex[order[k]];
                    v = simplex[best] + 0.5 * (v - simplex[best]);
                    values[order[k]] = g(v);
                }
            }
        }
    }
    const auto best_it = std::min_element(values.begin(), values.end());
    out.u = simplex[static_cast<std::size_t>(best_it - values.begin())];
    out.value = *best_it;
    return out;
}

LocalResult bfgs(const Problem& g, Vector u, double fu, const OptimizerOptions& o) {
    const Eigen::Index n = u.size();
    LocalResult out;
    Matrix inv_hess = Matrix::Identity(n, n);
    Vector grad = safe_gradient(g, u, fu, o.fd_step);
    bool scaled = false;

    for (int it = 0; it < o.max_iters; ++it) {
        out.iterations = it + 1;
        Vector dir = -inv_hess * grad;
        if (!(dir.dot(grad) < 0.0)) {
            inv_hess.setIdentity();
            dir = -grad;
        }
        if (!scaled) {
            // first step length of order one in the unconstrained space
            const double norm = dir.lpNorm<Eigen::Infinity>();
            if (norm > 1.0) dir /= norm;
        }

        double alpha = 1.0;
        double f_new = kInf;
        Vector u_new = u;
        const double slope = grad.dot(dir);
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            u_new = u + alpha * dir;
            f_new = g(u_new);
            if (std::isfinite(f_new) && f_new <= fu + 1e-4 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted || !(f_new < fu)) {
            if (inv_hess.isIdentity()) {
                // no descent even along the gradient: stationary to FD precision
                out.converged = true;
                break;
            }
            inv_hess.setIdentity();
            continue;
        }

        const Vector step = u_new - u;
        const Vector grad_new = safe_gradient(g, u_new, f_new, o.fd_step);
        const Vector y = grad_new - grad;
        const double sy = step.dot(y);
        if (sy > 1e-12 * step.norm() * y.norm()) {
            if (!scaled) {
                inv_hess *= sy / y.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Matrix eye = Matrix::Identity(n, n);
            inv_hess = (eye - rho * step * y.transpose()) * inv_hess * (eye - rho * y * step.transpose()) +
                       rho * step * step.transpose();
        }

        const bool done = small_change(fu, f_new, step, u_new, o);
        u = u_new;
        fu = f_new;
        grad = grad_new;
        if (done) {
            out.converged = true;
            break;
        }
    }
    out.u = std::move(u);
    out.value = fu;
    out.grad_norm = grad.norm();
    return out;
}

LocalResult run_start(const Problem& g, const Vector& u0, const OptimizerOptions& o) {
    const double f0 = g(u0);
    if (!std::isfinite(f0)) {
        LocalResult failed;
        failed.u = u0;
        return failed;
    }
    LocalResult nm = o.simplex_iters > 0 ? nelder_mead(g, u0, o) : LocalResult{u0, f0, 0.0, 0, false};
    LocalResult qn = bfgs(g, nm.u, nm.value, o);
    qn.iterations += nm.iterations;
    return qn;
}

}  // namespace

Transform Transform::identity() {
    return Transform{[](const Vector& u) { return u; }, [](const Vector& x) { return x; }};
}

void validate(const OptimizerOptions& o) {
    if (o.n_starts < 1) throw DomainError("optimizer: n_starts must be at least 1");
    if (!(o.tol_obj > 0.0) || !(o.tol_step > 0.0) || !(o.fd_step > 0.0)) {
        throw DomainError("optimizer: tolerances and fd_step must be positive");
    }
    if (o.max_iters < 0 || o.simplex_iters < 0) throw DomainError("optimizer: iteration limits must be nonnegative");
}

Vector fd_gradient(const Objective& objective, const Vector& x, double step) {
    if (!(step > 0.0)) throw DomainError("fd_gradient: step must be positive");
    Vector grad(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = step * std::max(1.0, std::abs(x(i)));
        Vector probe = x;
        probe(i) = x(i) + h;
        const double up = objective(probe);
        probe(i) = x(i) - h;
        const double down = objective(probe);
        if (!std::isfinite(up) || !std::isfinite(down)) {
            throw NumericalOverflowError("fd_gradient probe on coordinate", static_cast<std::size_t>(i));
        }
        grad(i) = (up - down) / (2.0 * h);
    }
    return grad;
}

OptimResult maximize(const Objective& objective, const Transform& transform, std::vector<Vector> starts,
                     const OptimizerOptions& opts) {
    validate(opts);
    if (starts.empty()) throw DomainError("maximize: at least one start is required");

    std::vector<Vector> u_starts;
    u_starts.reserve(std::max<std::size_t>(starts.size(), static_cast<std::size_t>(opts.n_starts)));
    for (const auto& s : starts) u_starts.push_back(transform.to_unconstrained(s));
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> noise(0.0, opts.start_spread);
    while (u_starts.size() < static_cast<std::size_t>(opts.n_starts)) {
        Vector u = u_starts.front();
        for (Eigen::Index i = 0; i < u.size(); ++i) u(i) += noise(rng);
        u_starts.push_back(std::move(u));
    }

    const Problem g(objective, transform);
    std::vector<LocalResult> results(u_starts.size());
    if (opts.parallel && u_starts.size() > 1) {
        std::vector<std::future<LocalResult>> jobs;
        for (const auto& u0 : u_starts) jobs.push_back(std::async(std::launch::async, [&g, &u0, &opts] {
            return run_start(g, u0, opts);
        }));
        for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = jobs[i].get();
    } else {
        for (std::size_t i = 0; i < u_starts.size(); ++i) results[i] = run_start(g, u_starts[i], opts);
    }

    OptimResult out;
    std::size_t winner = results.size();
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        out.report.per_start.push_back({-r.value, r.converged, r.iterations});
        if (std::isfinite(r.value) && (winner == results.size() || r.value < results[winner].value)) winner = i;
    }
    if (winner == results.size()) throw EstimationError("objective is non-finite at every start");

    const auto& best = results[winner];
    out.u = best.u;
    out.x = transform.to_constrained(best.u);
    out.report.objective = -best.value;
    out.report.grad_norm = best.grad_norm;
    out.report.iterations = best.iterations;
    out.report.start_winner = static_cast<int>(winner);
    out.report.converged = best.converged;
    return out;
}

namespace reparam {

double logistic(double u) {
    const double c = std::clamp(u, -kMaxLogit, kMaxLogit);
    return 1.0 / (1.0 + std::exp(-c));
}

double logit(double p) {
    const double lo = logistic(-kMaxLogit);
    const double hi = logistic(kMaxLogit);
    const double c = std::clamp(p, lo, hi);
    return std::log(c / (1.0 - c));
}

std::pair<double, double> simplex_pair(double u_total, double u_share) {
    const double total = logistic(u_total);
    const double share = logistic(u_share);
    return {total * share, total * (1.0 - share)};
}

std::pair<double, double> simplex_pair_inverse(double a, double b) {
    const double total = a + b;
    const double share = total > 0.0 ? a / total : 0.5;
    return {logit(total), logit(share)};
}

std::pair<double, double> radial_pair(double u_radius, double u_angle) {
    const double r = logistic(u_radius);
    const double phi = 0.5 * std::numbers::pi * logistic(u_angle);
    return {r * std::cos(phi), r * std::sin(phi)};
}

std::pair<double, double> radial_pair_inverse(double a, double b) {
    const double r = std::hypot(a, b);
    const double phi = r > 0.0 ? std::atan2(b, a) : 0.25 * std::numbers::pi;
    return {logit(r), logit(phi / (0.5 * std::numbers::pi))};
}

double positive(double u) {
    return std::exp(std::clamp(u, -50.0, 50.0));
}

double positive_inverse(double x) {
    if (!(x > 0.0)) return -50.0;
    return std::clamp(std::log(x), -50.0, 50.0);
}

}  // namespace reparam

}  // namespace covtarget
