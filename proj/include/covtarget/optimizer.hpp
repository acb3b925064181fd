#pragma once

#include "covtarget/linalg.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace covtarget {

/// Objective evaluated on a point of the constrained space. Must be pure:
/// starts may run concurrently. Throwing covtarget::Error or returning a
/// non-finite value marks the point infeasible.
using Objective = std::function<double(const Vector&)>;

/// Bijection between an unconstrained search space and the constrained space.
struct Transform {
    std::function<Vector(const Vector&)> to_constrained;
    std::function<Vector(const Vector&)> to_unconstrained;

    static Transform identity();
};

struct OptimizerOptions {
    int max_iters = 2000;       ///< quasi-Newton iterations per start
    int simplex_iters = 600;    ///< Nelder-Mead iterations per start
    double tol_obj = 1e-8;
    double tol_step = 1e-8;
    int n_starts = 5;
    std::uint64_t seed = 0;
    double fd_step = 1e-5;      ///< relative central-difference step
    double start_spread = 0.5;  ///< std-dev of start perturbations (unconstrained space)
    bool parallel = true;
};

struct StartOutcome {
    double objective = 0.0;
    bool converged = false;
    int iterations = 0;
};

struct FitReport {
    double objective = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    int start_winner = 0;
    bool converged = false;
    std::vector<StartOutcome> per_start;
};

struct OptimResult {
    Vector x;  ///< optimum in the constrained space
    Vector u;  ///< same point in the unconstrained space
    FitReport report;
};

/// Throws DomainError on invalid options.
void validate(const OptimizerOptions& opts);

/**
 * Central finite-difference gradient with per-coordinate step
 * `step * max(1, |x_i|)`. Throws NumericalOverflowError naming the
 * coordinate (as `t`) when a probe is non-finite.
 */
Vector fd_gradient(const Objective& objective, const Vector& x, double step);

/**
 * Maximizes `objective` over the image of `transform`.
 *
 * `starts` are points in the constrained space. When fewer than
 * `opts.n_starts` are given, the rest are drawn by perturbing the first
 * start in the unconstrained space with a generator seeded from
 * `opts.seed`. Each start runs a Nelder-Mead phase followed by BFGS with
 * finite-difference gradients. The best start wins; ties go to the lower
 * start index. Throws EstimationError when every start is infeasible.
 */
OptimResult maximize(const Objective& objective, const Transform& transform, std::vector<Vector> starts,
                     const OptimizerOptions& opts);

namespace reparam {

inline constexpr double kMaxLogit = 20.0;

double logistic(double u);
double logit(double p);

/// (u_total, u_share) -> (a, b) with a, b > 0 and a + b < 1.
std::pair<double, double> simplex_pair(double u_total, double u_share);
std::pair<double, double> simplex_pair_inverse(double a, double b);

/// (u_radius, u_angle) -> (a, b) with a, b >= 0 and a² + b² < 1.
std::pair<double, double> radial_pair(double u_radius, double u_angle);
std::pair<double, double> radial_pair_inverse(double a, double b);

double positive(double u);
double positive_inverse(double x);

}  // namespace reparam

}  // namespace covtarget
