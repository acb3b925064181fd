#include "covtarget/error.hpp"
#include "covtarget/optimizer.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace covtarget;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

OptimizerOptions serial(int starts = 1) {
    OptimizerOptions o;
    o.n_starts = starts;
    o.parallel = false;
    return o;
}

}  // namespace

TEST_CASE("quadratic bowl") {
    const auto r = maximize([](const Vector& x) { return -x.squaredNorm(); }, Transform::identity(), {vec({1, 1})},
                            serial());
    CHECK(r.x.norm() < 1e-6);
    CHECK(r.report.converged);
}

TEST_CASE("optimum through an exp transform") {
    const Transform t{[](const Vector& u) { return Vector(u.array().exp()); },
                      [](const Vector& x) { return Vector(x.array().log()); }};
    const auto r = maximize([](const Vector& x) { return -(x(0) - 3.0) * (x(0) - 3.0); }, t, {vec({0.5})}, serial());
    CHECK(std::abs(r.x(0) - 3.0) < 1e-5);
}

TEST_CASE("Rosenbrock") {
    auto rosen = [](const Vector& x) {
        return -(100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2));
    };
    const auto r = maximize(rosen, Transform::identity(), {vec({-1.2, 1.0})}, serial(3));
    CHECK(r.report.objective > -1e-6);
    CHECK(std::abs(r.x(0) - 1.0) < 1e-2);
}

TEST_CASE("multi-start is deterministic and reports every start") {
    auto bumpy = [](const Vector& x) { return std::cos(3.0 * x(0)) - 0.1 * x(0) * x(0); };
    OptimizerOptions o = serial(5);
    o.seed = 9;
    const auto a = maximize(bumpy, Transform::identity(), {vec({2.0})}, o);
    o.parallel = true;
    const auto b = maximize(bumpy, Transform::identity(), {vec({2.0})}, o);
    CHECK(a.x == b.x);
    CHECK(a.report.start_winner == b.report.start_winner);
    CHECK(a.report.per_start.size() == 5);
    for (const auto& s : a.report.per_start) CHECK(s.objective <= a.report.objective);
}

TEST_CASE("non-finite everywhere is an estimation failure") {
    const Objective nan_obj = [](const Vector&) { return std::numeric_limits<double>::quiet_NaN(); };
    CHECK_THROWS_AS(maximize(nan_obj, Transform::identity(), {vec({0.0})}, serial(2)), EstimationError);
}

TEST_CASE("objective throwing library errors is treated as infeasible") {
    const Objective picky = [](const Vector& x) {
        if (x(0) < 0.0) throw DomainError("negative");
        return -(x(0) - 1.0) * (x(0) - 1.0);
    };
    const auto r = maximize(picky, Transform::identity(), {vec({0.2})}, serial());
    CHECK(std::abs(r.x(0) - 1.0) < 1e-5);
}

TEST_CASE("option validation") {
    OptimizerOptions o;
    o.n_starts = 0;
    CHECK_THROWS_AS(validate(o), DomainError);
    o = OptimizerOptions{};
    o.fd_step = 0.0;
    CHECK_THROWS_AS(validate(o), DomainError);
    CHECK_THROWS_AS(maximize([](const Vector&) { return 0.0; }, Transform::identity(), {}, serial()), DomainError);
}

TEST_CASE("fd_gradient of a polynomial") {
    const Objective f = [](const Vector& x) { return x.squaredNorm(); };
    const Vector g = fd_gradient(f, vec({1, 2}), 1e-5);
    CHECK(std::abs(g(0) - 2.0) < 1e-6);
    CHECK(std::abs(g(1) - 4.0) < 1e-6);
    CHECK(fd_gradient([](const Vector&) { return 7.0; }, vec({1, 2, 3}), 1e-5).norm() < 1e-9);
}

TEST_CASE("fd_gradient error shrinks quadratically with the step") {
    const Objective f = [](const Vector& x) { return std::exp(x(0)) * std::sin(x(1)); };
    const Vector x = vec({0.3, 0.7});
    Vector exact(2);
    exact << std::exp(0.3) * std::sin(0.7), std::exp(0.3) * std::cos(0.7);
    const double e1 = (fd_gradient(f, x, 1e-2) - exact).norm();
    const double e2 = (fd_gradient(f, x, 5e-3) - exact).norm();
    CHECK(e2 / e1 == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("fd_gradient names the failing coordinate") {
    const Objective f = [](const Vector& x) { return x(1) > 1.0 ? std::numeric_limits<double>::infinity() : 0.0; };
    CHECK_THROWS_AS(fd_gradient(f, vec({0.0, 1.0}), 1e-3), NumericalOverflowError);
}

TEST_CASE("reparameterizations are bijective and stay feasible") {
    using namespace reparam;
    for (double a : {0.0001, 0.05, 0.3, 0.7}) {
        for (double b : {0.0001, 0.2, 0.29}) {
            const auto [u0, u1] = simplex_pair_inverse(a, b);
            const auto [a2, b2] = simplex_pair(u0, u1);
            CHECK(a2 == doctest::Approx(a).epsilon(1e-9));
            CHECK(b2 == doctest::Approx(b).epsilon(1e-9));
        }
    }
    const auto [ua, ub] = radial_pair_inverse(0.3, 0.9);
    const auto [ra, rb] = radial_pair(ua, ub);
    CHECK(ra == doctest::Approx(0.3));
    CHECK(rb == doctest::Approx(0.9));
    for (double u : {-1e6, -30.0, 0.0, 30.0, 1e6}) {
        const auto [s, t] = simplex_pair(u, u);
        CHECK(s + t < 1.0);
        CHECK(s >= 0.0);
        const auto [c, d] = radial_pair(u, 0.3);
        CHECK(c * c + d * d < 1.0);
        CHECK(positive(u) > 0.0);
    }
    CHECK(positive_inverse(positive(1.7)) == doctest::Approx(1.7));
}
