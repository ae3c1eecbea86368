#include "nlstiff/nelder_mead.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace nlstiff;

namespace {

TEST(NelderMead, Quadratic) {
    const auto f = [](const Vector& x) { return (x[0] - 1.0) * (x[0] - 1.0) + 3.0 * (x[1] + 2.0) * (x[1] + 2.0); };
    const auto r = minimize_nelder_mead(f, Vector::Zero(2));
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x[0], 1.0, 1e-7);
    EXPECT_NEAR(r.x[1], -2.0, 1e-7);
}

TEST(NelderMead, Rosenbrock) {
    const auto f = [](const Vector& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    Vector start(2);
    start << -1.2, 1.0;
    const auto r = minimize_nelder_mead(f, start);
    EXPECT_NEAR(r.x[0], 1.0, 1e-5);
    EXPECT_NEAR(r.x[1], 1.0, 1e-5);
}

TEST(NelderMead, OneDimension) {
    const auto f = [](const Vector& x) { return std::cos(x[0]); };
    const auto r = minimize_nelder_mead(f, Vector::Constant(1, 2.5));
    EXPECT_NEAR(r.x[0], M_PI, 1e-6);
}

TEST(NelderMead, RespectsInfeasibleRegion) {
    // Minimum of the unconstrained quadratic lies in the infeasible half-plane.
    const auto f = [](const Vector& x) {
        if (x[0] < 0.5) return std::numeric_limits<double>::infinity();
        return x.squaredNorm();
    };
    const auto r = minimize_nelder_mead(f, Vector::Constant(2, 2.0));
    EXPECT_GE(r.x[0], 0.5);
    EXPECT_NEAR(r.x[0], 0.5, 1e-6);
    EXPECT_NEAR(r.x[1], 0.0, 1e-6);
}

TEST(NelderMead, NanIsTreatedAsInfeasible) {
    const auto f = [](const Vector& x) { return x[0] < 0 ? std::nan("") : (x[0] - 1) * (x[0] - 1); };
    const auto r = minimize_nelder_mead(f, Vector::Constant(1, 0.2));
    EXPECT_NEAR(r.x[0], 1.0, 1e-6);
}

TEST(NelderMead, ZeroDimensionalProblem) {
    const auto r = minimize_nelder_mead([](const Vector&) { return 4.0; }, Vector(0));
    EXPECT_EQ(r.value, 4.0);
    EXPECT_TRUE(r.converged);
}

TEST(NelderMead, EvaluationBudget) {
    NelderMeadOptions opts;
    opts.max_evaluations = 50;
    const auto f = [](const Vector& x) { return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2); };
    const auto r = minimize_nelder_mead(f, Vector::Zero(2), opts);
    EXPECT_LE(r.evaluations, 60);
    EXPECT_FALSE(r.converged);
}

}  // namespace
