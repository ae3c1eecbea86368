#include "support.hpp"

#include "nlstiff/errors.hpp"
#include "nlstiff/statics.hpp"
#include "nlstiff/sweep.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace nlstiff;
using nlstiff::testing::vec;

namespace {

constexpr double kPi = std::numbers::pi;

Configuration loaded(Vector q, Vector q0) { return {std::move(q), std::move(q0)}; }

TEST(JointTorques, RelaxedSpringsCarryNoTorque) {
    const auto chain = ChainModel({1, 2, 3}, {0.5, 1, 2});
    EXPECT_EQ(joint_torques(chain, Configuration::relaxed(vec({0.3, -0.1, 0.7}))), Vector::Zero(3));
}

TEST(JointTorques, ComponentwiseFormula) {
    const auto chain = ChainModel({1, 1, 1}, {0, 1, 1});
    const Vector m = joint_torques(chain, loaded(vec({0.3, 0.1, -0.2}), Vector::Zero(3)));
    EXPECT_EQ(m[0], 0.0);
    EXPECT_DOUBLE_EQ(m[1], -0.1);
    EXPECT_DOUBLE_EQ(m[2], 0.2);
}

TEST(JointTorques, ScaledModeShape) {
    const auto chain = ChainModel::uniform(4);
    const Vector v = nlstiff::testing::reference_mode_1();
    const Vector m = joint_torques(chain, loaded(0.01 * v, Vector::Zero(4)));
    EXPECT_TRUE(m.isApprox(-0.01 * v, 1e-14));
}

TEST(StrainEnergy, Examples) {
    const auto chain = ChainModel({1, 1, 1}, {0, 1, 1});
    EXPECT_EQ(strain_energy(chain, Configuration::relaxed(vec({0.2, 0.4, 0.1}))), 0.0);
    EXPECT_NEAR(strain_energy(chain, loaded(vec({0.5, 0.2, -0.2}), Vector::Zero(3))), 0.04, 1e-15);

    const Vector v = nlstiff::testing::reference_mode_1();
    const double mu = 0.01;
    EXPECT_NEAR(strain_energy(ChainModel::uniform(4), loaded(mu * v, Vector::Zero(4))),
                0.5 * mu * mu * v.squaredNorm(), 1e-18);
}

TEST(StrainEnergy, GradientIsMinusTorque) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(-1.5, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        const ChainModel chain = nlstiff::testing::random_chain(rng, 2 + trial % 7);
        Vector q0(chain.size()), q(chain.size());
        for (auto& a : q0) a = angle(rng);
        for (auto& a : q) a = angle(rng);
        const auto u = [&](const Vector& x) { return strain_energy(chain, loaded(x, q0)); };
        const Vector grad = nlstiff::testing::central_gradient(u, q, 1e-5);
        const Vector m = joint_torques(chain, loaded(q, q0));
        EXPECT_LT((grad + m).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(PotentialEnergy, Examples) {
    const auto chain = ChainModel::uniform(3);
    const Configuration c = loaded(vec({0.1, 0.2, -0.3}), Vector::Zero(3));
    EXPECT_DOUBLE_EQ(potential_energy(chain, c, {0, 0}, {0.2, 0, 0}), strain_energy(chain, c));
    EXPECT_DOUBLE_EQ(potential_energy(chain, c, {1.5, 0.7}, {0.2, 0, 0}), strain_energy(chain, c) - 1.5 * 0.2);
}

TEST(PotentialEnergy, TwoLinkMechanismAsChain) {
    // Two equal links with one central spring: a passive base joint plus the
    // elastic middle joint whose relative angle is 2q, so U = 2 k q^2.
    const auto chain = ChainModel({1, 1}, {0, 1});
    EXPECT_EQ(potential_energy(chain, Configuration::straight(2), {2, 0}, {0, 0, 0}), 0.0);

    const double q = kPi / 3;
    const Configuration c = loaded(vec({q, -2 * q}), Vector::Zero(2));
    const double delta = 2.0 * (1.0 - std::cos(q));
    EXPECT_NEAR(potential_energy(chain, c, {2, 0}, {delta, 0, 0}),
                2 * (kPi / 3) * (kPi / 3) - 2 * 2 * (1 - std::cos(kPi / 3)), 1e-14);
}

TEST(EquilibriumResidual, RelaxedAndUnloaded) {
    const auto chain = ChainModel::uniform(4);
    const Vector r = equilibrium_residual(chain, Configuration::relaxed(nlstiff::testing::z_shape()), {0, 0});
    EXPECT_EQ(r, Vector::Zero(4));
}

TEST(EquilibriumResidual, ThreeLinkUMode) {
    for (double k : {1.0, 2.5}) {
        for (double phi : {0.1, 0.3, 0.7}) {
            const auto chain = ChainModel({1, 1, 1}, {0, k, k});
            const Configuration c = loaded(vec({phi, -phi, -phi}), Vector::Zero(3));
            const Vector r = equilibrium_residual(chain, c, {k * phi / std::sin(phi), 0});
            EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(EquilibriumResidual, NonEquilibriumIsDetected) {
    const auto chain = ChainModel::uniform(4);
    const Vector r = equilibrium_residual(chain, loaded(vec({0.3, -0.2, 0.5, 0.1}), Vector::Zero(4)), {0.8, -0.4});
    EXPECT_GT(r.norm(), 1e-3);
}

TEST(RecoverForce, RelaxedGivesZero) {
    const auto chain = ChainModel::uniform(4);
    const ForceRecovery rec = recover_force(chain, Configuration::relaxed(nlstiff::testing::u_shape()));
    EXPECT_EQ(rec.force.fx, 0.0);
    EXPECT_EQ(rec.force.fy, 0.0);
    EXPECT_EQ(rec.residual_norm, 0.0);
}

TEST(RecoverForce, ThreeLinkUMode) {
    const auto chain = ChainModel({1, 1, 1}, {0, 1, 1});
    const ForceRecovery rec = recover_force(chain, loaded(vec({0.3, -0.3, -0.3}), Vector::Zero(3)));
    EXPECT_NEAR(rec.force.fx, 0.3 / std::sin(0.3), 1e-12);
    EXPECT_NEAR(rec.force.fx, 1.01516, 1e-5);
    EXPECT_NEAR(rec.force.fy, 0.0, 1e-12);
    EXPECT_LT(rec.residual_norm, 1e-12);
}

TEST(RecoverForce, SmallModeShape) {
    // Transverse load is the mode's linear F_y entry, not zero: mu * 0.12962.
    const auto chain = ChainModel::uniform(4);
    const double mu = 0.05;
    const ForceRecovery rec = recover_force(chain, loaded(mu * -nlstiff::testing::reference_mode_1(), Vector::Zero(4)));
    EXPECT_NEAR(rec.force.fx, 0.9240, 0.01 * 0.9240);
    EXPECT_NEAR(rec.force.fy, mu * 0.129621, 1e-3);
}

TEST(RecoverForce, StraightConfigurationIsSingular) {
    const auto chain = ChainModel::uniform(3);
    try {
        recover_force(chain, loaded(Vector::Zero(3), vec({0.1, 0.0, 0.0})));
        FAIL() << "expected SingularityError";
    } catch (const SingularityError& e) {
        EXPECT_EQ(e.rank(), 1);
    }
}

TEST(RecoverForce, LeastSquaresOptimality) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> angle(-1.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1e-3);
    for (int trial = 0; trial < 30; ++trial) {
        const ChainModel chain = nlstiff::testing::random_chain(rng, 3 + trial % 5, 0.1);
        Vector q(chain.size());
        for (auto& a : q) a = angle(rng);
        const Configuration c = loaded(q, Vector::Zero(chain.size()));
        const ForceRecovery rec = recover_force(chain, c);
        EXPECT_NEAR(rec.residual_norm, equilibrium_residual(chain, c, rec.force).norm(), 1e-9);
        for (int p = 0; p < 20; ++p) {
            const PlanarForce f{rec.force.fx + noise(rng), rec.force.fy + noise(rng)};
            EXPECT_GE(equilibrium_residual(chain, c, f).norm(), rec.residual_norm - 1e-12);
        }
    }
}

TEST(RefineEquilibrium, PolishesAPerturbedEquilibrium) {
    const auto chain = ChainModel({1, 1, 1}, {0, 1, 1});
    const double phi = 0.4;
    const Vector exact = vec({phi, -phi, -phi});
    const PlanarPoint target = forward_kinematics(chain, exact);
    const Configuration start = loaded(exact + vec({1e-4, -2e-4, 5e-5}), Vector::Zero(3));
    const auto refined = refine_constrained_equilibrium(chain, start, target);
    ASSERT_TRUE(refined.has_value());
    EXPECT_LT((refined->configuration.angles - exact).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(refined->force.fx, phi / std::sin(phi), 1e-10);
}

TEST(WorkEnergy, ForceIntegralMatchesStrainEnergy) {
    const auto chain = ChainModel::uniform(4);
    SweepRequest request{chain, Configuration::relaxed(nlstiff::testing::u_shape()), 0.2, 200};
    request.seeds = 0;
    const SweepResult result = sweep_force_deflection(request);
    ASSERT_TRUE(result.complete());
    double work = 0.0;
    for (std::size_t i = 1; i < result.points.size(); ++i) {
        const auto& a = result.points[i - 1];
        const auto& b = result.points[i];
        work += 0.5 * (a.force.fx + b.force.fx) * (b.deflection.delta_x - a.deflection.delta_x);
    }
    const double energy = result.points.back().strain_energy - result.points.front().strain_energy;
    EXPECT_NEAR(work, energy, 0.01 * energy);
}

}  // namespace
