#include "support.hpp"

#include "nlstiff/chain_model.hpp"
#include "nlstiff/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace nlstiff;
using nlstiff::testing::vec;

namespace {

constexpr double kPi = std::numbers::pi;

TEST(ChainModel, RejectsInvalidParameters) {
    EXPECT_THROW(ChainModel({1.0}, {1.0}), InvalidArgumentError);
    EXPECT_THROW(ChainModel({1.0, 1.0}, {1.0}), InvalidArgumentError);
    EXPECT_THROW(ChainModel({1.0, -1.0}, {1.0, 1.0}), InvalidArgumentError);
    EXPECT_THROW(ChainModel({1.0, 0.0}, {1.0, 1.0}), InvalidArgumentError);
    EXPECT_THROW(ChainModel({1.0, 1.0}, {1.0, -0.5}), InvalidArgumentError);
    EXPECT_THROW(ChainModel({1.0, 1.0}, {0.0, 0.0}), InvalidArgumentError);
    EXPECT_THROW(ChainModel({1.0, NAN}, {1.0, 1.0}), InvalidArgumentError);
    EXPECT_NO_THROW(ChainModel({1.0, 1.0}, {0.0, 1.0}));
}

TEST(ChainModel, ConfigurationValidation) {
    const auto chain = ChainModel::uniform(3);
    EXPECT_THROW(Configuration::relaxed(vec({0, 0})).validate(chain), DimensionError);
    EXPECT_THROW(Configuration::relaxed(vec({0, INFINITY, 0})).validate(chain), InvalidArgumentError);
    EXPECT_NO_THROW(Configuration::straight(3).validate(chain));
}

TEST(ForwardKinematics, StraightChain) {
    const PlanarPoint p = forward_kinematics(ChainModel::uniform(4), Vector::Zero(4));
    EXPECT_DOUBLE_EQ(p.x, 4.0);
    EXPECT_DOUBLE_EQ(p.y, 0.0);
}

TEST(ForwardKinematics, ReferenceShapesReachTheSamePoint) {
    const auto chain = ChainModel::uniform(4);
    for (const Vector& q : {nlstiff::testing::u_shape(), nlstiff::testing::z_shape()}) {
        const PlanarPoint p = forward_kinematics(chain, q);
        EXPECT_NEAR(p.x, 3.8, 1e-3);
        EXPECT_NEAR(p.y, 0.0, 1e-3);
    }
}

TEST(ForwardKinematics, DimensionMismatch) {
    EXPECT_THROW(forward_kinematics(ChainModel::uniform(4), Vector::Zero(3)), DimensionError);
    EXPECT_THROW(jacobian(ChainModel::uniform(4), Vector::Zero(5)), DimensionError);
}

TEST(Jacobian, StraightThreeLink) {
    const Jacobian j = jacobian(ChainModel::uniform(3), Vector::Zero(3));
    Jacobian expected(2, 3);
    expected << 0, 0, 0, 3, 2, 1;
    EXPECT_TRUE(j.isApprox(expected));
    EXPECT_EQ(j.row(0).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Jacobian, ChainAlongYAxis) {
    const Jacobian j = jacobian(ChainModel({2, 1}, {1, 1}), vec({kPi / 2, 0}));
    EXPECT_NEAR(j(0, 0), -3.0, 1e-15);
    EXPECT_NEAR(j(0, 1), -1.0, 1e-15);
    EXPECT_NEAR(j(1, 0), 0.0, 1e-15);
    EXPECT_NEAR(j(1, 1), 0.0, 1e-15);
}

TEST(Jacobian, MatchesFiniteDifferences) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::vector<Vector> samples{nlstiff::testing::u_shape()};
    for (int s = 0; s < 20; ++s) {
        Vector q(4 + s % 4);
        for (auto& a : q) a = angle(rng);
        samples.push_back(q);
    }
    for (const Vector& q : samples) {
        const ChainModel chain = nlstiff::testing::random_chain(rng, static_cast<int>(q.size()), 0.5);
        const Jacobian j = jacobian(chain, q);
        const double h = 1e-6;
        for (Eigen::Index m = 0; m < q.size(); ++m) {
            Vector a = q, b = q;
            a[m] += h;
            b[m] -= h;
            const PlanarPoint pa = forward_kinematics(chain, a), pb = forward_kinematics(chain, b);
            EXPECT_NEAR(j(0, m), (pa.x - pb.x) / (2 * h), 1e-6 * chain.total_length());
            EXPECT_NEAR(j(1, m), (pa.y - pb.y) / (2 * h), 1e-6 * chain.total_length());
        }
    }
}

TEST(Jacobian, KinematicHessiansMatchFiniteDifferences) {
    const auto chain = ChainModel({1.0, 0.7, 1.3, 0.4}, {1, 1, 1, 1});
    const Vector q = vec({0.3, -0.8, 1.1, 0.5});
    const auto [hx, hy] = kinematic_hessians(chain, q);
    const double h = 1e-6;
    for (Eigen::Index b = 0; b < 4; ++b) {
        Vector p = q, m = q;
        p[b] += h;
        m[b] -= h;
        const Jacobian d = (jacobian(chain, p) - jacobian(chain, m)) / (2 * h);
        for (Eigen::Index a = 0; a < 4; ++a) {
            EXPECT_NEAR(hx(a, b), d(0, a), 1e-7);
            EXPECT_NEAR(hy(a, b), d(1, a), 1e-7);
        }
    }
}

TEST(InverseKinematics, FullyExtended) {
    const TwoLinkAngles a = ik_two_link(1, 1, {2, 0}, {0, 0}, 0, ElbowBranch::positive);
    EXPECT_NEAR(a.first, 0.0, 1e-12);
    EXPECT_NEAR(a.second, 0.0, 1e-12);
    const TwoLinkAngles b = ik_two_link(1, 1, {2, 0}, {0, 0}, 0, ElbowBranch::negative);
    EXPECT_NEAR(b.second, 0.0, 1e-12);
}

TEST(InverseKinematics, BothElbowBranches) {
    const TwoLinkAngles plus = ik_two_link(1, 1, {1, 1}, {0, 0}, 0, ElbowBranch::positive);
    EXPECT_NEAR(plus.first, 0.0, 1e-12);
    EXPECT_NEAR(plus.second, kPi / 2, 1e-12);
    const TwoLinkAngles minus = ik_two_link(1, 1, {1, 1}, {0, 0}, 0, ElbowBranch::negative);
    EXPECT_NEAR(minus.first, kPi / 2, 1e-12);
    EXPECT_NEAR(minus.second, -kPi / 2, 1e-12);
    for (const auto& a : {plus, minus}) {
        const PlanarPoint p = forward_kinematics(ChainModel::uniform(2), vec({a.first, a.second}));
        EXPECT_NEAR(p.x, 1.0, 1e-12);
        EXPECT_NEAR(p.y, 1.0, 1e-12);
    }
}

TEST(InverseKinematics, Unreachable) {
    EXPECT_THROW(ik_two_link(1, 1, {3, 0}, {0, 0}, 0, ElbowBranch::positive), UnreachableError);
    EXPECT_THROW(ik_two_link(2, 0.5, {0.5, 0}, {0, 0}, 0, ElbowBranch::positive), UnreachableError);
    EXPECT_FALSE(try_ik_two_link(1, 1, {2.0 + 1e-6, 0}, {0, 0}, 0, ElbowBranch::positive));
    // Inside the boundary tolerance the cosine clamps instead of failing.
    EXPECT_TRUE(try_ik_two_link(1, 1, {2.0 + 1e-10, 0}, {0, 0}, 0, ElbowBranch::positive));
}

TEST(CloseChain, StraightThreeLink) {
    const Vector q = close_chain(ChainModel::uniform(3), vec({0}), {3, 0}, ElbowBranch::positive);
    EXPECT_LT(q.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CloseChain, ReconstructsReferenceShapes) {
    const auto chain = ChainModel::uniform(4);
    for (const Vector& shape : {nlstiff::testing::u_shape(), nlstiff::testing::z_shape()}) {
        const ElbowBranch branch = shape[3] > 0 ? ElbowBranch::positive : ElbowBranch::negative;
        const Vector q = close_chain(chain, shape.head(2), {3.8, 0}, branch);
        EXPECT_EQ(q.head(2), shape.head(2));
        EXPECT_NEAR(q[2], shape[2], 1e-3);
        EXPECT_NEAR(q[3], shape[3], 1e-3);
    }
}

TEST(CloseChain, InfeasibleLeadingAngles) {
    const auto chain = ChainModel::uniform(4);
    EXPECT_THROW(close_chain(chain, vec({2.0, 2.0}), {3.8, 0}, ElbowBranch::positive), UnreachableError);
    EXPECT_FALSE(try_close_chain(chain, vec({2.0, 2.0}), {3.8, 0}, ElbowBranch::negative));
}

TEST(CloseChain, Preconditions) {
    EXPECT_THROW(close_chain(ChainModel::uniform(2), Vector(0), {2, 0}, ElbowBranch::positive),
                 InvalidArgumentError);
    EXPECT_THROW(close_chain(ChainModel::uniform(4), vec({0}), {3, 0}, ElbowBranch::positive), DimensionError);
}

TEST(CloseChain, RoundTripOnRandomTargets) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 3 + trial % 5;
        const ChainModel chain = nlstiff::testing::random_chain(rng, n, 0.5);
        Vector q(n);
        for (auto& a : q) a = angle(rng);
        const PlanarPoint target = forward_kinematics(chain, q);
        for (ElbowBranch b : {ElbowBranch::positive, ElbowBranch::negative}) {
            const auto closed = try_close_chain(chain, q.head(n - 2), target, b);
            ASSERT_TRUE(closed.has_value());
            EXPECT_EQ(closed->head(n - 2), q.head(n - 2));
            EXPECT_LT(distance(forward_kinematics(chain, *closed), target), 1e-9);
            ++checked;
        }
        // The generating configuration is one of the two closures.
        const Vector same = close_chain(chain, q.head(n - 2), target, branch_of(q));
        EXPECT_NEAR(std::remainder(same[n - 1] - q[n - 1], 2 * kPi), 0.0, 1e-7);
    }
    EXPECT_EQ(checked, 800);
}

TEST(LoadAxis, AlignmentRotatesTheEndPointOntoTheAxis) {
    const auto chain = ChainModel::uniform(4);
    Configuration config = Configuration::relaxed(vec({0.4, -0.2, 0.9, 0.3}));
    const PlanarPoint before = forward_kinematics(chain, config.angles);
    const double rotation = align_with_load_axis(chain, config);
    const PlanarPoint after = forward_kinematics(chain, config.angles);
    EXPECT_NEAR(after.y, 0.0, 1e-12);
    EXPECT_NEAR(after.x, std::hypot(before.x, before.y), 1e-12);
    EXPECT_NEAR(rotation, -std::atan2(before.y, before.x), 1e-15);
    EXPECT_EQ(config.angles, config.reference_angles);
}

}  // namespace
