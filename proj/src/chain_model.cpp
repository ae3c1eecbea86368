#include "nlstiff/chain_model.hpp"

#include "nlstiff/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlstiff {

namespace {

constexpr double kReachTolerance = 1e-9;

Vector to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double wrap_angle(double a) noexcept {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

void check_angles(const ChainModel& chain, const Vector& angles) {
    if (angles.size() != chain.size()) {
        throw DimensionError("joint angle vector", static_cast<std::size_t>(chain.size()),
                             static_cast<std::size_t>(angles.size()));
    }
}

}  // namespace

double distance(const PlanarPoint& a, const PlanarPoint& b) noexcept {
    return std::hypot(a.x - b.x, a.y - b.y);
}

ChainModel::ChainModel(std::vector<double> link_lengths, std::vector<double> joint_stiffness) {
    if (link_lengths.size() < 2) {
        throw InvalidArgumentError("a chain needs at least two links, got " +
                                   std::to_string(link_lengths.size()));
    }
    if (joint_stiffness.size() != link_lengths.size()) {
        throw DimensionError("joint stiffness vector", link_lengths.size(), joint_stiffness.size());
    }
    bool any_elastic = false;
    for (std::size_t i = 0; i < link_lengths.size(); ++i) {
        if (!std::isfinite(link_lengths[i]) || link_lengths[i] <= 0.0) {
            throw InvalidArgumentError("link length " + std::to_string(i + 1) +
                                       " must be finite and positive");
        }
        if (!std::isfinite(joint_stiffness[i]) || joint_stiffness[i] < 0.0) {
            throw InvalidArgumentError("joint stiffness " + std::to_string(i + 1) +
                                       " must be finite and nonnegative");
        }
        any_elastic = any_elastic || joint_stiffness[i] > 0.0;
    }
    if (!any_elastic) {
        throw InvalidArgumentError("at least one joint stiffness must be positive");
    }
    lengths_ = to_vector(link_lengths);
    stiffness_ = to_vector(joint_stiffness);
}

ChainModel ChainModel::uniform(int n, double length, double stiffness) {
    if (n < 0) throw InvalidArgumentError("negative link count");
    return ChainModel(std::vector<double>(static_cast<std::size_t>(n), length),
                      std::vector<double>(static_cast<std::size_t>(n), stiffness));
}

ChainModel ChainModel::scaled(double length_factor, double stiffness_factor) const {
    Vector l = lengths_ * length_factor;
    Vector k = stiffness_ * stiffness_factor;
    return ChainModel(std::vector<double>(l.begin(), l.end()), std::vector<double>(k.begin(), k.end()));
}

Configuration Configuration::relaxed(Vector reference) {
    Configuration c;
    c.angles = reference;
    c.reference_angles = std::move(reference);
    return c;
}

Configuration Configuration::straight(int n) { return relaxed(Vector::Zero(n)); }

void Configuration::validate(const ChainModel& chain) const {
    const auto n = static_cast<std::size_t>(chain.size());
    if (static_cast<std::size_t>(angles.size()) != n) {
        throw DimensionError("configuration angles", n, static_cast<std::size_t>(angles.size()));
    }
    if (static_cast<std::size_t>(reference_angles.size()) != n) {
        throw DimensionError("reference angles", n, static_cast<std::size_t>(reference_angles.size()));
    }
    if (!angles.allFinite() || !reference_angles.allFinite()) {
        throw InvalidArgumentError("configuration contains non-finite angles");
    }
}

const char* to_string(ElbowBranch b) noexcept { return b == ElbowBranch::positive ? "+" : "-"; }

ElbowBranch branch_of(const Vector& angles) noexcept {
    if (angles.size() == 0) return ElbowBranch::positive;
    return std::sin(angles[angles.size() - 1]) < 0.0 ? ElbowBranch::negative : ElbowBranch::positive;
}

PlanarPoint forward_kinematics(const ChainModel& chain, const Vector& angles) {
    check_angles(chain, angles);
    PlanarPoint p;
    double heading = 0.0;
    for (int j = 0; j < chain.size(); ++j) {
        heading += angles[j];
        p.x += chain.length(j) * std::cos(heading);
        p.y += chain.length(j) * std::sin(heading);
    }
    return p;
}

Jacobian jacobian(const ChainModel& chain, const Vector& angles) {
    check_angles(chain, angles);
    const int n = chain.size();
    Jacobian jac(2, n);
    // Column m accumulates links m..n-1: walk from the tip.
    Vector sx(n), cy(n);
    double heading = 0.0;
    for (int j = 0; j < n; ++j) {
        heading += angles[j];
        sx[j] = chain.length(j) * std::sin(heading);
        cy[j] = chain.length(j) * std::cos(heading);
    }
    double sum_s = 0.0;
    double sum_c = 0.0;
    for (int m = n - 1; m >= 0; --m) {
        sum_s += sx[m];
        sum_c += cy[m];
        jac(0, m) = -sum_s;
        jac(1, m) = sum_c;
    }
    return jac;
}

std::pair<Matrix, Matrix> kinematic_hessians(const ChainModel& chain, const Vector& angles) {
    const Jacobian jac = jacobian(chain, angles);
    const int n = chain.size();
    Matrix hx(n, n), hy(n, n);
    // d^2x/dq_a dq_b = -sum_{j >= max(a,b)} L_j cos(theta_j) = -J(1, max(a,b)),
    // d^2y/dq_a dq_b = -sum_{j >= max(a,b)} L_j sin(theta_j) = J(0, max(a,b)).
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const int m = std::max(a, b);
            hx(a, b) = -jac(1, m);
            hy(a, b) = jac(0, m);
        }
    }
    return {hx, hy};
}

std::optional<TwoLinkAngles> try_ik_two_link(double length_a, double length_b,
                                             const PlanarPoint& target, const PlanarPoint& origin,
                                             double origin_heading, ElbowBranch branch) noexcept {
    const double dx = target.x - origin.x;
    const double dy = target.y - origin.y;
    const double d2 = dx * dx + dy * dy;
    const double d = std::sqrt(d2);
    const double tol = kReachTolerance * (length_a + length_b);
    if (d > length_a + length_b + tol || d < std::abs(length_a - length_b) - tol) {
        return std::nullopt;
    }
    double c2 = (d2 - length_a * length_a - length_b * length_b) / (2.0 * length_a * length_b);
    c2 = std::clamp(c2, -1.0, 1.0);
    const double s2 = sign_of(branch) * std::sqrt(1.0 - c2 * c2);
    TwoLinkAngles out;
    out.second = std::atan2(s2, c2);
    out.first = wrap_angle(std::atan2(dy, dx) - std::atan2(length_b * s2, length_a + length_b * c2) -
                           origin_heading);
    return out;
}

TwoLinkAngles ik_two_link(double length_a, double length_b, const PlanarPoint& target,
                          const PlanarPoint& origin, double origin_heading, ElbowBranch branch) {
    if (!(length_a > 0.0) || !(length_b > 0.0)) {
        throw InvalidArgumentError("two-link lengths must be positive");
    }
    auto sol = try_ik_two_link(length_a, length_b, target, origin, origin_heading, branch);
    if (!sol) {
        throw UnreachableError("two-link target at distance " +
                               std::to_string(distance(target, origin)) + " outside the annulus [" +
                               std::to_string(std::abs(length_a - length_b)) + ", " +
                               std::to_string(length_a + length_b) + "]");
    }
    return *sol;
}

std::optional<Vector> try_close_chain(const ChainModel& chain, const Vector& leading_angles,
                                      const PlanarPoint& target, ElbowBranch branch) {
    const int n = chain.size();
    if (n < 3) {
        throw InvalidArgumentError("close_chain needs at least three links");
    }
    if (leading_angles.size() != n - 2) {
        throw DimensionError("leading angles", static_cast<std::size_t>(n - 2),
                             static_cast<std::size_t>(leading_angles.size()));
    }
    PlanarPoint wrist;
    double heading = 0.0;
    for (int j = 0; j < n - 2; ++j) {
        heading += leading_angles[j];
        wrist.x += chain.length(j) * std::cos(heading);
        wrist.y += chain.length(j) * std::sin(heading);
    }
    const auto tail = try_ik_two_link(chain.length(n - 2), chain.length(n - 1), target, wrist, heading, branch);
    if (!tail) return std::nullopt;
    Vector q(n);
    q.head(n - 2) = leading_angles;
    q[n - 2] = tail->first;
    q[n - 1] = tail->second;
    return q;
}

Vector close_chain(const ChainModel& chain, const Vector& leading_angles, const PlanarPoint& target,
                   ElbowBranch branch) {
    auto q = try_close_chain(chain, leading_angles, target, branch);
    if (!q) {
        throw UnreachableError("wrist point leaves the reachable annulus of the last two links");
    }
    return *q;
}

double align_with_load_axis(const ChainModel& chain, Configuration& config) {
    config.validate(chain);
    const PlanarPoint end = forward_kinematics(chain, config.reference_angles);
    const double rotation = -std::atan2(end.y, end.x);
    config.angles[0] += rotation;
    config.reference_angles[0] += rotation;
    return rotation;
}

}  // namespace nlstiff
