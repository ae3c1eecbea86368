#pragma once

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

namespace nlstiff {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Jacobian = Eigen::Matrix<double, 2, Eigen::Dynamic>;

struct PlanarPoint {
    double x = 0.0;
    double y = 0.0;
};

double distance(const PlanarPoint& a, const PlanarPoint& b) noexcept;

// Link lengths and joint stiffnesses of an n-link planar serial chain with
// elastic revolute joints. Immutable once constructed.
class ChainModel {
public:
    // Throws InvalidArgumentError unless n >= 2, every length is finite and
    // positive, every stiffness is finite and nonnegative, and at least one
    // stiffness is positive.
    ChainModel(std::vector<double> link_lengths, std::vector<double> joint_stiffness);

    // Chain of n equal links with equal joint stiffness.
    static ChainModel uniform(int n, double length = 1.0, double stiffness = 1.0);

    int size() const noexcept { return static_cast<int>(lengths_.size()); }
    const Vector& lengths() const noexcept { return lengths_; }
    const Vector& stiffness() const noexcept { return stiffness_; }
    double length(int j) const { return lengths_[j]; }
    double stiffness(int i) const { return stiffness_[i]; }
    double total_length() const noexcept { return lengths_.sum(); }
    double max_stiffness() const noexcept { return stiffness_.maxCoeff(); }

    ChainModel scaled(double length_factor, double stiffness_factor) const;

private:
    Vector lengths_;
    Vector stiffness_;
};

// Joint angles q (relative, radians) and the unloaded reference angles q0 at
// which every spring is relaxed.
struct Configuration {
    Vector angles;
    Vector reference_angles;

    // Unloaded configuration: angles equal to the reference shape.
    static Configuration relaxed(Vector reference);
    static Configuration straight(int n);

    // Throws DimensionError / InvalidArgumentError on mismatch or non-finite data.
    void validate(const ChainModel& chain) const;
};

// End-effector displacement relative to the unloaded end-point.
struct DeflectionState {
    double delta_x = 0.0;           // axial shortening
    double delta_y = 0.0;           // transverse displacement
    double pre_displacement = 0.0;  // total length minus unloaded reach
};

// Sign of S2 in the two-link inverse kinematics. Positive selects a positive
// relative angle of the distal link.
enum class ElbowBranch { positive, negative };

constexpr double sign_of(ElbowBranch b) noexcept { return b == ElbowBranch::positive ? 1.0 : -1.0; }
constexpr ElbowBranch opposite(ElbowBranch b) noexcept {
    return b == ElbowBranch::positive ? ElbowBranch::negative : ElbowBranch::positive;
}
const char* to_string(ElbowBranch b) noexcept;

// Branch on which the last two joints of `angles` lie.
ElbowBranch branch_of(const Vector& angles) noexcept;

PlanarPoint forward_kinematics(const ChainModel& chain, const Vector& angles);

// 2 x n kinematic Jacobian of the end-point with respect to the relative angles.
Jacobian jacobian(const ChainModel& chain, const Vector& angles);

// Second derivatives of the end-point coordinates: returns (Hx, Hy), each n x n.
std::pair<Matrix, Matrix> kinematic_hessians(const ChainModel& chain, const Vector& angles);

// Relative angles (first, second) of a two-link sub-chain.
struct TwoLinkAngles {
    double first = 0.0;
    double second = 0.0;
};

// Two-link inverse kinematics from `origin` with incoming heading
// `origin_heading`. Returns nullopt when the target is outside the annulus
// |La - Lb| <= d <= La + Lb (tolerance 1e-9 (La + Lb)).
std::optional<TwoLinkAngles> try_ik_two_link(double length_a, double length_b,
                                             const PlanarPoint& target, const PlanarPoint& origin,
                                             double origin_heading, ElbowBranch branch) noexcept;

// As try_ik_two_link, throwing UnreachableError.
TwoLinkAngles ik_two_link(double length_a, double length_b, const PlanarPoint& target,
                          const PlanarPoint& origin, double origin_heading, ElbowBranch branch);

// Completes n-2 leading angles with the last two so that the end-point hits
// `target`. nullopt signals an infeasible reduced-space candidate.
std::optional<Vector> try_close_chain(const ChainModel& chain, const Vector& leading_angles,
                                      const PlanarPoint& target, ElbowBranch branch);

Vector close_chain(const ChainModel& chain, const Vector& leading_angles,
                   const PlanarPoint& target, ElbowBranch branch);

// Rigidly rotates the chain about its base (first angle and first reference
// angle shifted together) so that the unloaded end-point lies on the +x axis,
// the line of action of the compressive load. Returns the rotation applied.
double align_with_load_axis(const ChainModel& chain, Configuration& config);

}  // namespace nlstiff
