#include "nlstiff/statics.hpp"

#include "nlstiff/errors.hpp"

#include <cmath>

namespace nlstiff {

namespace {

constexpr double kRankTolerance = 1e-10;

void check_force(const PlanarForce& f) {
    if (!std::isfinite(f.fx) || !std::isfinite(f.fy)) {
        throw InvalidArgumentError("force components must be finite");
    }
}

}  // namespace

const char* to_string(Stability s) noexcept {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::saddle: return "saddle";
    }
    return "unknown";
}

Vector joint_torques(const ChainModel& chain, const Configuration& config) {
    config.validate(chain);
    return -(chain.stiffness().array() * (config.angles - config.reference_angles).array()).matrix();
}

double strain_energy(const ChainModel& chain, const Configuration& config) {
    config.validate(chain);
    const Vector d = config.angles - config.reference_angles;
    return 0.5 * (chain.stiffness().array() * d.array().square()).sum();
}

double potential_energy(const ChainModel& chain, const Configuration& config,
                        const PlanarForce& force, const DeflectionState& deflection) {
    check_force(force);
    return strain_energy(chain, config) - force.fx * deflection.delta_x;
}

Vector equilibrium_residual(const ChainModel& chain, const Configuration& config,
                            const PlanarForce& force) {
    check_force(force);
    const Jacobian jac = jacobian(chain, config.angles);
    const Eigen::Vector2d f(force.fx, force.fy);
    return jac.transpose() * f - joint_torques(chain, config);
}

ForceRecovery recover_force(const ChainModel& chain, const Configuration& config) {
    const Vector torques = joint_torques(chain, config);
    if ((torques.array() == 0.0).all()) {
        return {};
    }
    const Matrix jt = jacobian(chain, config.angles).transpose();
    Eigen::JacobiSVD<Matrix> svd(jt, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = kRankTolerance * sv[0];
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] > cutoff) ++rank;
    }
    if (rank < 2) {
        throw SingularityError("Jacobian is rank deficient; the load cannot be recovered", rank);
    }
    const Eigen::Vector2d f = svd.solve(torques);
    ForceRecovery out;
    out.force = {f[0], f[1]};
    out.residual_norm = (jt * f - torques).norm();
    return out;
}

std::optional<RefinedEquilibrium> refine_constrained_equilibrium(const ChainModel& chain,
                                                                 const Configuration& config,
                                                                 const PlanarPoint& target,
                                                                 double max_step) {
    config.validate(chain);
    const int n = chain.size();
    Configuration current = config;

    PlanarForce force;
    try {
        force = recover_force(chain, current).force;
    } catch (const SingularityError&) {
        return std::nullopt;
    }

    const double torque_scale = std::max(chain.max_stiffness(), 1e-300);
    const double length_scale = chain.total_length();
    const Matrix k = chain.stiffness().asDiagonal();

    Vector g(n + 2);
    Matrix kkt = Matrix::Zero(n + 2, n + 2);
    for (int iter = 0; iter <= 30; ++iter) {
        const Jacobian jac = jacobian(chain, current.angles);
        const PlanarPoint end = forward_kinematics(chain, current.angles);
        g.head(n) = k * (current.angles - current.reference_angles) +
                    jac.transpose() * Eigen::Vector2d(force.fx, force.fy);
        g[n] = end.x - target.x;
        g[n + 1] = end.y - target.y;

        const bool torque_ok = g.head(n).norm() <= 1e-12 * torque_scale;
        const bool position_ok = g.tail<2>().norm() <= 1e-13 * length_scale;
        if (torque_ok && position_ok) {
            return RefinedEquilibrium{current, force, iter};
        }

        const auto [hx, hy] = kinematic_hessians(chain, current.angles);
        kkt.topLeftCorner(n, n) = k + force.fx * hx + force.fy * hy;
        kkt.topRightCorner(n, 2) = jac.transpose();
        kkt.bottomLeftCorner(2, n) = jac;
        kkt.bottomRightCorner<2, 2>().setZero();

        Eigen::FullPivLU<Matrix> lu(kkt);
        if (!lu.isInvertible()) return std::nullopt;
        const Vector step = lu.solve(-g);
        if (!step.allFinite()) return std::nullopt;

        current.angles += step.head(n);
        force.fx += step[n];
        force.fy += step[n + 1];
        if ((current.angles - config.angles).cwiseAbs().maxCoeff() > max_step) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace nlstiff
