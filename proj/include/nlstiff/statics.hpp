#pragma once

#include "nlstiff/chain_model.hpp"

#include <optional>
#include <string>

namespace nlstiff {

// End-effector load, compression positive: F_x > 0 pushes the end-point
// toward the base, so the physical force acting on the chain is -F. With this
// convention the axial deflection delta_x and F_x are work conjugates
// (dU = F_x d(delta_x) when delta_y is held at zero).
struct PlanarForce {
    double fx = 0.0;
    double fy = 0.0;
};

enum class Stability { stable, unstable, saddle };

const char* to_string(Stability s) noexcept;

struct StabilityInfo {
    Stability tag = Stability::stable;
    bool degenerate = false;  // a Hessian eigenvalue fell inside the tolerance band
};

// One loaded static equilibrium.
struct EquilibriumPoint {
    Configuration configuration;
    DeflectionState deflection;
    PlanarForce force;
    double strain_energy = 0.0;
    double potential_energy = 0.0;
    StabilityInfo stability;
    double residual_norm = 0.0;
};

// Elastic restoring torques M = -K (q - q0).
Vector joint_torques(const ChainModel& chain, const Configuration& config);

// U = sum_i k_i (q_i - q0_i)^2 / 2.
double strain_energy(const ChainModel& chain, const Configuration& config);

// V = U - F_x delta_x. F_y does no work under the delta_y = 0 constraint.
double potential_energy(const ChainModel& chain, const Configuration& config,
                        const PlanarForce& force, const DeflectionState& deflection);

// Torque balance residual J^T F - M = K (q - q0) + J^T F; zero exactly at
// equilibrium under the compressive load F.
Vector equilibrium_residual(const ChainModel& chain, const Configuration& config,
                            const PlanarForce& force);

struct ForceRecovery {
    PlanarForce force;
    double residual_norm = 0.0;
};

// Least-squares (Moore-Penrose) load consistent with the configuration:
// minimizes ||J^T F - M||. A relaxed configuration returns zero load. Throws
// SingularityError when J is rank deficient (rank tolerance 1e-10 ||J||).
ForceRecovery recover_force(const ChainModel& chain, const Configuration& config);

// Newton refinement of a constrained equilibrium: solves
//   K (q - q0) + J(q)^T F = 0,  FK(q) = target
// for (q, F) starting from `config` and the least-squares load there. Used to
// polish minimizer output to round-off level. Returns nullopt when Newton does
// not converge or wanders more than `max_step` radians away from the start.
struct RefinedEquilibrium {
    Configuration configuration;
    PlanarForce force;
    int iterations = 0;
};

std::optional<RefinedEquilibrium> refine_constrained_equilibrium(const ChainModel& chain,
                                                                 const Configuration& config,
                                                                 const PlanarPoint& target,
                                                                 double max_step = 0.05);

}  // namespace nlstiff
