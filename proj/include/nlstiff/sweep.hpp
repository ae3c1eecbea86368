#pragma once

#include "nlstiff/chain_model.hpp"
#include "nlstiff/execution.hpp"
#include "nlstiff/statics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nlstiff {

// Which elbow branches the search may use for closing the chain.
enum class BranchPolicy { positive, negative, both };

const char* to_string(BranchPolicy p) noexcept;

// Geometry of a loaded non-straight chain: the unloaded shape rotated onto
// the load axis, and the reach x0 of its end-point along that axis.
struct LoadFrame {
    Configuration initial;    // aligned unloaded configuration
    double axis_rotation = 0.0;
    double unloaded_reach = 0.0;  // x0
    double pre_displacement = 0.0;

    PlanarPoint target(double delta_x) const { return {unloaded_reach - delta_x, 0.0}; }
};

// Aligns `initial_config` with the load axis (see align_with_load_axis).
LoadFrame make_load_frame(const ChainModel& chain, const Configuration& initial_config);

// Strain energy of the chain closed on `target` from the given leading
// angles; +infinity when the closure is infeasible.
double reduced_energy(const ChainModel& chain, const Configuration& initial_config,
                      const Vector& leading_angles, const PlanarPoint& target, ElbowBranch branch);

// Reduced energy at every row of `candidates` (one leading-angle vector per
// row). Data-parallel over rows.
std::vector<double> reduced_energy_grid(const ChainModel& chain, const Configuration& initial_config,
                                        const Matrix& candidates, const PlanarPoint& target,
                                        ElbowBranch branch, Execution execution = Execution::parallel);

// Central finite-difference Hessian of the reduced energy (step 1e-4 rad,
// halved while a stencil point is infeasible). nullopt when no step works.
std::optional<Matrix> reduced_energy_hessian(const ChainModel& chain, const Configuration& initial_config,
                                             const Vector& leading_angles, const PlanarPoint& target,
                                             ElbowBranch branch, double step = 1e-4);

// Eigenvalue sign test with tolerance 1e-6 max|H_ij|. An empty Hessian (no
// free coordinates) is stable.
StabilityInfo classify_stability(const Matrix& hessian);

// All equilibria of a three-link chain at axial deflection `delta` from the
// aligned unloaded end-point, over both elbow branches: local minima
// (stable) and maxima (unstable) of the energy along the first joint angle,
// sorted by strain energy. Throws UnreachableError if no closure exists.
std::vector<EquilibriumPoint> three_link_equilibria(const ChainModel& chain,
                                                    const Configuration& initial_config, double delta,
                                                    Execution execution = Execution::parallel);

struct SweepRequest {
    ChainModel chain;
    Configuration initial_config;
    double delta_max = 0.0;
    int steps = 0;  // number of increments; steps + 1 samples including delta = 0
    BranchPolicy branch_policy = BranchPolicy::both;
    int seeds = 8;  // random restarts per step
    std::uint64_t rng_seed = 1;
    double drop_ratio = 0.1;
    Execution execution = Execution::parallel;

    // Throws InvalidArgumentError on violated invariants.
    void validate() const;
};

struct QuasiBucklingMarker {
    double delta_x = 0.0;
    double stiffness_ratio = 0.0;  // local dF_x/d(delta_x) over the reference stiffness
};

// Which search produced a sweep point.
struct BranchRecord {
    ElbowBranch branch = ElbowBranch::positive;
    int restart = -1;  // -1: warm-start continuation, otherwise restart index
};

// A lower-energy minimum found by a restart but not followed, since the
// chain cannot jump to a disconnected minimum.
struct Advisory {
    double delta_x = 0.0;
    double continued_energy = 0.0;
    double alternative_energy = 0.0;
    Vector alternative_angles;
    ElbowBranch branch = ElbowBranch::positive;
};

struct SweepTruncation {
    double delta_x = 0.0;
    std::string reason;
};

struct SweepResult {
    std::vector<EquilibriumPoint> points;
    std::vector<QuasiBucklingMarker> quasi_buckling_markers;
    std::vector<BranchRecord> branch_log;
    std::vector<Advisory> advisories;
    std::optional<SweepTruncation> truncation;
    double axis_rotation = 0.0;
    bool energy_monotone = true;

    bool complete() const { return !truncation.has_value(); }
};

SweepResult sweep_force_deflection(const SweepRequest& request);

// Markers where the discrete stiffness dF_x/d(delta_x) (central differences)
// drops below drop_ratio times the largest stiffness seen over the first 20%
// of the path; one marker per downward crossing.
std::vector<QuasiBucklingMarker> detect_quasi_buckling(const std::vector<double>& delta_x,
                                                       const std::vector<double>& force_x,
                                                       double drop_ratio = 0.1);
std::vector<QuasiBucklingMarker> detect_quasi_buckling(const SweepResult& result, double drop_ratio = 0.1);

// Discrete stiffness used by detect_quasi_buckling.
std::vector<double> discrete_stiffness(const std::vector<double>& delta_x, const std::vector<double>& force_x);

}  // namespace nlstiff
