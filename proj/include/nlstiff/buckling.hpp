#pragma once

#include "nlstiff/chain_model.hpp"
#include "nlstiff/execution.hpp"
#include "nlstiff/statics.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nlstiff {

// Reach sums of the straight chain linearized about q = 0.
struct ReachMatrices {
    Matrix s1;  // (i, m) = -sum_{j >= max(i, m)} L_j
    Vector s0;  // i = sum_{j >= i} L_j
};

// (A F_x + B) v = 0 with v = [q; F_y].
struct LinearizedSystem {
    Matrix s1;
    Vector s0;
    Matrix a;  // [[S1, 0], [0, 0]]
    Matrix b;  // [[K, S0], [S0^T, 0]]
};

// Sign-change taxonomy of a post-buckling mode shape.
struct ShapeLabel {
    enum class Kind { u, z, zu, unclassified };
    Kind kind = Kind::unclassified;
    int sign_changes = 0;

    // "U", "Z", "ZU(s)" or "unclassified".
    std::string str() const;
    friend bool operator==(const ShapeLabel&, const ShapeLabel&) = default;
};

struct BucklingMode {
    double eigenvalue = 0.0;   // lambda = -1 / F_x
    Vector mode_vector;        // unit norm, [q-direction (n); F_y entry]
    double axial_force = 0.0;  // -1 / lambda
    double energy_factor = 0.0;
    ShapeLabel shape;
    bool is_primary = false;  // the max |lambda| (minimum force) mode

    int joint_count() const { return static_cast<int>(mode_vector.size()) - 1; }
    Vector angle_direction() const { return mode_vector.head(joint_count()); }
};

ReachMatrices build_reach_matrices(const ChainModel& chain);

// Throws ModelDegenerateError when B is singular.
LinearizedSystem build_system(const ChainModel& chain);

// The n - 1 modes with nonzero eigenvalue of B^-1 A, sorted by descending
// |lambda|. Throws NonrealSpectrumError / RankAnomalyError when the spectrum
// leaves the validated class (real, exactly two zero eigenvalues).
std::vector<BucklingMode> buckling_modes(const ChainModel& chain);

// Critical compressive force of the straight configuration: -1 / max |lambda|.
double critical_force(const ChainModel& chain);

// Ratio sum k_j v_j^2 / sum_s L_s (sum_{j<=s} v_j)^2 on the angle part.
// Throws DegenerateModeError when the denominator vanishes.
double energy_factor(const BucklingMode& mode, const ChainModel& chain);
double energy_factor(const Vector& angle_direction, const ChainModel& chain);

ShapeLabel classify_shape(const Vector& angle_direction);

// Linearized equilibrium q = mu v, F = (-1/lambda, mu v_{n+1}). |mu| <= 0.1.
EquilibriumPoint mode_equilibrium_snapshot(const BucklingMode& mode, const ChainModel& chain,
                                           double mu);

// Per-chain outcome of a batch analysis. `error` holds the message of the
// exception that stopped the analysis, if any.
struct ChainAnalysis {
    std::vector<BucklingMode> modes;
    double critical_force = 0.0;
    std::optional<std::string> error;
};

// Buckling analysis of many independent chains; the parallel path
// distributes chains over OpenMP threads.
std::vector<ChainAnalysis> analyze_chains(std::span<const ChainModel> chains,
                                          Execution execution = Execution::parallel);

}  // namespace nlstiff
