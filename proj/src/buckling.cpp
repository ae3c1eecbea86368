#include "nlstiff/buckling.hpp"

#include "nlstiff/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace nlstiff {

namespace {

constexpr double kZeroEigenvalueTolerance = 1e-8;
constexpr double kImaginaryTolerance = 1e-8;
constexpr double kSignTolerance = 1e-9;
constexpr double kSnapshotEnvelope = 0.1;

void canonicalize_sign(Vector& v, int joints) {
    const double cutoff = kSignTolerance * v.norm();
    for (int j = 0; j < joints; ++j) {
        if (std::abs(v[j]) > cutoff) {
            if (v[j] > 0.0) v = -v;
            return;
        }
    }
}

}  // namespace

std::string ShapeLabel::str() const {
    switch (kind) {
        case Kind::u: return "U";
        case Kind::z: return "Z";
        case Kind::zu: return "ZU(" + std::to_string(sign_changes) + ")";
        case Kind::unclassified: return "unclassified";
    }
    return "unclassified";
}

ReachMatrices build_reach_matrices(const ChainModel& chain) {
    const int n = chain.size();
    Vector suffix(n);
    double acc = 0.0;
    for (int j = n - 1; j >= 0; --j) {
        acc += chain.length(j);
        suffix[j] = acc;
    }
    ReachMatrices out;
    out.s0 = suffix;
    out.s1.resize(n, n);
    for (int i = 0; i < n; ++i) {
        for (int m = 0; m < n; ++m) {
            out.s1(i, m) = -suffix[std::max(i, m)];
        }
    }
    return out;
}

LinearizedSystem build_system(const ChainModel& chain) {
    const int n = chain.size();
    auto [s1, s0] = build_reach_matrices(chain);
    LinearizedSystem sys;
    sys.a = Matrix::Zero(n + 1, n + 1);
    sys.a.topLeftCorner(n, n) = s1;
    sys.b = Matrix::Zero(n + 1, n + 1);
    sys.b.topLeftCorner(n, n) = chain.stiffness().asDiagonal();
    sys.b.topRightCorner(n, 1) = s0;
    sys.b.bottomLeftCorner(1, n) = s0.transpose();
    sys.s1 = std::move(s1);
    sys.s0 = std::move(s0);

    Eigen::FullPivLU<Matrix> lu(sys.b);
    if (!lu.isInvertible()) {
        throw ModelDegenerateError("matrix B is singular (rank " + std::to_string(lu.rank()) + " of " +
                                   std::to_string(n + 1) +
                                   "); too many zero-stiffness joints for an elastic model");
    }
    return sys;
}

std::vector<BucklingMode> buckling_modes(const ChainModel& chain) {
    const int n = chain.size();
    const LinearizedSystem sys = build_system(chain);
    const Matrix c = Eigen::FullPivLU<Matrix>(sys.b).solve(sys.a);

    // The last column of B^-1 A is exactly zero (A has a zero last column), so
    // one zero eigenvalue is structural and the F_y coordinate deflates away.
    // Solving only the leading n x n block keeps the remaining zero simple and
    // away from the Jordan-block sensitivity of the full matrix.
    const Matrix leading = c.topLeftCorner(n, n);
    const Eigen::RowVectorXd coupling = c.block(n, 0, 1, n);

    Eigen::EigenSolver<Matrix> solver(leading, true);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigen decomposition of B^-1 A did not converge");
    }
    const Eigen::VectorXcd values = solver.eigenvalues();
    const double largest = values.cwiseAbs().maxCoeff();
    if (!(largest > 0.0)) {
        throw RankAnomalyError("B^-1 A has no nonzero eigenvalue", n + 1);
    }

    int zero_count = 1;
    std::vector<BucklingMode> modes;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        const std::complex<double> lambda = values[i];
        if (std::abs(lambda) < kZeroEigenvalueTolerance * largest) {
            ++zero_count;
            continue;
        }
        if (std::abs(lambda.imag()) > kImaginaryTolerance * std::abs(lambda)) {
            throw NonrealSpectrumError("B^-1 A has a non-real eigenvalue " + std::to_string(lambda.real()) +
                                       (lambda.imag() < 0 ? " - " : " + ") +
                                       std::to_string(std::abs(lambda.imag())) + "i");
        }
        BucklingMode mode;
        mode.eigenvalue = lambda.real();
        const Vector q = solver.eigenvectors().col(i).real();
        mode.mode_vector.resize(n + 1);
        mode.mode_vector.head(n) = q;
        mode.mode_vector[n] = coupling.dot(q) / mode.eigenvalue;
        mode.mode_vector.normalize();
        canonicalize_sign(mode.mode_vector, n);
        mode.axial_force = -1.0 / mode.eigenvalue;
        mode.energy_factor = energy_factor(mode, chain);
        mode.shape = classify_shape(mode.angle_direction());
        modes.push_back(std::move(mode));
    }
    if (zero_count != 2) {
        throw RankAnomalyError("B^-1 A has " + std::to_string(zero_count) +
                                   " zero eigenvalues, expected exactly two",
                               zero_count);
    }

    std::sort(modes.begin(), modes.end(), [](const BucklingMode& a, const BucklingMode& b) {
        return std::abs(a.eigenvalue) > std::abs(b.eigenvalue);
    });
    modes.front().is_primary = true;
    return modes;
}

double critical_force(const ChainModel& chain) { return buckling_modes(chain).front().axial_force; }

double energy_factor(const Vector& angle_direction, const ChainModel& chain) {
    const int n = chain.size();
    if (angle_direction.size() != n) {
        throw DimensionError("mode angle direction", static_cast<std::size_t>(n),
                             static_cast<std::size_t>(angle_direction.size()));
    }
    double numerator = 0.0;
    double denominator = 0.0;
    double cumulative = 0.0;
    for (int s = 0; s < n; ++s) {
        numerator += chain.stiffness(s) * angle_direction[s] * angle_direction[s];
        cumulative += angle_direction[s];
        denominator += chain.length(s) * cumulative * cumulative;
    }
    if (!(denominator > 1e-15 * chain.total_length() * angle_direction.squaredNorm())) {
        throw DegenerateModeError("mode produces no axial deflection; energy factor undefined");
    }
    return numerator / denominator;
}

double energy_factor(const BucklingMode& mode, const ChainModel& chain) {
    return energy_factor(mode.angle_direction(), chain);
}

ShapeLabel classify_shape(const Vector& angle_direction) {
    ShapeLabel label;
    const double norm = angle_direction.norm();
    const auto n = angle_direction.size();
    if (n < 2 || !(norm > 0.0)) return label;
    const double cutoff = kSignTolerance * norm;
    int changes = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(angle_direction[j]) <= cutoff) return label;
        if (j > 0 && (angle_direction[j] > 0.0) != (angle_direction[j - 1] > 0.0)) ++changes;
    }
    label.sign_changes = changes;
    if (changes == 1) {
        label.kind = ShapeLabel::Kind::u;
    } else if (changes == n - 1) {
        label.kind = ShapeLabel::Kind::z;
    } else {
        label.kind = ShapeLabel::Kind::zu;
    }
    return label;
}

EquilibriumPoint mode_equilibrium_snapshot(const BucklingMode& mode, const ChainModel& chain,
                                           double mu) {
    const int n = chain.size();
    if (mode.joint_count() != n) {
        throw DimensionError("mode vector", static_cast<std::size_t>(n + 1),
                             static_cast<std::size_t>(mode.mode_vector.size()));
    }
    if (!std::isfinite(mu) || std::abs(mu) > kSnapshotEnvelope) {
        throw InvalidArgumentError("snapshot scale |mu| must not exceed 0.1 rad");
    }
    const Vector direction = mode.angle_direction();

    EquilibriumPoint point;
    point.configuration.angles = mu * direction;
    point.configuration.reference_angles = Vector::Zero(n);
    point.force = {-1.0 / mode.eigenvalue, mu * mode.mode_vector[n]};

    double cumulative = 0.0;
    double reach = 0.0;
    for (int s = 0; s < n; ++s) {
        cumulative += direction[s];
        reach += chain.length(s) * cumulative * cumulative;
    }
    point.deflection.delta_x = 0.5 * mu * mu * reach;
    point.strain_energy = 0.5 * mu * mu * (chain.stiffness().array() * direction.array().square()).sum();
    point.potential_energy = point.strain_energy - point.force.fx * point.deflection.delta_x;
    point.stability = {mode.is_primary ? Stability::stable : Stability::unstable, false};

    // Residual of the linearized balance K q + S1 q F_x + S0 F_y.
    const ReachMatrices reach_mats = build_reach_matrices(chain);
    const Vector& q = point.configuration.angles;
    const Vector linear = chain.stiffness().asDiagonal() * q + reach_mats.s1 * q * point.force.fx +
                          reach_mats.s0 * point.force.fy;
    point.residual_norm = linear.norm();
    return point;
}

std::vector<ChainAnalysis> analyze_chains(std::span<const ChainModel> chains, Execution execution) {
    std::vector<ChainAnalysis> results(chains.size());
    const auto count = static_cast<long>(chains.size());
    auto analyze = [&](long i) {
        ChainAnalysis& r = results[static_cast<std::size_t>(i)];
        try {
            r.modes = buckling_modes(chains[static_cast<std::size_t>(i)]);
            r.critical_force = r.modes.front().axial_force;
        } catch (const Error& e) {
            r.error = e.what();
        }
    };
    if (execution == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < count; ++i) analyze(i);
    } else {
        for (long i = 0; i < count; ++i) analyze(i);
    }
    return results;
}

}  // namespace nlstiff
