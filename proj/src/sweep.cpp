#include "nlstiff/sweep.hpp"

#include "nlstiff/errors.hpp"
#include "nlstiff/nelder_mead.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace nlstiff {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kHessianTolerance = 1e-6;
constexpr double kResidualTolerance = 1e-6;  // relative to max stiffness
constexpr double kPathTolerance = 1e-9;
constexpr double kRestartHalfWidth = std::numbers::pi / 2.0;
constexpr int kThreeLinkScanPoints = 7200;

std::vector<ElbowBranch> allowed_branches(BranchPolicy policy) {
    switch (policy) {
        case BranchPolicy::positive: return {ElbowBranch::positive};
        case BranchPolicy::negative: return {ElbowBranch::negative};
        case BranchPolicy::both: return {ElbowBranch::positive, ElbowBranch::negative};
    }
    return {};
}

bool branch_allowed(BranchPolicy policy, ElbowBranch b) {
    return policy == BranchPolicy::both ||
           (policy == BranchPolicy::positive) == (b == ElbowBranch::positive);
}

// A converged local minimum of the reduced energy, closed and polished.
struct LocalMinimum {
    Vector angles;
    double energy = kInfinity;
    ElbowBranch branch = ElbowBranch::positive;
    bool found = false;
};

LocalMinimum minimize_on_branch(const ChainModel& chain, const Configuration& initial, const Vector& start,
                                const PlanarPoint& target, ElbowBranch branch) {
    LocalMinimum out;
    out.branch = branch;
    const auto objective = [&](const Vector& lead) {
        return reduced_energy(chain, initial, lead, target, branch);
    };
    NelderMeadOptions opts;
    opts.initial_step = 0.05;
    opts.x_tolerance = 1e-11;
    opts.f_tolerance = 1e-15;
    opts.max_evaluations = 6000;
    const NelderMeadResult nm = minimize_nelder_mead(objective, start, opts);
    if (!std::isfinite(nm.value)) return out;

    auto closed = try_close_chain(chain, nm.x, target, branch);
    if (!closed) return out;
    Configuration config{*closed, initial.reference_angles};
    if (auto refined = refine_constrained_equilibrium(chain, config, target)) {
        config = refined->configuration;
    }
    out.angles = config.angles;
    out.energy = strain_energy(chain, config);
    out.branch = branch_of(config.angles);
    out.found = true;
    return out;
}

}  // namespace

const char* to_string(BranchPolicy p) noexcept {
    switch (p) {
        case BranchPolicy::positive: return "+";
        case BranchPolicy::negative: return "-";
        case BranchPolicy::both: return "both";
    }
    return "?";
}

LoadFrame make_load_frame(const ChainModel& chain, const Configuration& initial_config) {
    initial_config.validate(chain);
    LoadFrame frame;
    frame.initial = Configuration::relaxed(initial_config.reference_angles);
    frame.axis_rotation = align_with_load_axis(chain, frame.initial);
    frame.unloaded_reach = forward_kinematics(chain, frame.initial.angles).x;
    frame.pre_displacement = chain.total_length() - frame.unloaded_reach;
    return frame;
}

double reduced_energy(const ChainModel& chain, const Configuration& initial_config,
                      const Vector& leading_angles, const PlanarPoint& target, ElbowBranch branch) {
    auto q = try_close_chain(chain, leading_angles, target, branch);
    if (!q) return kInfinity;
    const Vector d = *q - initial_config.reference_angles;
    return 0.5 * (chain.stiffness().array() * d.array().square()).sum();
}

std::vector<double> reduced_energy_grid(const ChainModel& chain, const Configuration& initial_config,
                                        const Matrix& candidates, const PlanarPoint& target,
                                        ElbowBranch branch, Execution execution) {
    initial_config.validate(chain);
    if (candidates.cols() != chain.size() - 2) {
        throw DimensionError("candidate leading angles", static_cast<std::size_t>(chain.size() - 2),
                             static_cast<std::size_t>(candidates.cols()));
    }
    const auto rows = static_cast<long>(candidates.rows());
    std::vector<double> out(static_cast<std::size_t>(rows));
    if (execution == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (long r = 0; r < rows; ++r) {
            out[static_cast<std::size_t>(r)] =
                reduced_energy(chain, initial_config, candidates.row(r).transpose(), target, branch);
        }
    } else {
        for (long r = 0; r < rows; ++r) {
            out[static_cast<std::size_t>(r)] =
                reduced_energy(chain, initial_config, candidates.row(r).transpose(), target, branch);
        }
    }
    return out;
}

std::optional<Matrix> reduced_energy_hessian(const ChainModel& chain, const Configuration& initial_config,
                                             const Vector& leading_angles, const PlanarPoint& target,
                                             ElbowBranch branch, double step) {
    const auto m = leading_angles.size();
    const auto f = [&](const Vector& x) { return reduced_energy(chain, initial_config, x, target, branch); };
    const double f0 = f(leading_angles);
    if (!std::isfinite(f0)) return std::nullopt;

    for (int attempt = 0; attempt < 8; ++attempt, step *= 0.5) {
        Matrix h(m, m);
        bool feasible = true;
        for (Eigen::Index a = 0; a < m && feasible; ++a) {
            Vector ea = Vector::Zero(m);
            ea[a] = step;
            const double fp = f(leading_angles + ea);
            const double fm = f(leading_angles - ea);
            h(a, a) = (fp - 2.0 * f0 + fm) / (step * step);
            for (Eigen::Index b = a + 1; b < m; ++b) {
                Vector eb = Vector::Zero(m);
                eb[b] = step;
                const double fpp = f(leading_angles + ea + eb);
                const double fpm = f(leading_angles + ea - eb);
                const double fmp = f(leading_angles - ea + eb);
                const double fmm = f(leading_angles - ea - eb);
                h(a, b) = h(b, a) = (fpp - fpm - fmp + fmm) / (4.0 * step * step);
            }
        }
        if (h.allFinite()) return h;
    }
    return std::nullopt;
}

StabilityInfo classify_stability(const Matrix& hessian) {
    StabilityInfo info;
    if (hessian.size() == 0) return info;
    if (hessian.rows() != hessian.cols()) {
        throw InvalidArgumentError("Hessian must be square");
    }
    const double scale = hessian.cwiseAbs().maxCoeff();
    const double tol = kHessianTolerance * scale;
    const Vector eig = Eigen::SelfAdjointEigenSolver<Matrix>(hessian, Eigen::EigenvaluesOnly).eigenvalues();
    int positive = 0;
    int negative = 0;
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        if (eig[i] > tol) {
            ++positive;
        } else if (eig[i] < -tol) {
            ++negative;
        }
    }
    const bool degenerate = positive + negative < eig.size() || scale == 0.0;
    if (positive > 0 && negative > 0) {
        info.tag = Stability::saddle;
    } else if (degenerate) {
        info.tag = Stability::stable;
    } else {
        info.tag = negative > 0 ? Stability::unstable : Stability::stable;
    }
    info.degenerate = degenerate;
    return info;
}

std::vector<EquilibriumPoint> three_link_equilibria(const ChainModel& chain, const Configuration& initial_config,
                                                    double delta, Execution execution) {
    if (chain.size() != 3) {
        throw InvalidArgumentError("three_link_equilibria needs a three-link chain");
    }
    if (!std::isfinite(delta)) throw InvalidArgumentError("deflection must be finite");
    const LoadFrame frame = make_load_frame(chain, initial_config);
    const PlanarPoint target = frame.target(delta);
    const double reach = std::hypot(target.x, target.y);
    const double total = chain.total_length();

    const auto make_point = [&](const Vector& q, StabilityInfo stability) {
        EquilibriumPoint p;
        p.configuration = {q, frame.initial.reference_angles};
        const ForceRecovery rec = recover_force(chain, p.configuration);
        p.force = rec.force;
        p.residual_norm = rec.residual_norm;
        p.deflection = {delta, 0.0, frame.pre_displacement};
        p.strain_energy = strain_energy(chain, p.configuration);
        p.potential_energy = p.strain_energy - p.force.fx * delta;
        p.stability = stability;
        return p;
    };

    if (reach > total * (1.0 + 1e-9)) {
        throw UnreachableError("deflection " + std::to_string(delta) + " puts the end-point out of reach");
    }
    if (reach >= total * (1.0 - 1e-12)) {
        // Fully extended: the closure is unique.
        Vector q = Vector::Zero(3);
        q[0] = std::atan2(target.y, target.x);
        return {make_point(q, {Stability::stable, true})};
    }

    const int count = kThreeLinkScanPoints;
    const double h = 2.0 * std::numbers::pi / count;
    Matrix grid(count, 1);
    for (int i = 0; i < count; ++i) grid(i, 0) = -std::numbers::pi + h * i;

    std::vector<EquilibriumPoint> found;
    bool any_feasible = false;
    for (ElbowBranch branch : {ElbowBranch::positive, ElbowBranch::negative}) {
        const std::vector<double> energy =
            reduced_energy_grid(chain, frame.initial, grid, target, branch, execution);
        const auto f = [&](double phi) {
            return reduced_energy(chain, frame.initial, Vector::Constant(1, phi), target, branch);
        };
        for (int i = 0; i < count; ++i) {
            const double e0 = energy[static_cast<std::size_t>((i + count - 1) % count)];
            const double e1 = energy[static_cast<std::size_t>(i)];
            const double e2 = energy[static_cast<std::size_t>((i + 1) % count)];
            any_feasible = any_feasible || std::isfinite(e1);
            if (!std::isfinite(e0) || !std::isfinite(e1) || !std::isfinite(e2)) continue;
            const bool is_min = e1 < e0 && e1 <= e2;
            const bool is_max = e1 > e0 && e1 >= e2;
            if (!is_min && !is_max) continue;

            // Golden-section refinement inside the bracketing grid cell pair.
            const double sign = is_min ? 1.0 : -1.0;
            double lo = grid(i, 0) - h;
            double hi = grid(i, 0) + h;
            const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
            double x1 = hi - ratio * (hi - lo);
            double x2 = lo + ratio * (hi - lo);
            double f1 = sign * f(x1);
            double f2 = sign * f(x2);
            for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
                if (f1 < f2) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - ratio * (hi - lo);
                    f1 = sign * f(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + ratio * (hi - lo);
                    f2 = sign * f(x2);
                }
            }
            const double phi = 0.5 * (lo + hi);
            auto closed = try_close_chain(chain, Vector::Constant(1, phi), target, branch);
            if (!closed) continue;
            Configuration config{*closed, frame.initial.reference_angles};
            if (auto refined = refine_constrained_equilibrium(chain, config, target, 1e-3)) {
                config = refined->configuration;
            }
            const bool duplicate = std::any_of(found.begin(), found.end(), [&](const EquilibriumPoint& p) {
                return (p.configuration.angles - config.angles).cwiseAbs().maxCoeff() < 1e-7;
            });
            if (duplicate) continue;

            StabilityInfo stability{is_min ? Stability::stable : Stability::unstable, true};
            const ElbowBranch on = branch_of(config.angles);
            if (auto hess = reduced_energy_hessian(chain, frame.initial, config.angles.head(1), target, on)) {
                stability = classify_stability(*hess);
            }
            found.push_back(make_point(config.angles, stability));
        }
    }
    if (!any_feasible) {
        throw UnreachableError("no closure of the three-link chain reaches deflection " + std::to_string(delta));
    }
    std::sort(found.begin(), found.end(), [](const EquilibriumPoint& a, const EquilibriumPoint& b) {
        return a.strain_energy < b.strain_energy;
    });
    return found;
}

void SweepRequest::validate() const {
    initial_config.validate(chain);
    if (chain.size() < 3) {
        throw InvalidArgumentError("sweeps need at least three links (n - 2 free angles)");
    }
    if (steps < 2) throw InvalidArgumentError("sweep needs at least 2 steps");
    if (seeds < 0) throw InvalidArgumentError("seed count must be nonnegative");
    if (!(drop_ratio > 0.0 && drop_ratio < 1.0)) {
        throw InvalidArgumentError("drop ratio must lie in (0, 1)");
    }
    const PlanarPoint end = forward_kinematics(chain, initial_config.reference_angles);
    const double reach = std::hypot(end.x, end.y);
    if (!(delta_max > 0.0) || !(delta_max < reach)) {
        throw InvalidArgumentError("delta_max must lie in (0, " + std::to_string(reach) +
                                   "), the unloaded reach of the chain");
    }
}

SweepResult sweep_force_deflection(const SweepRequest& request) {
    request.validate();
    const ChainModel& chain = request.chain;
    const int n = chain.size();
    const int free_dims = n - 2;
    const LoadFrame frame = make_load_frame(chain, request.initial_config);
    const std::vector<ElbowBranch> branches = allowed_branches(request.branch_policy);
    const double residual_limit = kResidualTolerance * chain.max_stiffness();

    ElbowBranch branch = branch_of(frame.initial.angles);
    if (!branch_allowed(request.branch_policy, branch)) {
        if (std::abs(std::sin(frame.initial.angles[n - 1])) > 1e-12) {
            throw InvalidArgumentError(std::string("initial configuration lies on the ") + to_string(branch) +
                                       " elbow branch, excluded by the branch policy");
        }
        branch = branches.front();
    }

    SweepResult result;
    result.axis_rotation = frame.axis_rotation;
    std::mt19937_64 rng(request.rng_seed);
    std::uniform_real_distribution<double> offset(-kRestartHalfWidth, kRestartHalfWidth);

    Vector previous = frame.initial.angles;
    double previous_energy = 0.0;

    for (int step = 0; step <= request.steps; ++step) {
        const double delta = request.delta_max * step / request.steps;
        const PlanarPoint target = frame.target(delta);
        BranchRecord record{branch, -1};
        Vector q;

        if (step == 0) {
            q = frame.initial.angles;
        } else {
            const Vector warm = previous.head(free_dims);

            // Continuation: the closest local minimum to the previous point.
            LocalMinimum continued;
            double continued_distance = kInfinity;
            for (ElbowBranch b : branches) {
                LocalMinimum cand = minimize_on_branch(chain, frame.initial, warm, target, b);
                if (!cand.found) continue;
                const double dist = (cand.angles - previous).norm();
                if (dist < continued_distance - 1e-12 ||
                    (std::abs(dist - continued_distance) <= 1e-12 && cand.energy < continued.energy)) {
                    continued = std::move(cand);
                    continued_distance = dist;
                }
            }

            // Restarts: drawn serially so the seed fixes them, solved in parallel.
            std::vector<Vector> starts;
            std::vector<ElbowBranch> start_branch;
            for (int s = 0; s < request.seeds; ++s) {
                Vector start = warm;
                for (int d = 0; d < free_dims; ++d) start[d] += offset(rng);
                for (ElbowBranch b : branches) {
                    starts.push_back(start);
                    start_branch.push_back(b);
                }
            }
            std::vector<LocalMinimum> restarts(starts.size());
            const auto task_count = static_cast<long>(starts.size());
            const auto solve = [&](long t) {
                const auto i = static_cast<std::size_t>(t);
                if (!std::isfinite(reduced_energy(chain, frame.initial, starts[i], target, start_branch[i]))) return;
                restarts[i] = minimize_on_branch(chain, frame.initial, starts[i], target, start_branch[i]);
            };
            if (request.execution == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
                for (long t = 0; t < task_count; ++t) solve(t);
            } else {
                for (long t = 0; t < task_count; ++t) solve(t);
            }
            int best_restart = -1;
            for (std::size_t i = 0; i < restarts.size(); ++i) {
                if (!restarts[i].found) continue;
                if (best_restart < 0 || restarts[i].energy < restarts[static_cast<std::size_t>(best_restart)].energy) {
                    best_restart = static_cast<int>(i);
                }
            }

            if (continued.found) {
                q = continued.angles;
                record = {continued.branch, -1};
                if (best_restart >= 0) {
                    const LocalMinimum& alt = restarts[static_cast<std::size_t>(best_restart)];
                    const double margin = 1e-9 * std::max(1.0, std::abs(continued.energy));
                    if (alt.energy < continued.energy - margin &&
                        (alt.angles - continued.angles).cwiseAbs().maxCoeff() > 1e-6) {
                        result.advisories.push_back(
                            {delta, continued.energy, alt.energy, alt.angles, alt.branch});
                    }
                }
            } else if (best_restart >= 0) {
                const LocalMinimum& alt = restarts[static_cast<std::size_t>(best_restart)];
                q = alt.angles;
                record = {alt.branch, best_restart / static_cast<int>(branches.size())};
            } else {
                result.truncation = SweepTruncation{delta, "no feasible energy minimum on the allowed elbow branches"};
                break;
            }
        }

        EquilibriumPoint point;
        point.configuration = {q, frame.initial.reference_angles};
        try {
            const ForceRecovery rec = recover_force(chain, point.configuration);
            point.force = rec.force;
        } catch (const SingularityError& e) {
            result.truncation = SweepTruncation{delta, e.what()};
            break;
        }
        // Audit independently of the minimizer before emitting anything.
        point.residual_norm = equilibrium_residual(chain, point.configuration, point.force).norm();
        if (!(point.residual_norm < residual_limit) && step > 0) {
            result.truncation = SweepTruncation{
                delta, "equilibrium residual " + std::to_string(point.residual_norm) + " above tolerance"};
            break;
        }
        const PlanarPoint end = forward_kinematics(chain, q);
        if (distance(end, target) > kPathTolerance * chain.total_length()) {
            result.truncation = SweepTruncation{delta, "end-point left the loading path"};
            break;
        }

        point.deflection = {delta, 0.0, frame.pre_displacement};
        point.strain_energy = strain_energy(chain, point.configuration);
        point.potential_energy = point.strain_energy - point.force.fx * delta;
        const ElbowBranch on = branch_of(q);
        if (auto hess = reduced_energy_hessian(chain, frame.initial, q.head(free_dims), target, on)) {
            point.stability = classify_stability(*hess);
        } else {
            point.stability = {Stability::stable, true};
        }

        if (point.strain_energy < previous_energy - 1e-10 * chain.max_stiffness()) {
            result.energy_monotone = false;
        }
        previous_energy = point.strain_energy;
        previous = q;
        branch = on;
        record.branch = on;
        result.points.push_back(std::move(point));
        result.branch_log.push_back(record);
    }

    if (result.points.size() >= 3) {
        result.quasi_buckling_markers = detect_quasi_buckling(result, request.drop_ratio);
    }
    return result;
}

std::vector<double> discrete_stiffness(const std::vector<double>& delta_x, const std::vector<double>& force_x) {
    if (delta_x.size() != force_x.size()) {
        throw DimensionError("force samples", delta_x.size(), force_x.size());
    }
    const std::size_t n = delta_x.size();
    std::vector<double> k(n, 0.0);
    if (n < 2) return k;
    k.front() = (force_x[1] - force_x[0]) / (delta_x[1] - delta_x[0]);
    k.back() = (force_x[n - 1] - force_x[n - 2]) / (delta_x[n - 1] - delta_x[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        k[i] = (force_x[i + 1] - force_x[i - 1]) / (delta_x[i + 1] - delta_x[i - 1]);
    }
    return k;
}

std::vector<QuasiBucklingMarker> detect_quasi_buckling(const std::vector<double>& delta_x,
                                                       const std::vector<double>& force_x, double drop_ratio) {
    if (!(drop_ratio > 0.0)) throw InvalidArgumentError("drop ratio must be positive");
    std::vector<QuasiBucklingMarker> markers;
    if (delta_x.size() < 3) return markers;
    const std::vector<double> stiffness = discrete_stiffness(delta_x, force_x);

    const double window_end = delta_x.front() + 0.2 * (delta_x.back() - delta_x.front());
    double reference = -kInfinity;
    for (std::size_t i = 0; i < delta_x.size() && delta_x[i] <= window_end; ++i) {
        reference = std::max(reference, stiffness[i]);
    }
    if (!(reference > 0.0)) return markers;

    const double threshold = drop_ratio * reference;
    bool below = false;
    for (std::size_t i = 0; i < stiffness.size(); ++i) {
        const bool now_below = stiffness[i] < threshold;
        if (now_below && !below) markers.push_back({delta_x[i], stiffness[i] / reference});
        below = now_below;
    }
    return markers;
}

std::vector<QuasiBucklingMarker> detect_quasi_buckling(const SweepResult& result, double drop_ratio) {
    std::vector<double> d, f;
    d.reserve(result.points.size());
    f.reserve(result.points.size());
    for (const auto& p : result.points) {
        d.push_back(p.deflection.delta_x);
        f.push_back(p.force.fx);
    }
    return detect_quasi_buckling(d, f, drop_ratio);
}

}  // namespace nlstiff
