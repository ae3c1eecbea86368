#include "nlstiff/cli/app.hpp"

#include "nlstiff/buckling.hpp"
#include "nlstiff/cli/config.hpp"
#include "nlstiff/cli/format.hpp"
#include "nlstiff/errors.hpp"
#include "nlstiff/sweep.hpp"
#include "nlstiff/twolink.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>

namespace nlstiff::cli {

namespace {

struct GlobalOptions {
    std::vector<std::string> configs;
    OutputFormat format = OutputFormat::csv;
    std::uint64_t seed = 1;
    std::string out_path;
};

struct SweepOptions {
    std::string branch;
    std::optional<double> drop_ratio;
};

struct TwoLinkOptions {
    double alpha = 0.0;
    double k = 1.0;
    double length = 1.0;
    double qmax = 1.0;
    int samples = 100;
};

std::string number(double v, OutputFormat format) {
    return format == OutputFormat::csv ? format_csv_number(v) : format_text_number(v);
}

void write_scalar(std::ostream& out, const std::string& key, double v, OutputFormat format) {
    if (format == OutputFormat::csv) {
        out << key << ',' << format_csv_number(v) << '\n';
    } else {
        out << key << ": " << format_text_number(v) << '\n';
    }
}

std::string stability_label(const StabilityInfo& s) {
    std::string label = to_string(s.tag);
    if (s.degenerate) label += "-degenerate";
    return label;
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const InvalidArgumentError*>(&e) || dynamic_cast<const UnreachableError*>(&e) ||
        dynamic_cast<const NotApplicableError*>(&e)) {
        return kExitInvalidInput;
    }
    if (dynamic_cast<const ModelDegenerateError*>(&e)) return kExitModelDegenerate;
    return kExitNumericalFailure;
}

int run_critical_force(const AnalysisConfig& cfg, bool with_modes, const GlobalOptions& g, std::ostream& out,
                       std::ostream&) {
    if (!cfg.straight()) {
        throw InvalidArgumentError(
            "critical force is defined for the straight configuration only; the config has nonzero "
            "initial_angles, use the 'sweep' subcommand for a non-straight chain");
    }
    const ChainModel chain = cfg.chain();
    const std::vector<BucklingMode> modes = buckling_modes(chain);
    write_scalar(out, "critical_force", modes.front().axial_force, g.format);
    if (!with_modes) return kExitSuccess;

    std::vector<std::string> header{"mode", "eigenvalue", "axial_force", "energy_factor", "shape", "stability",
                                    "primary"};
    for (int i = 1; i <= chain.size() + 1; ++i) header.push_back("v" + std::to_string(i));
    Table table(std::move(header));
    for (std::size_t m = 0; m < modes.size(); ++m) {
        const BucklingMode& mode = modes[m];
        std::vector<Cell> row{static_cast<long>(m + 1), mode.eigenvalue, mode.axial_force, mode.energy_factor,
                              mode.shape.str(), std::string(mode.is_primary ? "stable" : "unstable"),
                              mode.is_primary};
        for (Eigen::Index i = 0; i < mode.mode_vector.size(); ++i) row.emplace_back(mode.mode_vector[i]);
        table.add_row(std::move(row));
    }
    out << "# modes\n";
    table.write(out, g.format);
    return kExitSuccess;
}

int run_sweep(const AnalysisConfig& cfg, const SweepOptions& opts, const GlobalOptions& g, std::ostream& out,
              std::ostream& err) {
    if (!cfg.sweep) throw InvalidArgumentError("config has no 'sweep' block");
    const SweepSettings& s = *cfg.sweep;
    SweepRequest request{cfg.chain(), cfg.initial_configuration(), s.delta_max, s.steps};
    request.seeds = s.seeds;
    request.rng_seed = g.seed;
    request.drop_ratio = opts.drop_ratio.value_or(s.drop_ratio);
    request.branch_policy = !opts.branch.empty() ? parse_branch_policy(opts.branch)
                                                 : cfg.branch.value_or(BranchPolicy::both);
    const SweepResult result = sweep_force_deflection(request);

    std::set<double> marked;
    for (const auto& m : result.quasi_buckling_markers) marked.insert(m.delta_x);
    Table table({"delta_x", "fx", "fy", "energy", "stability", "quasi_buckling"});
    for (const EquilibriumPoint& p : result.points) {
        table.add_row({p.deflection.delta_x, p.force.fx, p.force.fy, p.strain_energy, stability_label(p.stability),
                       marked.count(p.deflection.delta_x) > 0});
    }
    table.write(out, g.format);

    out << "# axis_rotation," << number(result.axis_rotation, g.format) << '\n';
    out << "# energy_monotone," << (result.energy_monotone ? "true" : "false") << '\n';
    for (const auto& m : result.quasi_buckling_markers) {
        out << "# quasi_buckling,delta_x=" << number(m.delta_x, g.format)
            << ",stiffness_ratio=" << number(m.stiffness_ratio, g.format) << '\n';
    }
    for (const auto& a : result.advisories) {
        out << "# advisory,delta_x=" << number(a.delta_x, g.format)
            << ",continued_energy=" << number(a.continued_energy, g.format)
            << ",alternative_energy=" << number(a.alternative_energy, g.format) << ",branch=" << to_string(a.branch)
            << '\n';
    }
    if (result.truncation) {
        out << "# truncated,delta_x=" << number(result.truncation->delta_x, g.format) << '\n';
        err << "sweep truncated at delta_x = " << format_text_number(result.truncation->delta_x) << ": "
            << result.truncation->reason << '\n';
        return kExitNumericalFailure;
    }
    return kExitSuccess;
}

int run_three_link(const AnalysisConfig& cfg, const std::vector<double>& flag_deltas, const GlobalOptions& g,
                   std::ostream& out, std::ostream& err) {
    const std::vector<double>& deltas = flag_deltas.empty() ? cfg.three_link_deltas : flag_deltas;
    if (deltas.empty()) throw InvalidArgumentError("no deflections given (use --delta or three_link.deltas)");
    const ChainModel chain = cfg.chain();
    if (chain.size() != 3) throw InvalidArgumentError("three-link needs a config with exactly three links");
    const Configuration initial = cfg.initial_configuration();

    int code = kExitSuccess;
    Table table({"delta", "branch", "q1", "q2", "q3", "fx", "fy", "energy", "stability", "residual"});
    for (double delta : deltas) {
        try {
            for (const EquilibriumPoint& p : three_link_equilibria(chain, initial, delta)) {
                const Vector& q = p.configuration.angles;
                table.add_row({delta, std::string(to_string(branch_of(q))), q[0], q[1], q[2], p.force.fx,
                               p.force.fy, p.strain_energy, stability_label(p.stability), p.residual_norm});
            }
        } catch (const UnreachableError& e) {
            err << "skipping delta " << format_text_number(delta) << ": " << e.what() << '\n';
            code = kExitInvalidInput;
        }
    }
    table.write(out, g.format);
    return code;
}

int run_twolink(const TwoLinkOptions& opts, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    if (opts.samples < 1) throw InvalidArgumentError("--samples must be at least 1");
    if (!std::isfinite(opts.qmax)) throw InvalidArgumentError("--qmax must be finite");
    const TwoLinkMechanism mech{opts.alpha, opts.k, opts.length};
    mech.validate();
    if (std::abs(opts.alpha) <= 1e-12) write_scalar(out, "critical_force", twolink_critical(mech), g.format);

    Table table({"q", "delta", "force", "potential"});
    for (int i = 0; i <= opts.samples; ++i) {
        const double q = opts.qmax * i / opts.samples;
        try {
            const TwoLinkSample s = twolink_curve(mech, {q}).front();
            table.add_row({s.q, s.deflection, s.force, s.potential});
        } catch (const SingularSampleError&) {
            err << "warning: skipping singular sample " << i << " (q = " << format_text_number(q)
                << ", sin(alpha + q) = 0)\n";
        }
    }
    table.write(out, g.format);
    return kExitSuccess;
}

// Runs `job` with its report directed to `target` (a path) or `fallback`.
int with_output(const std::string& target, std::ostream& fallback, std::ostream& err,
                const std::function<int(std::ostream&)>& job) {
    if (target.empty()) return job(fallback);
    std::ofstream file(target, std::ios::binary);
    if (!file) {
        err << "error: cannot write " << target << '\n';
        return kExitInvalidInput;
    }
    const int code = job(file);
    file.flush();
    if (!file) {
        err << "error: write to " << target << " failed\n";
        return kExitNumericalFailure;
    }
    return code;
}

int guarded(std::ostream& err, const std::string& label, const std::function<int()>& job) {
    try {
        return job();
    } catch (const Error& e) {
        err << "error" << (label.empty() ? "" : " [" + label + "]") << ": " << e.what() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Elastic serial-chain buckling and force-deflection analysis", "nlstiff"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    const std::map<std::string, OutputFormat> formats{{"csv", OutputFormat::csv}, {"text", OutputFormat::text}};
    app.add_option("--config", g.configs, "JSON analysis config (repeatable)");
    app.add_option("--format", g.format, "Output format")->transform(CLI::CheckedTransformer(formats));
    app.add_option("--seed", g.seed, "Seed for the sweep restart generator")->capture_default_str();
    app.add_option("--out", g.out_path, "Output file (a directory when several configs are given)");

    bool with_modes = false;
    auto* critical = app.add_subcommand("critical-force", "Critical force of a straight chain");
    critical->add_flag("--modes", with_modes, "Also print every buckling mode");

    SweepOptions sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "Force-deflection sweep from the configured initial shape");
    sweep->add_option("--branch", sweep_opts.branch, "Elbow branch policy: +, - or both");
    sweep->add_option("--drop-ratio", sweep_opts.drop_ratio, "Quasi-buckling stiffness drop ratio");

    TwoLinkOptions two;
    auto* twolink = app.add_subcommand("twolink", "Closed-form two-link mechanism curve");
    twolink->add_option("--alpha", two.alpha, "Initial link inclination (rad)")->capture_default_str();
    twolink->add_option("--k", two.k, "Spring stiffness")->capture_default_str();
    twolink->add_option("--L", two.length, "Link length")->capture_default_str();
    twolink->add_option("--qmax", two.qmax, "Largest spring deflection (rad)")->capture_default_str();
    twolink->add_option("--samples", two.samples, "Number of increments in [0, qmax]")->capture_default_str();

    std::vector<double> deltas;
    auto* three = app.add_subcommand("three-link", "All equilibria of a three-link chain at fixed deflections");
    three->add_option("--delta", deltas, "Axial deflection (repeatable)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitSuccess : kExitInvalidInput;
    }

    if (twolink->parsed()) {
        if (!g.configs.empty()) {
            err << "error: twolink takes its parameters from flags, not --config\n";
            return kExitInvalidInput;
        }
        return guarded(err, "", [&] {
            return with_output(g.out_path, out, err, [&](std::ostream& o) { return run_twolink(two, g, o, err); });
        });
    }

    if (g.configs.empty()) {
        err << "error: --config is required\n";
        return kExitInvalidInput;
    }

    std::function<int(const AnalysisConfig&, std::ostream&)> job;
    if (critical->parsed()) {
        job = [&](const AnalysisConfig& c, std::ostream& o) { return run_critical_force(c, with_modes, g, o, err); };
    } else if (sweep->parsed()) {
        job = [&](const AnalysisConfig& c, std::ostream& o) { return run_sweep(c, sweep_opts, g, o, err); };
    } else {
        job = [&](const AnalysisConfig& c, std::ostream& o) { return run_three_link(c, deltas, g, o, err); };
    }

    if (g.configs.size() == 1) {
        return guarded(err, "", [&] {
            const AnalysisConfig cfg = load_config(g.configs.front());
            return with_output(g.out_path, out, err, [&](std::ostream& o) { return job(cfg, o); });
        });
    }

    // Several configs: one report file per config inside the --out directory.
    if (g.out_path.empty()) {
        err << "error: several --config files need --out DIRECTORY\n";
        return kExitInvalidInput;
    }
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(g.out_path, ec);
    if (ec || !fs::is_directory(g.out_path)) {
        err << "error: cannot create output directory " << g.out_path << '\n';
        return kExitInvalidInput;
    }
    std::set<std::string> stems;
    for (const auto& path : g.configs) {
        if (!stems.insert(fs::path(path).stem().string()).second) {
            err << "error: two configs share the file name stem '" << fs::path(path).stem().string() << "'\n";
            return kExitInvalidInput;
        }
    }
    const std::string extension = g.format == OutputFormat::csv ? ".csv" : ".txt";
    int worst = kExitSuccess;
    for (const auto& path : g.configs) {
        const fs::path target = fs::path(g.out_path) / (fs::path(path).stem().string() + extension);
        const int code = guarded(err, path, [&] {
            const AnalysisConfig cfg = load_config(path);
            return with_output(target.string(), out, err, [&](std::ostream& o) { return job(cfg, o); });
        });
        worst = std::max(worst, code);
    }
    return worst;
}

}  // namespace nlstiff::cli
