#pragma once

#include "nlstiff/chain_model.hpp"
#include "nlstiff/sweep.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nlstiff::cli {

struct SweepSettings {
    double delta_max = 0.0;
    int steps = 0;
    int seeds = 8;
    double drop_ratio = 0.1;
};

// One analysis job as read from a JSON document.
struct AnalysisConfig {
    std::vector<double> links;
    std::vector<double> stiffness;
    std::vector<double> initial_angles;  // all zero when absent
    std::optional<SweepSettings> sweep;
    std::optional<BranchPolicy> branch;
    std::vector<double> three_link_deltas;

    ChainModel chain() const;
    Configuration initial_configuration() const;
    bool straight() const;
};

// Throws InvalidArgumentError naming `source` on malformed documents.
AnalysisConfig parse_config(const std::string& json_text, const std::string& source = "<config>");
AnalysisConfig load_config(const std::string& path);

BranchPolicy parse_branch_policy(const std::string& text);

}  // namespace nlstiff::cli
