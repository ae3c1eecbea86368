#include "nlstiff/cli/config.hpp"

#include "nlstiff/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace nlstiff::cli {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& source, const std::string& message) {
    throw InvalidArgumentError(source + ": " + message);
}

double number(const json& value, const std::string& source, const std::string& key) {
    if (!value.is_number()) fail(source, "'" + key + "' must be a number");
    const double v = value.get<double>();
    if (!std::isfinite(v)) fail(source, "'" + key + "' must be finite");
    return v;
}

int integer(const json& value, const std::string& source, const std::string& key) {
    if (!value.is_number_integer()) fail(source, "'" + key + "' must be an integer");
    return value.get<int>();
}

std::vector<double> numbers(const json& value, const std::string& source, const std::string& key) {
    if (!value.is_array()) fail(source, "'" + key + "' must be an array of numbers");
    std::vector<double> out;
    out.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        out.push_back(number(value[i], source, key + "[" + std::to_string(i) + "]"));
    }
    return out;
}

}  // namespace

BranchPolicy parse_branch_policy(const std::string& text) {
    if (text == "+" || text == "positive") return BranchPolicy::positive;
    if (text == "-" || text == "negative") return BranchPolicy::negative;
    if (text == "both") return BranchPolicy::both;
    throw InvalidArgumentError("branch must be '+', '-' or 'both', got '" + text + "'");
}

ChainModel AnalysisConfig::chain() const { return ChainModel(links, stiffness); }

Configuration AnalysisConfig::initial_configuration() const {
    return Configuration::relaxed(Eigen::Map<const Vector>(initial_angles.data(),
                                                           static_cast<Eigen::Index>(initial_angles.size())));
}

bool AnalysisConfig::straight() const {
    for (double a : initial_angles) {
        if (a != 0.0) return false;
    }
    return true;
}

AnalysisConfig parse_config(const std::string& json_text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(source, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) fail(source, "top level must be an object");
    for (const auto& [key, value] : doc.items()) {
        if (key != "links" && key != "stiffness" && key != "initial_angles" && key != "sweep" && key != "branch" &&
            key != "three_link") {
            fail(source, "unknown key '" + key + "'");
        }
    }

    AnalysisConfig cfg;
    if (!doc.contains("links")) fail(source, "missing 'links'");
    if (!doc.contains("stiffness")) fail(source, "missing 'stiffness'");
    cfg.links = numbers(doc["links"], source, "links");
    cfg.stiffness = numbers(doc["stiffness"], source, "stiffness");
    if (cfg.links.size() < 2) fail(source, "at least two links are required");
    if (cfg.stiffness.size() != cfg.links.size()) {
        fail(source, "'stiffness' has " + std::to_string(cfg.stiffness.size()) + " entries but 'links' has " +
                         std::to_string(cfg.links.size()));
    }
    for (double l : cfg.links) {
        if (!(l > 0.0)) fail(source, "link lengths must be positive");
    }
    for (double k : cfg.stiffness) {
        if (k < 0.0) fail(source, "joint stiffness must be nonnegative");
    }
    if (doc.contains("initial_angles")) {
        cfg.initial_angles = numbers(doc["initial_angles"], source, "initial_angles");
        if (cfg.initial_angles.size() != cfg.links.size()) {
            fail(source, "'initial_angles' must have one entry per link");
        }
    } else {
        cfg.initial_angles.assign(cfg.links.size(), 0.0);
    }

    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        if (!s.is_object()) fail(source, "'sweep' must be an object");
        SweepSettings sweep;
        for (const auto& [key, value] : s.items()) {
            if (key == "delta_max") {
                sweep.delta_max = number(value, source, "sweep.delta_max");
            } else if (key == "steps") {
                sweep.steps = integer(value, source, "sweep.steps");
            } else if (key == "seeds") {
                sweep.seeds = integer(value, source, "sweep.seeds");
            } else if (key == "drop_ratio") {
                sweep.drop_ratio = number(value, source, "sweep.drop_ratio");
            } else {
                fail(source, "unknown key 'sweep." + key + "'");
            }
        }
        if (!s.contains("delta_max") || !s.contains("steps")) {
            fail(source, "'sweep' needs 'delta_max' and 'steps'");
        }
        cfg.sweep = sweep;
    }
    if (doc.contains("branch")) {
        if (!doc["branch"].is_string()) fail(source, "'branch' must be a string");
        try {
            cfg.branch = parse_branch_policy(doc["branch"].get<std::string>());
        } catch (const InvalidArgumentError& e) {
            fail(source, e.what());
        }
    }
    if (doc.contains("three_link")) {
        const json& t = doc["three_link"];
        if (!t.is_object() || !t.contains("deltas")) fail(source, "'three_link' must be an object with 'deltas'");
        cfg.three_link_deltas = numbers(t["deltas"], source, "three_link.deltas");
    }

    try {
        (void)cfg.chain();
    } catch (const InvalidArgumentError& e) {
        fail(source, e.what());
    }
    return cfg;
}

AnalysisConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgumentError(path + ": cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

}  // namespace nlstiff::cli
