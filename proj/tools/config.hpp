#pragma once

// Run configuration for the command-line front end, read from a JSON file.

#include "vdiff/analyzer.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vdiff::cli {

/// Malformed or invalid configuration; `where` is "line L, column C" for
/// syntax errors and the JSON path of the offending field otherwise.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string where, const std::string& message)
        : std::runtime_error(where + ": " + message), where_(std::move(where)) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

struct RunConfig {
    Scenario scenario;
    std::vector<Target> targets;
    SimConfig sim;
    PredictOptions predict;
    int spectrum_k = 6;
    MassKind spectrum_mass = MassKind::consistent;
    std::filesystem::path out_dir = "out";
};

nlohmann::json parse_json_text(const std::string& text);
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

Scenario parse_scenario(const nlohmann::json& node, const std::string& path);
Target parse_target(const nlohmann::json& node, const std::string& path, Eigen::Index m);

Scheme scheme_from_string(const std::string& s, const std::string& path);
MassKind mass_from_string(const std::string& s, const std::string& path);
std::string to_string(Scheme scheme);
std::string to_string(MassKind mass);

}  // namespace vdiff::cli
