#pragma once

// JSON and CSV serialization of predictions, reports and spectra.

#include "config.hpp"

#include <json.hpp>

#include <filesystem>
#include <ostream>
#include <vector>

namespace vdiff::cli {

constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const Mat& a);
nlohmann::json to_json(const Scenario& scenario);
nlohmann::json to_json(const Target& target);
nlohmann::json to_json(const Prediction& prediction);
nlohmann::json to_json(const PropertyObservation& observation);

nlohmann::json predictions_document(const Scenario& scenario, const std::vector<Prediction>& predictions);

/// Overrides `predicted` from a predictions document. Rows are matched by
/// position and must carry the same label; throws ConfigError otherwise.
void apply_prediction_overrides(std::vector<Prediction>& predictions, const nlohmann::json& doc);

/// `csv_names[i]` is the trajectory file written for row i (empty if none).
nlohmann::json report_document(const Report& report, const std::vector<std::string>& csv_names);

/// Columns t, node_x, component, value; one line per sample.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

void write_spectrum_csv(std::ostream& out, const std::vector<EigenPair>& pairs);
/// Columns mode, node_x, component, value.
void write_eigenvector_csv(std::ostream& out, const DiscreteForm& form, const std::vector<EigenPair>& pairs);

/// Writes `content` atomically enough for our purposes (temp file + rename).
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace vdiff::cli
