#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "dsi/estimator.hpp"
#include "dsi/experiments.hpp"

namespace dsi {

std::string fmt17(double x);  // 17 significant digits, round-trip safe

// Strict key checking: unknown keys are configuration errors.
void check_keys(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                const std::string& context, std::vector<std::string>& errors);

nlohmann::json to_json(const SamplingScheme& scheme);
SamplingScheme scheme_from_json(const nlohmann::json& obj);

nlohmann::json to_json(const SubsidiaryModel& model);
SubsidiaryModel model_from_json(const nlohmann::json& obj);

nlohmann::json to_json(const HurstEstimate& est);
std::string hurst_report_text(const HurstEstimate& est);

nlohmann::json to_json(const StudyReport& report);
std::string study_report_csv(const StudyReport& report);

// SampledPath CSV: header "time,value".
void write_path_csv(const SampledPath& path, const std::filesystem::path& file);
SampledPath read_path_csv(const std::filesystem::path& file);

// Path matrix CSV: header row of grid times, one row per path.
void write_paths_csv(const Eigen::MatrixXd& paths, const std::vector<double>& grid,
                     const std::filesystem::path& file);

// Compact binary block: magic "DSI1", uint64 rows, uint64 cols, row-major
// little-endian 64-bit floats.
void write_paths_binary(const Eigen::MatrixXd& paths, const std::filesystem::path& file);
Eigen::MatrixXd read_paths_binary(const std::filesystem::path& file);

struct IndexSeries {
    std::vector<std::string> dates;  // ISO-8601, strictly increasing
    std::vector<double> closes;      // positive
    std::string source;

    SampledPath to_path() const;  // times are 0-based row positions
};

// Reads a header CSV, selects columns by name, filters to [date_from, date_to]
// (empty bound = unbounded). Throws ParseError (with line number),
// EmptySelectionError or NonMonotoneDatesError.
IndexSeries ingest_csv(const std::filesystem::path& file, const std::string& date_column,
                       const std::string& value_column, const std::string& date_from = "",
                       const std::string& date_to = "");

}  // namespace dsi
