#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hazmap/harness.hpp"
#include "json.hpp"

namespace hazmap {

inline constexpr const char* kConfigSchema = "hazmap.config/1";
inline constexpr const char* kReportSchema = "hazmap.report/1";
inline constexpr const char* kAblationSchema = "hazmap.ablation/1";

nlohmann::json config_to_json(const RunConfig& config);
/// Keys absent from `j` keep the values of the preset named by "preset" (or
/// by "objective"). Unknown keys and type mismatches raise ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json metrics_to_json(const MetricReport& m);
MetricReport metrics_from_json(const nlohmann::json& j);
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricReport& m);

nlohmann::json tree_to_json(const PartitionTree& tree);
nlohmann::json domain_to_json(const IdentifiedDomain& d);

nlohmann::json report_to_json(const RunReport& report, bool include_timings = true);
/// Restores what scoring needs: config, seed, algorithm, records, domains and metrics.
RunReport report_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);
void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);

/// Writes <prefix>_samples.csv (coords, sample_index, risk), <prefix>_stop_trace.csv
/// (n, C_T, F2_obv, stop) and <prefix>_domains.csv. Returns the paths written.
std::vector<std::filesystem::path> emit_plots(const RunReport& report, const std::filesystem::path& dir,
                                              const std::string& prefix = "run");

}  // namespace hazmap
