#pragma once

// CSV / JSON / SVG emission. Every writer is a pure function of the report,
// so repeated runs produce identical bytes.

#include <filesystem>
#include <string>
#include <vector>

#include "interpbound/study.hpp"
#include "interpbound/validation.hpp"

namespace interpbound::harness {

enum class Format { csv, json, svg };

/// Comma-separated subset of {csv, json, svg}.
std::vector<Format> parse_formats(std::string_view list);

std::string study_records_csv(const StudyReport& report);
std::string study_summary_csv(const StudyReport& report);
std::string study_aggregates_csv(const StudyReport& report);
std::string hull_records_csv(const StudyReport& report);
std::string histogram_csv(const StudyReport& report);
std::string hull_fractions_csv(const StudyReport& report);
std::string study_json(const StudyReport& report, const StudyConfig& config);
std::string study_svg(const StudyReport& report);

std::string validation_records_csv(const ValidationReport& report);
std::string validation_summary_csv(const ValidationReport& report);
std::string validation_json(const ValidationReport& report);
std::string validation_svg(const ValidationReport& report);

/// Writes the files for the requested formats into `out_dir` (created if
/// missing) and returns their paths. Throws IoFailure.
std::vector<std::filesystem::path> emit_report(const StudyReport& report, const StudyConfig& config,
                                               const std::vector<Format>& formats,
                                               const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> emit_report(const ValidationReport& report, const std::vector<Format>& formats,
                                               const std::filesystem::path& out_dir);

/// Writes `text` to `path`, throwing IoFailure on any error.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace interpbound::harness
