#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "paam/analysis.hpp"

namespace paam {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::ordered_json to_json(const AnalysisReport& report);
/// Throws std::runtime_error on a document that is not a version-1 report.
AnalysisReport report_from_json(const nlohmann::json& doc);

/// One row per chain: id, priority, B_c, E_c, H_per_segment, H_per_chain,
/// H_star, R_c, D_c, schedulable. Times in ns; infinite values spelled
/// UNBOUNDED (handling) or UNSCHEDULABLE (response). First line is a
/// version comment.
std::string report_to_csv(const AnalysisReport& report);

/// Human-readable summary table.
std::string report_to_text(const AnalysisReport& report);

}  // namespace paam
