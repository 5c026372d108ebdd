#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crmot/config.hpp"
#include "crmot/metrics.hpp"

namespace crmot {

struct Report {
  RunConfig config;
  std::vector<DescriptionResult> descriptions;
  std::optional<AggregateScores> aggregate;  // empty when there are no descriptions

  bool operator==(const Report&) const = default;
};

Report make_report(const RunConfig& config, std::vector<DescriptionResult> results);

// JSON report. Numbers are written in shortest round-trip form, so
// report_from_json(report_to_json(r)) == r and equal reports are byte-equal.
std::string report_to_json(const Report& report);
Report report_from_json(std::string_view text);

void write_report(const Report& report, const std::filesystem::path& path);
Report read_report(const std::filesystem::path& path);

// Human-readable table, scores as percentages with two decimals.
std::string format_table(const Report& report);

}  // namespace crmot
