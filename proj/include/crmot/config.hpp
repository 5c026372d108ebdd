#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "crmot/fusion.hpp"
#include "crmot/metrics.hpp"
#include "crmot/predictor.hpp"

namespace crmot {

// Everything that affects computed numbers. Echoed into every report.
struct RunConfig {
  MetricConfig metric;
  FusionWeights weights;
  PredictorConfig predictor;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

std::string_view to_string(Accumulation a);
std::string_view to_string(Emission e);
Accumulation parse_accumulation(std::string_view text);
Emission parse_emission(std::string_view text);

// JSON object with keys iou_threshold, alpha, beta, t_as, t_ss, t_hs,
// s1, s2, s3, accumulation, emission.
std::string config_to_json(const RunConfig& config);

// Overrides the fields present in a JSON config; unknown keys throw.
RunConfig apply_config_json(RunConfig base, std::string_view text);
RunConfig apply_config_file(RunConfig base, const std::filesystem::path& path);

}  // namespace crmot
