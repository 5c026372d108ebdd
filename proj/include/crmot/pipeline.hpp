#pragma once

#include <span>
#include <vector>

#include "crmot/datamodel.hpp"
#include "crmot/metrics.hpp"

namespace crmot {

// Evaluates description i against predictions[i] on up to `jobs` threads
// (0 = hardware concurrency). Results keep input order, so output does not
// depend on the pool size.
std::vector<DescriptionResult> evaluate_all(const Scene& scene,
                                            std::span<const LanguageDescription> descriptions,
                                            std::span<const std::vector<Track>> predictions,
                                            const MetricConfig& config, unsigned jobs = 0);

}  // namespace crmot
