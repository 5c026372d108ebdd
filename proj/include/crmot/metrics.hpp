#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crmot/datamodel.hpp"

namespace crmot {

struct MetricConfig {
  double iou_threshold = 0.5;  // minimum IoU for a GT/prediction match

  void validate() const;  // threshold must lie in (0, 1]
  bool operator==(const MetricConfig&) const = default;
};

// Event tallies at one time step, summed over all views.
struct FrameCounts {
  int frame = 0;
  std::int64_t misses = 0;
  std::int64_t false_positives = 0;
  std::int64_t temporal_mismatches = 0;
  std::int64_t crossview_mismatches = 0;
  std::int64_t gt = 0;

  std::int64_t mismatches() const { return temporal_mismatches + crossview_mismatches; }
  bool operator==(const FrameCounts&) const = default;
};

struct EventTotals {
  std::int64_t misses = 0;
  std::int64_t false_positives = 0;
  std::int64_t temporal_mismatches = 0;
  std::int64_t crossview_mismatches = 0;
  std::int64_t gt = 0;

  std::int64_t mismatches() const { return temporal_mismatches + crossview_mismatches; }
  bool operator==(const EventTotals&) const = default;
};

EventTotals sum_counts(std::span<const FrameCounts> counts);

struct IdMeasures {
  std::int64_t idtp = 0;
  std::int64_t idfp = 0;
  std::int64_t idfn = 0;

  // Ratios are 0 when their denominator is 0.
  double cvidp() const;
  double cvidr() const;
  bool operator==(const IdMeasures&) const = default;
};

struct DescriptionResult {
  std::string description_id;
  double cvidf1 = 0.0;
  double cvma_raw = 0.0;
  std::vector<FrameCounts> counts;
  IdMeasures id_measures;

  EventTotals totals() const { return sum_counts(counts); }
  bool operator==(const DescriptionResult&) const = default;
};

// Outcome of matching the detections of one (view, frame) slot.
struct FrameMatch {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (gt index, pred index)
  std::vector<std::size_t> unmatched_gt;
  std::vector<std::size_t> unmatched_pred;
};

// Ground truth tracks of the referred identities. Everything else is
// excluded so predictions of it count as false positives.
std::vector<Track> restrict_gt(const Scene& scene, const LanguageDescription& description);

// Minimum total (1 - IoU) matching; pairs under the IoU threshold are forbidden.
FrameMatch match_frame(std::span<const Detection> gt, std::span<const Detection> pred,
                       double iou_threshold);

// Per-frame misses, false positives, mismatches and GT totals. A mismatch is
// either a temporal switch (a GT identity matched in a view to a different
// predicted identity than at its previous matched frame in that view) or a
// cross-view inconsistency (an unordered pair of views where one GT identity
// is matched to different predicted identities at the same frame).
std::vector<FrameCounts> count_events(std::span<const Track> gt, std::span<const Track> pred,
                                      double iou_threshold);

// 1 - (misses + fps + 2 * mismatches) / gt; empty when gt totals zero.
std::optional<double> cvma(const EventTotals& totals);
std::optional<double> cvma(std::span<const FrameCounts> counts);

// Optimal global identity bijection maximizing the number of (view, frame)
// slots where the paired identities overlap with IoU >= threshold.
IdMeasures id_measures(std::span<const Track> gt, std::span<const Track> pred,
                       double iou_threshold);

// Harmonic mean of precision and recall; 0 when both are 0.
double cvidf1(const IdMeasures& m);

DescriptionResult evaluate_description(const Scene& scene,
                                       const LanguageDescription& description,
                                       std::span<const Track> predictions,
                                       const MetricConfig& config = {});

struct AggregateScores {
  std::size_t num_descriptions = 0;
  double cvridf1 = 0.0;
  double cvrma = 0.0;  // mean of max(cvma_raw, 0)

  bool operator==(const AggregateScores&) const = default;
};

// Throws std::domain_error for an empty result list.
AggregateScores aggregate(std::span<const DescriptionResult> results);

}  // namespace crmot
