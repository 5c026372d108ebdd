#include "crmot/metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "crmot/assignment.hpp"

namespace crmot {

void MetricConfig::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw std::invalid_argument("iou_threshold must lie in (0, 1]");
  }
}

EventTotals sum_counts(std::span<const FrameCounts> counts) {
  EventTotals t;
  for (const auto& c : counts) {
    t.misses += c.misses;
    t.false_positives += c.false_positives;
    t.temporal_mismatches += c.temporal_mismatches;
    t.crossview_mismatches += c.crossview_mismatches;
    t.gt += c.gt;
  }
  return t;
}

double IdMeasures::cvidp() const {
  const auto den = idtp + idfp;
  return den > 0 ? static_cast<double>(idtp) / static_cast<double>(den) : 0.0;
}

double IdMeasures::cvidr() const {
  const auto den = idtp + idfn;
  return den > 0 ? static_cast<double>(idtp) / static_cast<double>(den) : 0.0;
}

namespace {

struct SlotDetections {
  std::vector<Detection> gt;
  std::vector<Detection> pred;
};

// Detections bucketed by (frame, view).
using SlotIndex = std::map<std::pair<int, int>, SlotDetections>;

SlotIndex index_slots(std::span<const Track> gt, std::span<const Track> pred) {
  SlotIndex index;
  for (const auto& t : gt) {
    for (const auto& d : t.detections) index[{d.frame, d.view_id}].gt.push_back(d);
  }
  for (const auto& t : pred) {
    for (const auto& d : t.detections) index[{d.frame, d.view_id}].pred.push_back(d);
  }
  return index;
}

std::int64_t differing_pairs(const std::vector<Identity>& matched) {
  std::int64_t n = 0;
  for (std::size_t a = 0; a < matched.size(); ++a) {
    for (std::size_t b = a + 1; b < matched.size(); ++b) {
      if (matched[a] != matched[b]) ++n;
    }
  }
  return n;
}

std::size_t count_detections(std::span<const Track> tracks) {
  std::size_t n = 0;
  for (const auto& t : tracks) n += t.detections.size();
  return n;
}

}  // namespace

std::vector<Track> restrict_gt(const Scene& scene, const LanguageDescription& description) {
  std::vector<Track> out;
  for (const auto& t : scene.gt_tracks) {
    if (description.referred_identities.contains(t.identity)) out.push_back(t);
  }
  return out;
}

FrameMatch match_frame(std::span<const Detection> gt, std::span<const Detection> pred,
                       double iou_threshold) {
  FrameMatch out;
  std::vector<char> gt_used(gt.size(), 0), pred_used(pred.size(), 0);
  if (!gt.empty() && !pred.empty()) {
    CostMatrix cost(gt.size(), pred.size(), CostMatrix::kForbidden);
    for (std::size_t g = 0; g < gt.size(); ++g) {
      for (std::size_t p = 0; p < pred.size(); ++p) {
        const double overlap = iou(gt[g].bbox, pred[p].bbox);
        if (overlap >= iou_threshold) cost(g, p) = 1.0 - overlap;
      }
    }
    for (auto [g, p] : solve_lap(cost).pairs) {
      out.pairs.emplace_back(g, p);
      gt_used[g] = 1;
      pred_used[p] = 1;
    }
  }
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (!gt_used[g]) out.unmatched_gt.push_back(g);
  }
  for (std::size_t p = 0; p < pred.size(); ++p) {
    if (!pred_used[p]) out.unmatched_pred.push_back(p);
  }
  return out;
}

std::vector<FrameCounts> count_events(std::span<const Track> gt, std::span<const Track> pred,
                                      double iou_threshold) {
  const SlotIndex index = index_slots(gt, pred);
  std::vector<FrameCounts> frames;
  // (view, gt identity) -> predicted identity at the last matched frame
  std::map<std::pair<int, Identity>, Identity> last_match;
  // gt identity -> predicted identities it is matched to in each view, this frame
  std::map<Identity, std::vector<Identity>> frame_matches;

  auto close_frame = [&]() {
    if (frames.empty()) return;
    for (const auto& [g, matched] : frame_matches) {
      frames.back().crossview_mismatches += differing_pairs(matched);
    }
    frame_matches.clear();
  };

  for (const auto& [slot, dets] : index) {
    const auto [frame, view] = slot;
    if (frames.empty() || frames.back().frame != frame) {
      close_frame();
      frames.push_back(FrameCounts{frame, 0, 0, 0, 0, 0});
    }
    FrameCounts& fc = frames.back();
    const FrameMatch m = match_frame(dets.gt, dets.pred, iou_threshold);
    fc.gt += static_cast<std::int64_t>(dets.gt.size());
    fc.misses += static_cast<std::int64_t>(m.unmatched_gt.size());
    fc.false_positives += static_cast<std::int64_t>(m.unmatched_pred.size());
    for (auto [gi, pi] : m.pairs) {
      const Identity g = dets.gt[gi].identity;
      const Identity p = dets.pred[pi].identity;
      auto [it, inserted] = last_match.try_emplace({view, g}, p);
      if (!inserted) {
        if (it->second != p) ++fc.temporal_mismatches;
        it->second = p;
      }
      frame_matches[g].push_back(p);
    }
  }
  close_frame();
  return frames;
}

std::optional<double> cvma(const EventTotals& totals) {
  if (totals.gt <= 0) return std::nullopt;
  const std::int64_t errors = totals.misses + totals.false_positives + 2 * totals.mismatches();
  return 1.0 - static_cast<double>(errors) / static_cast<double>(totals.gt);
}

std::optional<double> cvma(std::span<const FrameCounts> counts) {
  return cvma(sum_counts(counts));
}

IdMeasures id_measures(std::span<const Track> gt, std::span<const Track> pred,
                       double iou_threshold) {
  IdMeasures out;
  const auto total_gt = static_cast<std::int64_t>(count_detections(gt));
  const auto total_pred = static_cast<std::int64_t>(count_detections(pred));

  std::map<Identity, std::size_t> gt_row, pred_col;
  for (const auto& t : gt) gt_row.try_emplace(t.identity, gt_row.size());
  for (const auto& t : pred) pred_col.try_emplace(t.identity, pred_col.size());

  std::int64_t idtp = 0;
  if (!gt_row.empty() && !pred_col.empty()) {
    std::vector<std::int64_t> overlap(gt_row.size() * pred_col.size(), 0);
    for (const auto& [slot, dets] : index_slots(gt, pred)) {
      for (const auto& g : dets.gt) {
        for (const auto& p : dets.pred) {
          if (iou(g.bbox, p.bbox) >= iou_threshold) {
            ++overlap[gt_row.at(g.identity) * pred_col.size() + pred_col.at(p.identity)];
          }
        }
      }
    }
    CostMatrix cost(gt_row.size(), pred_col.size());
    for (std::size_t r = 0; r < gt_row.size(); ++r) {
      for (std::size_t c = 0; c < pred_col.size(); ++c) {
        cost(r, c) = -static_cast<double>(overlap[r * pred_col.size() + c]);
      }
    }
    for (auto [r, c] : solve_lap(cost).pairs) idtp += overlap[r * pred_col.size() + c];
  }
  out.idtp = idtp;
  out.idfn = total_gt - idtp;
  out.idfp = total_pred - idtp;
  return out;
}

double cvidf1(const IdMeasures& m) {
  const double p = m.cvidp();
  const double r = m.cvidr();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

DescriptionResult evaluate_description(const Scene& scene,
                                       const LanguageDescription& description,
                                       std::span<const Track> predictions,
                                       const MetricConfig& config) {
  config.validate();
  const std::vector<Track> referred = restrict_gt(scene, description);

  DescriptionResult result;
  result.description_id = description.id;
  result.counts = count_events(referred, predictions, config.iou_threshold);
  result.id_measures = id_measures(referred, predictions, config.iou_threshold);
  result.cvidf1 = cvidf1(result.id_measures);

  const EventTotals totals = sum_counts(result.counts);
  if (auto value = cvma(totals)) {
    result.cvma_raw = *value;
  } else if (totals.false_positives == 0) {
    // Nothing referred and nothing predicted.
    result.cvma_raw = 1.0;
  } else {
    result.cvma_raw = 1.0 - static_cast<double>(totals.false_positives);
  }
  return result;
}

AggregateScores aggregate(std::span<const DescriptionResult> results) {
  if (results.empty()) {
    throw std::domain_error("aggregate: no descriptions to average over");
  }
  AggregateScores out;
  out.num_descriptions = results.size();
  double idf1_sum = 0.0, ma_sum = 0.0;
  for (const auto& r : results) {
    idf1_sum += r.cvidf1;
    ma_sum += std::max(r.cvma_raw, 0.0);
  }
  out.cvridf1 = idf1_sum / static_cast<double>(results.size());
  out.cvrma = ma_sum / static_cast<double>(results.size());
  return out;
}

}  // namespace crmot
