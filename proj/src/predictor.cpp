#include "crmot/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crmot {

void PredictorConfig::validate() const {
  for (double v : {t_as, t_ss, t_hs, s1, s2, s3}) {
    if (!std::isfinite(v)) throw std::invalid_argument("predictor parameters must be finite");
  }
  if (s1 < 0 || s2 < 0 || s3 < 0) {
    throw std::invalid_argument("hit increments s1, s2, s3 must be non-negative");
  }
  if (!(t_ss > 0)) throw std::invalid_argument("t_ss must be positive");
}

StepResult step(TrackState state, std::span<const double> view_scores,
                const PredictorConfig& config) {
  if (view_scores.empty()) {
    throw std::invalid_argument("step: track has no view scores at this frame");
  }
  const double mean = std::accumulate(view_scores.begin(), view_scores.end(), 0.0) /
                      static_cast<double>(view_scores.size());
  if (mean > config.t_as) {
    state.hit_score += config.s1;
    return {std::move(state), true};
  }
  for (double s : view_scores) {
    if (s > config.t_ss) {
      const double multiples = std::floor(s / config.t_ss);
      state.hit_score += multiples * config.s2;
    } else {
      state.hit_score = std::max(state.hit_score - config.s3, 0.0);
    }
  }
  const bool emit = state.hit_score > config.t_hs;
  return {std::move(state), emit};
}

namespace {

const ScoreRecord& score_of(const Detection& d, const ScoreMap& scores) {
  auto it = scores.find(d.key());
  if (it == scores.end()) {
    throw std::invalid_argument("no score for detection (view " + std::to_string(d.view_id) +
                                ", frame " + std::to_string(d.frame) + ", id " +
                                std::to_string(d.identity) + ")");
  }
  return it->second;
}

// Fused scores grouped by frame, views in ascending order.
std::map<int, std::vector<double>> scores_by_frame(const Track& track, const ScoreMap& scores,
                                                   double beta) {
  std::map<int, std::vector<double>> frames;
  for (const auto& d : track.detections) {
    frames[d.frame].push_back(score_of(d, scores).fused(beta));
  }
  return frames;
}

TrackState replay_per_frame(const Track& track, const ScoreMap& scores,
                            const PredictorConfig& config, double beta) {
  TrackState state{track.identity, 0.0, {}};
  for (const auto& [frame, view_scores] : scores_by_frame(track, scores, beta)) {
    StepResult r = step(std::move(state), view_scores, config);
    state = std::move(r.state);
    if (r.emit) state.emitted_frames.insert(frame);
  }
  return state;
}

TrackState replay_per_track(const Track& track, const ScoreMap& scores,
                            const PredictorConfig& config, double beta) {
  std::map<int, std::pair<double, int>> per_view;  // view -> (sum, count)
  for (const auto& d : track.detections) {
    auto& [sum, count] = per_view[d.view_id];
    sum += score_of(d, scores).fused(beta);
    ++count;
  }
  std::vector<double> view_means;
  for (const auto& [view, acc] : per_view) view_means.push_back(acc.first / acc.second);

  TrackState state{track.identity, 0.0, {}};
  if (view_means.empty()) return state;
  StepResult r = step(std::move(state), view_means, config);
  state = std::move(r.state);
  if (r.emit) {
    for (const auto& d : track.detections) state.emitted_frames.insert(d.frame);
  }
  return state;
}

}  // namespace

TrackState replay_track(const Track& track, const ScoreMap& scores,
                        const PredictorConfig& config, double beta) {
  config.validate();
  return config.accumulation == Accumulation::kPerFrame
             ? replay_per_frame(track, scores, config, beta)
             : replay_per_track(track, scores, config, beta);
}

std::vector<Track> filter_tracks(std::span<const Track> tracks, const ScoreMap& scores,
                                 const PredictorConfig& config, double beta) {
  std::vector<Track> out;
  for (const auto& track : tracks) {
    const TrackState state = replay_track(track, scores, config, beta);
    if (state.emitted_frames.empty()) continue;
    Track kept{track.identity, {}};
    for (const auto& d : track.detections) {
      if (config.emission == Emission::kWholeTrack || state.emitted_frames.contains(d.frame)) {
        kept.detections.push_back(d);
      }
    }
    out.push_back(std::move(kept));
  }
  return out;
}

}  // namespace crmot
