#pragma once

#include <map>
#include <set>
#include <span>
#include <vector>

#include "crmot/datamodel.hpp"
#include "crmot/fusion.hpp"

namespace crmot {

// How hit score evidence is accumulated over a track's lifetime.
enum class Accumulation {
  kPerFrame,  // one update per frame, hit score carried across frames
  kPerTrack,  // one update per track using per-view mean fused scores
};

// Which detections of a track are output.
enum class Emission {
  kPerFrame,    // only detections at emitted frames
  kWholeTrack,  // the whole track if any frame is emitted
};

struct PredictorConfig {
  double t_as = 0.5;   // threshold on the mean fused score across views
  double t_ss = 0.75;  // threshold on a single view's fused score
  double t_hs = 30.0;  // hit score needed to emit outside the mean branch
  double s1 = 3.0;     // hit increment when the mean threshold is passed
  double s2 = 3.0;     // hit increment per multiple of t_ss in one view
  double s3 = 1.0;     // hit decrement for a view under t_ss
  Accumulation accumulation = Accumulation::kPerFrame;
  Emission emission = Emission::kPerFrame;

  void validate() const;  // throws std::invalid_argument
  bool operator==(const PredictorConfig&) const = default;
};

struct TrackState {
  Identity track_id = 0;
  double hit_score = 0.0;
  std::set<int> emitted_frames;
};

struct StepResult {
  TrackState state;
  bool emit = false;
};

// One update of the prediction rule with the fused scores of the views in
// which the track is present at a frame. Does not touch emitted_frames.
StepResult step(TrackState state, std::span<const double> view_scores,
                const PredictorConfig& config);

using ScoreMap = std::map<SlotKey, ScoreRecord>;

// Filters tracks by their fused scores (recomputed from s_t and s_a with
// beta). Output keeps identities; detections are a subset of the input.
// Throws std::invalid_argument if a detection has no score.
std::vector<Track> filter_tracks(std::span<const Track> tracks, const ScoreMap& scores,
                                 const PredictorConfig& config, double beta);

// Replays the rule over one track and returns its final state.
TrackState replay_track(const Track& track, const ScoreMap& scores,
                        const PredictorConfig& config, double beta);

}  // namespace crmot
