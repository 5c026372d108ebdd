#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "crmot/datamodel.hpp"
#include "crmot/ingest.hpp"
#include "crmot/metrics.hpp"
#include "crmot/predictor.hpp"

namespace crmot {

struct ImageSize {
  int width = 1920;
  int height = 1080;
};

// Every identity is visible in every view at every frame. Trajectories are
// linear with jitter in a shared ground plane; each view sees them through a
// fixed per-view affine map. All randomness comes from `seed` via Rng.
// Throws std::invalid_argument for fewer than 2 views, no identities, no
// frames, or an image too small to hold a box.
Scene generate_scene(int num_views, int num_identities, int num_frames, ImageSize image_size,
                     std::uint64_t seed);

// Mean number of GT objects per frame per view.
double object_density(const Scene& scene);

// Number of injection events per category.
struct ErrorSpec {
  int misses = 0;
  int false_positives = 0;
  // An identity takes a fresh predicted label in every view from a chosen
  // frame onward.
  int temporal_switches = 0;
  // A single (view, frame) slot of an identity takes a fresh label.
  int crossview_mismatches = 0;

  bool operator==(const ErrorSpec&) const = default;
};

ErrorSpec parse_error_spec(const std::filesystem::path& path);

// Counts realized by construction, computed from the injected label table
// without any box matching.
struct Ledger {
  std::vector<FrameCounts> counts;
  EventTotals totals;
  double expected_cvma_raw = 0.0;
  std::optional<IdMeasures> expected_id_measures;  // set for <= 6 identities per side
};

struct PerturbResult {
  PredictionSet predictions;
  Ledger ledger;
};

// Deletes, relabels and adds detections so that per-frame matching recovers
// exactly the ledger. Each GT slot takes at most one perturbation; false
// positives are placed at least one box-width away from every GT box.
// Throws std::invalid_argument when the spec needs more slots than exist.
PerturbResult perturb(const Scene& scene, const ErrorSpec& spec, std::uint64_t seed);

inline constexpr std::size_t kOracleIdentityLimit = 6;

// Exhaustive search over all partial identity bijections. Throws
// std::invalid_argument above kOracleIdentityLimit identities per side.
IdMeasures oracle_id_measures(std::span<const Track> gt, std::span<const Track> pred,
                              double iou_threshold = 0.5);

// Referred predicted identities score around `hi`, others around `lo`, for
// both s_t and s_a, with uniform jitter of +-jitter clamped to [0, 1].
ScoreMap score_tracks(std::span<const Track> predictions, const std::set<Identity>& referred,
                      double hi, double lo, double jitter, std::uint64_t seed);

// Random attributes for every identity of the scene.
std::map<Identity, AttributeSet> assign_attributes(const Scene& scene, std::uint64_t seed);

// A description matching everyone ("A person.") followed by up to
// `count - 1` single-attribute descriptions, each referring to every
// identity sharing that attribute. Referred sets are never empty.
std::vector<LanguageDescription> generate_descriptions(
    const std::map<Identity, AttributeSet>& attributes, int count, std::uint64_t seed);

std::string ledger_to_json(const Ledger& ledger);

}  // namespace crmot
