#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crmot/config.hpp"
#include "crmot/report.hpp"
#include "crmot/synth.hpp"

// Directory-level operations shared by the command-line tool and the
// Python module.
namespace crmot {

// Scores <predictions_root>/<description id>/ against the scene in
// `scene_dir` (manifest.json, gt/). A missing prediction directory is scored
// as empty and noted in `warnings` when given.
Report evaluate_directory(const RunConfig& config, const std::filesystem::path& scene_dir,
                          const std::filesystem::path& predictions_root,
                          const std::optional<std::filesystem::path>& descriptions = std::nullopt,
                          unsigned jobs = 0, std::vector<std::string>* warnings = nullptr);

struct FilterSummary {
  std::string description_id;
  std::size_t tracks = 0;
  std::size_t detections = 0;
};

// Applies the predictor to the tracks in `tracks_dir` once per scored
// description directory under `scores_root`, writing <out_root>/<id>/.
std::vector<FilterSummary> filter_directory(const RunConfig& config,
                                            const std::filesystem::path& tracks_dir,
                                            const std::filesystem::path& scores_root,
                                            const std::filesystem::path& out_root);

struct SynthOptions {
  int views = 3;
  int ids = 4;
  int frames = 20;
  int descriptions = 4;
  ImageSize image;
  double hi = 0.95;
  double lo = 0.05;
  double jitter = 0.0;
  ErrorSpec errors;
  std::uint64_t seed = 0;
};

struct SynthSummary {
  std::size_t gt_detections = 0;
  std::size_t descriptions = 0;
};

// Writes manifest.json, gt/, descriptions.json, tracks/, predictions/<id>/
// (with scores) and ledger.json under `out`.
SynthSummary synth_directory(const SynthOptions& options, const std::filesystem::path& out);

}  // namespace crmot
