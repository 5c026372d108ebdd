#include "crmot/workflow.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <stdexcept>

#include "crmot/ingest.hpp"
#include "crmot/pipeline.hpp"
#include "crmot/predictor.hpp"
#include "crmot/vocabulary.hpp"

namespace crmot {

namespace {

std::vector<std::string> subdirectories(const fs::path& root) {
  if (!fs::is_directory(root)) throw MissingInput(root);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

// parse_predictions expects a root and a directory name.
PredictionSet read_track_dir(const fs::path& dir) {
  fs::path norm = fs::absolute(dir).lexically_normal();
  if (norm.filename().empty()) norm = norm.parent_path();
  return parse_predictions(norm.parent_path(), norm.filename().string());
}

int count_view_files(const fs::path& dir) {
  static const std::regex kViewName(R"(view_(\d+)\.csv)");
  int views = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, kViewName)) views = std::max(views, std::stoi(m[1].str()) + 1);
  }
  return views;
}

}  // namespace

Report evaluate_directory(const RunConfig& config, const fs::path& scene_dir,
                          const fs::path& predictions_root,
                          const std::optional<fs::path>& descriptions, unsigned jobs,
                          std::vector<std::string>* warnings) {
  config.validate();
  const Scene scene = parse_scene(scene_dir / "manifest.json", scene_dir / "gt");
  const auto parsed = parse_descriptions(descriptions.value_or(scene_dir / "descriptions.json"),
                                         scene, AttributeVocabulary::standard());
  std::vector<std::vector<Track>> predictions;
  for (const auto& d : parsed) {
    if (!fs::is_directory(predictions_root / d.id)) {
      if (warnings) {
        warnings->push_back((predictions_root / d.id).string() +
                            ": no predictions for description '" + d.id +
                            "', scoring it as empty");
      }
      predictions.emplace_back();
      continue;
    }
    predictions.push_back(parse_predictions(predictions_root, d.id).tracks);
  }
  return make_report(config, evaluate_all(scene, parsed, predictions, config.metric, jobs));
}

std::vector<FilterSummary> filter_directory(const RunConfig& config, const fs::path& tracks_dir,
                                            const fs::path& scores_root,
                                            const fs::path& out_root) {
  config.validate();
  const PredictionSet tracks = read_track_dir(tracks_dir);
  const int num_views = count_view_files(tracks_dir);
  std::vector<FilterSummary> out;
  for (const auto& id : subdirectories(scores_root)) {
    const PredictionSet scored = parse_predictions(scores_root, id);
    PredictionSet kept;
    kept.description_id = id;
    kept.tracks = filter_tracks(tracks.tracks, scored.scores, config.predictor, config.weights.beta);
    write_predictions(kept, out_root, num_views);
    FilterSummary s{id, kept.tracks.size(), 0};
    for (const auto& t : kept.tracks) s.detections += t.detections.size();
    out.push_back(std::move(s));
  }
  return out;
}

SynthSummary synth_directory(const SynthOptions& o, const fs::path& out) {
  const Scene scene = generate_scene(o.views, o.ids, o.frames, o.image, o.seed);
  const auto attributes = assign_attributes(scene, o.seed + 1);
  const auto descriptions = generate_descriptions(attributes, o.descriptions, o.seed + 2);
  const PerturbResult perturbed = perturb(scene, o.errors, o.seed + 3);

  write_scene(scene, out / "manifest.json", out / "gt");
  write_descriptions(descriptions, out / "descriptions.json");
  PredictionSet plain = perturbed.predictions;
  plain.description_id = "tracks";
  write_predictions(plain, out, scene.num_views);
  for (std::size_t k = 0; k < descriptions.size(); ++k) {
    PredictionSet scored = perturbed.predictions;
    scored.description_id = descriptions[k].id;
    scored.scores = score_tracks(scored.tracks, descriptions[k].referred_identities, o.hi, o.lo,
                                 o.jitter, o.seed + 10 + k);
    write_predictions(scored, out / "predictions", scene.num_views);
  }
  std::ofstream ledger(out / "ledger.json", std::ios::binary);
  if (!ledger) throw std::runtime_error((out / "ledger.json").string() + ": cannot write");
  ledger << ledger_to_json(perturbed.ledger);
  return {scene.num_detections(), descriptions.size()};
}

}  // namespace crmot
