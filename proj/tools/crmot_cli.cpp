// crmot: evaluate, filter, synthesize and validate cross-view referring
// tracking data from the command line.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crmot/config.hpp"
#include "crmot/datamodel.hpp"
#include "crmot/fusion.hpp"
#include "crmot/ingest.hpp"
#include "crmot/report.hpp"
#include "crmot/synth.hpp"
#include "crmot/vocabulary.hpp"
#include "crmot/workflow.hpp"

namespace fs = std::filesystem;
using namespace crmot;

namespace {

struct CommonFlags {
  std::optional<double> iou_threshold, alpha, beta, t_as, t_ss, t_hs, s1, s2, s3;
  std::optional<std::string> accumulation, emission;
  std::optional<fs::path> config_file;
  unsigned jobs = 0;
  unsigned long long seed = 0;
  fs::path out;
};

void add_common_flags(CLI::App& app, CommonFlags& f) {
  app.add_option("--iou-threshold", f.iou_threshold, "IoU needed for a GT/prediction match");
  app.add_option("--alpha", f.alpha, "Feature fusion weight");
  app.add_option("--beta", f.beta, "Score fusion weight");
  app.add_option("--t-as", f.t_as, "Mean fused score threshold");
  app.add_option("--t-ss", f.t_ss, "Single-view fused score threshold");
  app.add_option("--t-hs", f.t_hs, "Hit score threshold");
  app.add_option("--s1", f.s1, "Hit increment on the mean branch");
  app.add_option("--s2", f.s2, "Hit increment per single-view multiple");
  app.add_option("--s3", f.s3, "Hit decrement per weak view");
  app.add_option("--accumulation", f.accumulation, "per_frame or per_track");
  app.add_option("--emission", f.emission, "per_frame or whole_track");
  app.add_option("--config", f.config_file, "JSON config; its values override flags");
  app.add_option("--jobs", f.jobs, "Worker threads (0 = number of processors)");
  app.add_option("--seed", f.seed, "Random seed");
  app.add_option("--out", f.out, "Output path");
}

RunConfig effective_config(const CommonFlags& f) {
  RunConfig c;
  if (f.iou_threshold) c.metric.iou_threshold = *f.iou_threshold;
  if (f.alpha) c.weights.alpha = *f.alpha;
  if (f.beta) c.weights.beta = *f.beta;
  if (f.t_as) c.predictor.t_as = *f.t_as;
  if (f.t_ss) c.predictor.t_ss = *f.t_ss;
  if (f.t_hs) c.predictor.t_hs = *f.t_hs;
  if (f.s1) c.predictor.s1 = *f.s1;
  if (f.s2) c.predictor.s2 = *f.s2;
  if (f.s3) c.predictor.s3 = *f.s3;
  if (f.accumulation) c.predictor.accumulation = parse_accumulation(*f.accumulation);
  if (f.emission) c.predictor.emission = parse_emission(*f.emission);
  if (f.config_file) c = apply_config_file(c, *f.config_file);
  c.validate();
  return c;
}

void warn(const std::string& message) { std::cerr << "warning: " << message << "\n"; }

struct SceneFlags {
  fs::path scene_dir;
  std::optional<fs::path> descriptions;
};

int run_evaluate(const CommonFlags& f, const SceneFlags& s, const fs::path& predictions_root) {
  std::vector<std::string> warnings;
  const Report report = evaluate_directory(effective_config(f), s.scene_dir, predictions_root,
                                           s.descriptions, f.jobs, &warnings);
  for (const auto& w : warnings) warn(w);
  if (!f.out.empty()) write_report(report, f.out);
  std::cout << format_table(report);
  return 0;
}

int run_filter(const CommonFlags& f, const fs::path& tracks_dir, const fs::path& scores_root) {
  if (f.out.empty()) throw std::invalid_argument("filter: --out is required");
  for (const auto& s : filter_directory(effective_config(f), tracks_dir, scores_root, f.out)) {
    std::cout << s.description_id << ": kept " << s.tracks << " tracks, " << s.detections
              << " detections\n";
  }
  return 0;
}

struct SynthFlags {
  int views = 3;
  int ids = 4;
  int frames = 20;
  int descriptions = 4;
  int width = 1920;
  int height = 1080;
  double hi = 0.95;
  double lo = 0.05;
  double jitter = 0.0;
  std::optional<fs::path> errors;
};

int run_synth(const CommonFlags& f, const SynthFlags& s) {
  if (f.out.empty()) throw std::invalid_argument("synth: --out is required");
  SynthOptions o;
  o.views = s.views;
  o.ids = s.ids;
  o.frames = s.frames;
  o.descriptions = s.descriptions;
  o.image = {s.width, s.height};
  o.hi = s.hi;
  o.lo = s.lo;
  o.jitter = s.jitter;
  if (s.errors) o.errors = parse_error_spec(*s.errors);
  o.seed = f.seed;
  const SynthSummary summary = synth_directory(o, f.out);
  std::cout << "wrote " << summary.gt_detections << " GT detections, " << summary.descriptions
            << " descriptions to " << f.out.string() << "\n";
  return 0;
}

int run_validate(const SceneFlags& s) {
  const Scene scene = read_scene_unchecked(s.scene_dir / "manifest.json", s.scene_dir / "gt");
  ValidationReport report = validate_scene(scene);
  if (report.ok() && s.descriptions) {
    const auto& vocab = AttributeVocabulary::standard();
    for (const auto& d : parse_descriptions(*s.descriptions)) {
      for (const auto& v : validate_description(d, scene, vocab).violations) {
        report.add(v.kind, "description " + d.id + ": " + v.message);
      }
    }
  }
  if (report.ok()) {
    std::cout << "ok: " << scene.num_detections() << " detections in " << scene.gt_tracks.size()
              << " tracks\n";
    return 0;
  }
  std::cerr << report.to_string();
  return 1;
}

int run_fuse_check(const CommonFlags& f, int trials) {
  int failures = 0;
  for (const auto& check : fusion_self_check(f.seed == 0 ? 2024 : f.seed, trials)) {
    std::cout << (check.passed ? "PASS " : "FAIL ") << check.name;
    if (!check.detail.empty()) std::cout << "  " << check.detail;
    std::cout << "\n";
    if (!check.passed) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-view referring multi-object tracking toolkit"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth");
  SceneFlags eval_scene;
  fs::path predictions_root;
  evaluate->add_option("--scene", eval_scene.scene_dir, "Directory with manifest.json and gt/")
      ->required();
  evaluate->add_option("--descriptions", eval_scene.descriptions,
                       "Descriptions file (default <scene>/descriptions.json)");
  evaluate->add_option("--predictions", predictions_root, "Root with one directory per description")
      ->required();
  add_common_flags(*evaluate, flags);

  auto* filter = app.add_subcommand("filter", "Keep the detections the predictor emits");
  fs::path tracks_dir, scores_root;
  filter->add_option("--tracks", tracks_dir, "Directory of view_<k>.csv tracker output")->required();
  filter->add_option("--scores", scores_root, "Root with one scored directory per description")
      ->required();
  add_common_flags(*filter, flags);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene with an error ledger");
  SynthFlags synth_flags;
  synth->add_option("--views", synth_flags.views, "Number of views");
  synth->add_option("--ids", synth_flags.ids, "Number of identities");
  synth->add_option("--frames", synth_flags.frames, "Frames per view");
  synth->add_option("--errors", synth_flags.errors, "JSON error spec");
  synth->add_option("--descriptions", synth_flags.descriptions, "Number of descriptions");
  synth->add_option("--width", synth_flags.width, "Image width");
  synth->add_option("--height", synth_flags.height, "Image height");
  synth->add_option("--hi", synth_flags.hi, "Score of referred detections");
  synth->add_option("--lo", synth_flags.lo, "Score of other detections");
  synth->add_option("--jitter", synth_flags.jitter, "Uniform score jitter");
  add_common_flags(*synth, flags);

  auto* validate = app.add_subcommand("validate", "Check a scene and optional descriptions");
  SceneFlags validate_scene_flags;
  validate->add_option("--scene", validate_scene_flags.scene_dir, "Scene directory")->required();
  validate->add_option("--descriptions", validate_scene_flags.descriptions, "Descriptions file");

  auto* fuse_check = app.add_subcommand("fuse-check", "Run the fusion and loss self-tests");
  int trials = 1000;
  fuse_check->add_option("--trials", trials, "Random trials per property");
  fuse_check->add_option("--seed", flags.seed, "Random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*evaluate) return run_evaluate(flags, eval_scene, predictions_root);
    if (*filter) return run_filter(flags, tracks_dir, scores_root);
    if (*synth) return run_synth(flags, synth_flags);
    if (*validate) return run_validate(validate_scene_flags);
    if (*fuse_check) return run_fuse_check(flags, trials);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
