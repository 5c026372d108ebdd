#include "crmot/synth.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "crmot/random.hpp"
#include "crmot/render.hpp"
#include "crmot/vocabulary.hpp"

namespace crmot {

namespace {

struct ViewMap {
  double sx, sy, ox, oy;
};

struct Walker {
  double x0, y0, vx, vy, w, h;
};

}  // namespace

Scene generate_scene(int num_views, int num_identities, int num_frames, ImageSize image_size,
                     std::uint64_t seed) {
  if (num_views < 2) throw std::invalid_argument("generate_scene: need at least 2 views");
  if (num_identities < 1) throw std::invalid_argument("generate_scene: need at least 1 identity");
  if (num_frames < 1) throw std::invalid_argument("generate_scene: need at least 1 frame");
  if (image_size.width < 64 || image_size.height < 64) {
    throw std::invalid_argument("generate_scene: image must be at least 64x64 pixels");
  }
  const double width = image_size.width;
  const double height = image_size.height;
  Rng rng(seed);

  std::vector<ViewMap> views;
  for (int v = 0; v < num_views; ++v) {
    views.push_back({rng.uniform(0.85, 1.15), rng.uniform(0.85, 1.15),
                     rng.uniform(-0.1, 0.1) * width, rng.uniform(-0.1, 0.1) * height});
  }
  std::vector<Walker> walkers;
  for (int k = 0; k < num_identities; ++k) {
    Walker w;
    w.w = rng.uniform(0.03, 0.06) * width;
    w.h = std::min(w.w * rng.uniform(1.8, 2.6), 0.5 * height);
    w.x0 = rng.uniform(0.0, width - w.w);
    w.y0 = rng.uniform(0.0, height - w.h);
    w.vx = rng.uniform(-4.0, 4.0);
    w.vy = rng.uniform(-2.0, 2.0);
    walkers.push_back(w);
  }

  std::vector<Detection> detections;
  for (int k = 0; k < num_identities; ++k) {
    const Walker& w = walkers[static_cast<std::size_t>(k)];
    for (int t = 1; t <= num_frames; ++t) {
      const double x = w.x0 + w.vx * (t - 1) + rng.uniform(-1.0, 1.0);
      const double y = w.y0 + w.vy * (t - 1) + rng.uniform(-1.0, 1.0);
      for (int v = 0; v < num_views; ++v) {
        const ViewMap& m = views[static_cast<std::size_t>(v)];
        detections.push_back(Detection{v, t, static_cast<Identity>(k + 1),
                                       BBox(m.sx * x + m.ox, m.sy * y + m.oy, m.sx * w.w,
                                            m.sy * w.h)});
      }
    }
  }

  Scene scene;
  scene.name = "synthetic-" + std::to_string(seed);
  scene.num_views = num_views;
  scene.frames_per_view = num_frames;
  scene.image_width = image_size.width;
  scene.image_height = image_size.height;
  scene.gt_tracks = assemble_tracks(std::move(detections));
  return scene;
}

double object_density(const Scene& scene) {
  const double slots = static_cast<double>(scene.num_views) * scene.frames_per_view;
  return slots > 0 ? static_cast<double>(scene.num_detections()) / slots : 0.0;
}

ErrorSpec parse_error_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open error spec");
  ErrorSpec spec;
  try {
    const auto j = nlohmann::json::parse(in);
    for (const auto& [key, value] : j.items()) {
      const int n = value.get<int>();
      if (n < 0) throw ParseError(path, 0, "'" + key + "' must be non-negative");
      if (key == "misses") spec.misses = n;
      else if (key == "false_positives") spec.false_positives = n;
      else if (key == "temporal_switches") spec.temporal_switches = n;
      else if (key == "crossview_mismatches") spec.crossview_mismatches = n;
      else throw ParseError(path, 0, "unknown error category '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  return spec;
}

namespace {

bool separated(const BBox& fp, const BBox& gt) {
  return fp.x() >= gt.right() + fp.w() || fp.right() + fp.w() <= gt.x() ||
         fp.y() >= gt.bottom() + fp.h() || fp.bottom() + fp.h() <= gt.y();
}

BBox place_false_positive(const std::vector<BBox>& gt_boxes, const Scene& scene, Rng& rng) {
  const double width = std::max(scene.image_width, 64);
  const double height = std::max(scene.image_height, 64);
  const double w = rng.uniform(0.03, 0.06) * width;
  const double h = std::min(w * rng.uniform(1.8, 2.6), 0.5 * height);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const BBox candidate(rng.uniform(0.0, width - w), rng.uniform(0.0, height - h), w, h);
    if (std::all_of(gt_boxes.begin(), gt_boxes.end(),
                    [&](const BBox& g) { return separated(candidate, g); })) {
      return candidate;
    }
  }
  double right = 0.0;
  for (const auto& g : gt_boxes) right = std::max(right, g.right());
  return BBox(right + w, 0.0, w, h);
}

// Mismatch tallies straight from the label table: label changes along each
// (identity, view) sequence and differing labels across views per frame.
void tally_mismatches(const std::map<SlotKey, Identity>& labels,
                      std::map<int, FrameCounts>& frames) {
  std::map<std::pair<Identity, int>, std::vector<std::pair<int, Identity>>> by_view;
  std::map<std::pair<Identity, int>, std::vector<Identity>> by_frame;
  for (const auto& [slot, label] : labels) {
    by_view[{slot.identity, slot.view_id}].emplace_back(slot.frame, label);
    by_frame[{slot.identity, slot.frame}].push_back(label);
  }
  for (auto& [key, seq] : by_view) {
    std::sort(seq.begin(), seq.end());
    for (std::size_t k = 1; k < seq.size(); ++k) {
      if (seq[k].second != seq[k - 1].second) ++frames[seq[k].first].temporal_mismatches;
    }
  }
  for (const auto& [key, seen] : by_frame) {
    for (std::size_t a = 0; a < seen.size(); ++a) {
      for (std::size_t b = a + 1; b < seen.size(); ++b) {
        if (seen[a] != seen[b]) ++frames[key.second].crossview_mismatches;
      }
    }
  }
}

}  // namespace

PerturbResult perturb(const Scene& scene, const ErrorSpec& spec, std::uint64_t seed) {
  if (spec.misses < 0 || spec.false_positives < 0 || spec.temporal_switches < 0 ||
      spec.crossview_mismatches < 0) {
    throw std::invalid_argument("perturb: error counts must be non-negative");
  }
  std::map<SlotKey, BBox> gt_box;
  Identity max_id = 0;
  for (const auto& d : flatten(scene.gt_tracks)) {
    gt_box.emplace(d.key(), d.bbox);
    max_id = std::max(max_id, d.identity);
  }
  const std::size_t slot_count = gt_box.size();
  if (static_cast<std::size_t>(spec.misses) + spec.crossview_mismatches > slot_count) {
    throw std::invalid_argument("perturb: spec needs " +
                                std::to_string(spec.misses + spec.crossview_mismatches) +
                                " GT slots but the scene has " + std::to_string(slot_count));
  }

  Rng rng(seed);
  Identity next_label = max_id + 1;
  std::vector<SlotKey> order;
  for (const auto& [slot, box] : gt_box) order.push_back(slot);
  rng.shuffle(order);
  std::set<SlotKey> used;
  std::size_t cursor = 0;
  auto take_slot = [&]() -> SlotKey {
    while (cursor < order.size() && used.contains(order[cursor])) ++cursor;
    if (cursor == order.size()) {
      throw std::invalid_argument("perturb: not enough free GT slots for the spec");
    }
    used.insert(order[cursor]);
    return order[cursor++];
  };

  std::map<SlotKey, Identity> override_label;
  for (int k = 0; k < spec.crossview_mismatches; ++k) override_label[take_slot()] = next_label++;

  // (identity, frame) pairs with an earlier slot of that identity in the same view.
  std::set<std::pair<Identity, int>> switchable;
  {
    std::map<std::pair<Identity, int>, int> first_frame;  // (identity, view) -> frame
    for (const auto& [slot, box] : gt_box) {
      auto [it, inserted] = first_frame.try_emplace({slot.identity, slot.view_id}, slot.frame);
      if (!inserted && slot.frame > it->second) switchable.insert({slot.identity, slot.frame});
      it->second = std::min(it->second, slot.frame);
    }
  }
  std::vector<std::pair<Identity, int>> switch_candidates(switchable.begin(), switchable.end());
  rng.shuffle(switch_candidates);
  std::map<Identity, std::map<int, Identity>> switches;  // identity -> frame -> new label
  int placed = 0;
  for (const auto& [g, t] : switch_candidates) {
    if (placed == spec.temporal_switches) break;
    std::vector<SlotKey> slots_at;
    for (int v = 0; v < scene.num_views; ++v) {
      if (gt_box.contains({v, t, g})) slots_at.push_back({v, t, g});
    }
    if (std::any_of(slots_at.begin(), slots_at.end(),
                    [&](const SlotKey& s) { return used.contains(s); })) {
      continue;
    }
    used.insert(slots_at.begin(), slots_at.end());
    switches[g][t] = next_label++;
    ++placed;
  }
  if (placed < spec.temporal_switches) {
    throw std::invalid_argument("perturb: only " + std::to_string(placed) +
                                " temporal switches fit in the scene");
  }

  std::set<SlotKey> missing;
  for (int k = 0; k < spec.misses; ++k) missing.insert(take_slot());

  std::map<SlotKey, Identity> labels;  // surviving GT slots -> predicted label
  for (const auto& [slot, box] : gt_box) {
    if (missing.contains(slot)) continue;
    Identity label = slot.identity;
    if (auto it = override_label.find(slot); it != override_label.end()) {
      label = it->second;
    } else if (auto sw = switches.find(slot.identity); sw != switches.end()) {
      auto after = sw->second.upper_bound(slot.frame);
      if (after != sw->second.begin()) label = std::prev(after)->second;
    }
    labels.emplace(slot, label);
  }

  std::map<std::pair<int, int>, std::vector<BBox>> boxes_at;  // (view, frame)
  for (const auto& [slot, box] : gt_box) boxes_at[{slot.view_id, slot.frame}].push_back(box);
  std::vector<std::pair<int, int>> fp_slots;
  for (const auto& [vf, boxes] : boxes_at) fp_slots.push_back(vf);
  if (spec.false_positives > 0 && fp_slots.empty()) {
    throw std::invalid_argument("perturb: scene has no frames to place false positives in");
  }

  std::vector<Detection> detections;
  std::map<int, FrameCounts> frames;
  for (const auto& [slot, box] : gt_box) {
    FrameCounts& fc = frames[slot.frame];
    ++fc.gt;
    if (missing.contains(slot)) ++fc.misses;
  }
  for (const auto& [slot, label] : labels) {
    detections.push_back(Detection{slot.view_id, slot.frame, label, gt_box.at(slot)});
  }
  for (int k = 0; k < spec.false_positives; ++k) {
    const auto [view, frame] = fp_slots[static_cast<std::size_t>(
        rng.integer(0, static_cast<std::int64_t>(fp_slots.size()) - 1))];
    const BBox box = place_false_positive(boxes_at[{view, frame}], scene, rng);
    detections.push_back(Detection{view, frame, next_label++, box});
    ++frames[frame].false_positives;
  }
  tally_mismatches(labels, frames);

  PerturbResult out;
  out.predictions.tracks = assemble_tracks(std::move(detections));
  Ledger& ledger = out.ledger;
  for (auto& [t, fc] : frames) {
    fc.frame = t;
    ledger.counts.push_back(fc);
  }
  ledger.totals = sum_counts(ledger.counts);
  const EventTotals& tot = ledger.totals;
  if (tot.gt > 0) {
    const std::int64_t errors =
        tot.misses + tot.false_positives + 2 * (tot.temporal_mismatches + tot.crossview_mismatches);
    ledger.expected_cvma_raw = 1.0 - static_cast<double>(errors) / static_cast<double>(tot.gt);
  }
  if (scene.gt_tracks.size() <= kOracleIdentityLimit &&
      out.predictions.tracks.size() <= kOracleIdentityLimit) {
    ledger.expected_id_measures = oracle_id_measures(scene.gt_tracks, out.predictions.tracks);
  }
  return out;
}

namespace {

class BijectionSearch {
 public:
  BijectionSearch(std::vector<std::vector<std::int64_t>> overlap, std::size_t cols)
      : overlap_(std::move(overlap)), used_(cols, 0) {}

  std::int64_t best() {
    visit(0, 0);
    return best_;
  }

 private:
  void visit(std::size_t row, std::int64_t sum) {
    if (row == overlap_.size()) {
      best_ = std::max(best_, sum);
      return;
    }
    visit(row + 1, sum);
    for (std::size_t c = 0; c < used_.size(); ++c) {
      if (used_[c]) continue;
      used_[c] = 1;
      visit(row + 1, sum + overlap_[row][c]);
      used_[c] = 0;
    }
  }

  std::vector<std::vector<std::int64_t>> overlap_;
  std::vector<char> used_;
  std::int64_t best_ = 0;
};

}  // namespace

IdMeasures oracle_id_measures(std::span<const Track> gt, std::span<const Track> pred,
                              double iou_threshold) {
  std::vector<Identity> gt_ids, pred_ids;
  for (const auto& t : gt) gt_ids.push_back(t.identity);
  for (const auto& t : pred) pred_ids.push_back(t.identity);
  std::sort(gt_ids.begin(), gt_ids.end());
  gt_ids.erase(std::unique(gt_ids.begin(), gt_ids.end()), gt_ids.end());
  std::sort(pred_ids.begin(), pred_ids.end());
  pred_ids.erase(std::unique(pred_ids.begin(), pred_ids.end()), pred_ids.end());
  if (gt_ids.size() > kOracleIdentityLimit || pred_ids.size() > kOracleIdentityLimit) {
    throw std::invalid_argument("oracle_id_measures: at most 6 identities per side");
  }

  auto index_of = [](const std::vector<Identity>& ids, Identity id) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::vector<std::vector<std::int64_t>> overlap(gt_ids.size(),
                                                 std::vector<std::int64_t>(pred_ids.size(), 0));
  const auto gt_dets = flatten(gt);
  const auto pred_dets = flatten(pred);
  for (const auto& g : gt_dets) {
    for (const auto& p : pred_dets) {
      if (g.view_id == p.view_id && g.frame == p.frame && iou(g.bbox, p.bbox) >= iou_threshold) {
        ++overlap[index_of(gt_ids, g.identity)][index_of(pred_ids, p.identity)];
      }
    }
  }
  const std::int64_t idtp = BijectionSearch(std::move(overlap), pred_ids.size()).best();
  IdMeasures m;
  m.idtp = idtp;
  m.idfn = static_cast<std::int64_t>(gt_dets.size()) - idtp;
  m.idfp = static_cast<std::int64_t>(pred_dets.size()) - idtp;
  return m;
}

ScoreMap score_tracks(std::span<const Track> predictions, const std::set<Identity>& referred,
                      double hi, double lo, double jitter, std::uint64_t seed) {
  if (!(hi > lo) || lo < 0.0 || hi > 1.0) {
    if (!(hi == lo && lo >= 0.0 && hi <= 1.0)) {
      throw std::invalid_argument("score_tracks: need 0 <= lo <= hi <= 1");
    }
  }
  Rng rng(seed);
  ScoreMap scores;
  auto draw = [&](double base) {
    if (jitter <= 0.0) return base;
    return std::clamp(base + rng.uniform(-jitter, jitter), 0.0, 1.0);
  };
  for (const auto& d : flatten(predictions)) {
    const double base = referred.contains(d.identity) ? hi : lo;
    const double s_t = draw(base);
    const double s_a = draw(base);
    scores.emplace(d.key(), ScoreRecord{s_t, s_a});
  }
  return scores;
}

std::map<Identity, AttributeSet> assign_attributes(const Scene& scene, std::uint64_t seed) {
  const AttributeVocabulary& vocab = AttributeVocabulary::standard();
  Rng rng(seed);
  std::map<Identity, AttributeSet> out;
  for (Identity id : scene.identities()) {
    AttributeSet attrs;
    for (const auto& category : vocab.categories()) {
      if (rng.uniform() < 0.5) continue;
      const auto n = static_cast<std::int64_t>(category.words.size()) - 1;  // skip "null"
      attrs.set(category.name, category.words[static_cast<std::size_t>(rng.integer(0, n - 1))]);
    }
    out.emplace(id, std::move(attrs));
  }
  return out;
}

std::vector<LanguageDescription> generate_descriptions(
    const std::map<Identity, AttributeSet>& attributes, int count, std::uint64_t seed) {
  std::vector<LanguageDescription> out;
  if (count <= 0 || attributes.empty()) return out;

  LanguageDescription everyone;
  everyone.id = "d0";
  everyone.text = render_description(everyone.attributes);
  for (const auto& [id, attrs] : attributes) everyone.referred_identities.insert(id);
  out.push_back(std::move(everyone));

  std::set<std::pair<std::string, std::string>> present;
  for (const auto& [id, attrs] : attributes) {
    for (const auto& [category, word] : attrs.values()) present.insert({category, word});
  }
  std::vector<std::pair<std::string, std::string>> candidates(present.begin(), present.end());
  Rng rng(seed);
  rng.shuffle(candidates);
  for (const auto& [category, word] : candidates) {
    if (static_cast<int>(out.size()) == count) break;
    LanguageDescription d;
    d.id = "d" + std::to_string(out.size());
    d.attributes.set(category, word);
    d.text = render_description(d.attributes);
    for (const auto& [id, attrs] : attributes) {
      if (attrs.get(category) == word) d.referred_identities.insert(id);
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::string ledger_to_json(const Ledger& ledger) {
  nlohmann::ordered_json j;
  const EventTotals& t = ledger.totals;
  j["misses"] = t.misses;
  j["false_positives"] = t.false_positives;
  j["temporal_mismatches"] = t.temporal_mismatches;
  j["crossview_mismatches"] = t.crossview_mismatches;
  j["gt_total"] = t.gt;
  j["expected_cvma_raw"] = ledger.expected_cvma_raw;
  if (ledger.expected_id_measures) {
    j["expected_id_measures"] = {{"idtp", ledger.expected_id_measures->idtp},
                                 {"idfp", ledger.expected_id_measures->idfp},
                                 {"idfn", ledger.expected_id_measures->idfn}};
  } else {
    j["expected_id_measures"] = nullptr;
  }
  nlohmann::ordered_json frames = nlohmann::ordered_json::array();
  for (const auto& c : ledger.counts) {
    frames.push_back({c.frame, c.misses, c.false_positives, c.temporal_mismatches,
                      c.crossview_mismatches, c.gt});
  }
  j["frames"] = std::move(frames);
  return j.dump(2) + "\n";
}

}  // namespace crmot
