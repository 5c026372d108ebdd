#include "crmot/datamodel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "crmot/vocabulary.hpp"

namespace crmot {

BBox::BBox(double x, double y, double w, double h) : x_(x), y_(y), w_(w), h_(h) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w) || !std::isfinite(h)) {
    throw std::invalid_argument("bbox coordinates must be finite");
  }
  if (!(w > 0.0) || !(h > 0.0)) {
    throw std::invalid_argument("bbox width and height must be positive");
  }
}

double iou(const BBox& a, const BBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x(), b.x());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y(), b.y());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  // Areas from the same corner differences as the overlap, so iou(a, a) == 1 exactly.
  const double area_a = (a.right() - a.x()) * (a.bottom() - a.y());
  const double area_b = (b.right() - b.x()) * (b.bottom() - b.y());
  const double uni = area_a + area_b - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

namespace {

bool frame_view_less(const Detection& a, const Detection& b) {
  return std::tie(a.frame, a.view_id) < std::tie(b.frame, b.view_id);
}

std::string describe(const Detection& d) {
  std::ostringstream os;
  os << "detection (view " << d.view_id << ", frame " << d.frame << ", id " << d.identity
     << ")";
  return os.str();
}

}  // namespace

std::vector<Track> assemble_tracks(std::vector<Detection> detections) {
  std::stable_sort(detections.begin(), detections.end(),
                   [](const Detection& a, const Detection& b) {
                     return std::tie(a.identity, a.frame, a.view_id) <
                            std::tie(b.identity, b.frame, b.view_id);
                   });
  std::vector<Track> tracks;
  for (auto& d : detections) {
    if (tracks.empty() || tracks.back().identity != d.identity) {
      tracks.push_back(Track{d.identity, {}});
    }
    tracks.back().detections.push_back(d);
  }
  return tracks;
}

std::vector<Detection> flatten(std::span<const Track> tracks) {
  std::vector<Detection> out;
  for (const auto& t : tracks) out.insert(out.end(), t.detections.begin(), t.detections.end());
  return out;
}

std::set<Identity> Scene::identities() const {
  std::set<Identity> ids;
  for (const auto& t : gt_tracks) ids.insert(t.identity);
  return ids;
}

std::size_t Scene::num_detections() const {
  std::size_t n = 0;
  for (const auto& t : gt_tracks) n += t.detections.size();
  return n;
}

void AttributeSet::set(const std::string& category, const std::string& value) {
  if (value == kNull) {
    values_.erase(category);
  } else {
    values_[category] = value;
  }
}

const std::string& AttributeSet::get(const std::string& category) const {
  static const std::string null_value(kNull);
  auto it = values_.find(category);
  return it == values_.end() ? null_value : it->second;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) os << v.message << '\n';
  return os.str();
}

ValidationReport validate_scene(const Scene& scene) {
  using K = Violation::Kind;
  ValidationReport report;
  if (scene.num_views < 2) {
    report.add(K::kSceneShape, "scene '" + scene.name + "' needs at least 2 views, has " +
                                   std::to_string(scene.num_views));
  }
  if (scene.frames_per_view < 1) {
    report.add(K::kSceneShape, "frames_per_view must be positive");
  }
  if (scene.image_width <= 0 || scene.image_height <= 0) {
    report.add(K::kSceneShape, "image size must be positive");
  }

  std::set<Identity> seen_tracks;
  for (const auto& track : scene.gt_tracks) {
    if (!seen_tracks.insert(track.identity).second) {
      report.add(K::kDuplicate,
                 "track identity " + std::to_string(track.identity) + " appears twice");
    }
    const Detection* prev = nullptr;
    for (const auto& d : track.detections) {
      if (d.identity != track.identity) {
        report.add(K::kIdentityMismatch, describe(d) + " is stored in track " +
                                             std::to_string(track.identity));
      }
      if (d.view_id < 0 || d.view_id >= scene.num_views) {
        report.add(K::kOutOfRange, describe(d) + ": view_id outside [0, " +
                                       std::to_string(scene.num_views) + ")");
      }
      if (d.frame < 1 || d.frame > scene.frames_per_view) {
        report.add(K::kOutOfRange, describe(d) + ": frame outside [1, " +
                                       std::to_string(scene.frames_per_view) + "]");
      }
      if (prev != nullptr) {
        if (prev->frame == d.frame && prev->view_id == d.view_id) {
          report.add(K::kDuplicate, describe(d) + " is duplicated");
        } else if (frame_view_less(d, *prev)) {
          report.add(K::kOrdering, describe(d) + " is out of (frame, view) order");
        }
      }
      prev = &d;
    }
  }
  return report;
}

ValidationReport validate_attributes(const AttributeSet& attrs,
                                     const AttributeVocabulary& vocab) {
  ValidationReport report;
  for (const auto& [category, word] : attrs.values()) {
    if (vocab.find(category) == nullptr) {
      report.add(Violation::Kind::kUnknownCategory, "unknown attribute category '" + category + "'");
    } else if (!vocab.contains(category, word)) {
      report.add(Violation::Kind::kUnknownWord,
                 "'" + word + "' is not a " + category + " word");
    }
  }
  return report;
}

ValidationReport validate_description(const LanguageDescription& description,
                                      const Scene& scene,
                                      const AttributeVocabulary& vocab) {
  ValidationReport report = validate_attributes(description.attributes, vocab);
  const auto ids = scene.identities();
  for (Identity id : description.referred_identities) {
    if (!ids.contains(id)) {
      report.add(Violation::Kind::kUnknownIdentity,
                 "description '" + description.id + "' refers to identity " +
                     std::to_string(id) + " which is not in the ground truth");
    }
  }
  return report;
}

}  // namespace crmot
