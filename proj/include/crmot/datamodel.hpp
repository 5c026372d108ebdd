#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace crmot {

using Identity = std::int64_t;

// Axis-aligned box, top-left corner plus extent, in pixels.
// Construction rejects non-finite coordinates and non-positive extents.
class BBox {
 public:
  BBox(double x, double y, double w, double h);

  double x() const { return x_; }
  double y() const { return y_; }
  double w() const { return w_; }
  double h() const { return h_; }
  double right() const { return x_ + w_; }
  double bottom() const { return y_ + h_; }
  double area() const { return w_ * h_; }

  bool operator==(const BBox&) const = default;

 private:
  double x_, y_, w_, h_;
};

// Intersection over union of two closed rectangles. Symmetric, in [0, 1].
double iou(const BBox& a, const BBox& b);

// Identifies one observation slot: an identity seen in a view at a frame.
struct SlotKey {
  int view_id = 0;
  int frame = 0;
  Identity identity = 0;

  auto operator<=>(const SlotKey&) const = default;
};

struct Detection {
  int view_id = 0;
  int frame = 0;  // 1-based
  Identity identity = 0;
  BBox bbox{0, 0, 1, 1};

  SlotKey key() const { return {view_id, frame, identity}; }
  bool operator==(const Detection&) const = default;
};

// All detections of one identity, ordered by (frame, view_id).
struct Track {
  Identity identity = 0;
  std::vector<Detection> detections;

  bool operator==(const Track&) const = default;
};

// Groups detections by identity and orders each group by (frame, view_id).
// Tracks come out sorted by identity. Duplicates are kept so that
// validation can report them.
std::vector<Track> assemble_tracks(std::vector<Detection> detections);

// Flattens tracks back into a detection list (track order, then detection order).
std::vector<Detection> flatten(std::span<const Track> tracks);

struct Scene {
  std::string name;
  int num_views = 0;
  int frames_per_view = 0;
  int image_width = 0;
  int image_height = 0;
  std::vector<Track> gt_tracks;

  std::set<Identity> identities() const;
  std::size_t num_detections() const;
  bool operator==(const Scene&) const = default;
};

// Attribute values keyed by category name. A missing key means "null";
// setting a value of "null" erases the key, so equal sets compare equal.
class AttributeSet {
 public:
  static constexpr const char* kNull = "null";

  void set(const std::string& category, const std::string& value);
  // Returns "null" for absent categories.
  const std::string& get(const std::string& category) const;
  const std::map<std::string, std::string>& values() const { return values_; }
  bool empty() const { return values_.empty(); }

  bool operator==(const AttributeSet&) const = default;

 private:
  std::map<std::string, std::string> values_;
};

struct LanguageDescription {
  std::string id;
  std::string text;
  AttributeSet attributes;
  std::set<Identity> referred_identities;

  bool operator==(const LanguageDescription&) const = default;
};

struct Violation {
  enum class Kind {
    kSceneShape,
    kOutOfRange,
    kDuplicate,
    kIdentityMismatch,
    kOrdering,
    kUnknownCategory,
    kUnknownWord,
    kUnknownIdentity,
  };
  Kind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t size() const { return violations.size(); }
  void add(Violation::Kind kind, std::string message) {
    violations.push_back({kind, std::move(message)});
  }
  std::string to_string() const;
};

ValidationReport validate_scene(const Scene& scene);

class AttributeVocabulary;
ValidationReport validate_attributes(const AttributeSet& attrs,
                                     const AttributeVocabulary& vocab);

// Checks referred identities against the scene and attributes against vocab.
ValidationReport validate_description(const LanguageDescription& description,
                                      const Scene& scene,
                                      const AttributeVocabulary& vocab);

}  // namespace crmot
