#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <string>
#include <vector>

#include "crmot/datamodel.hpp"

namespace crmot::test {

// Box of identity `id` parked at a fixed lane so different ids never overlap.
inline BBox lane_box(Identity id, double shift = 0.0) {
  return BBox(100.0 * static_cast<double>(id) + shift, 50.0, 40.0, 80.0);
}

// Every id visible in every view at every frame, each at its own lane.
inline Scene lane_scene(int views, std::vector<Identity> ids, int frames) {
  std::vector<Detection> dets;
  for (Identity id : ids) {
    for (int t = 1; t <= frames; ++t) {
      for (int v = 0; v < views; ++v) dets.push_back({v, t, id, lane_box(id)});
    }
  }
  Scene s;
  s.name = "lanes";
  s.num_views = views;
  s.frames_per_view = frames;
  s.image_width = 1920;
  s.image_height = 1080;
  s.gt_tracks = assemble_tracks(std::move(dets));
  return s;
}

// Copy of `tracks` with every detection of `from` relabelled to `to` when
// `pick` returns true for it.
template <typename Pred>
std::vector<Track> relabel(const std::vector<Track>& tracks, Identity to, Pred pick) {
  std::vector<Detection> dets;
  for (const auto& d : flatten(tracks)) {
    Detection copy = d;
    if (pick(d)) copy.identity = to;
    dets.push_back(copy);
  }
  return assemble_tracks(std::move(dets));
}

inline LanguageDescription refer(std::string id, std::set<Identity> ids) {
  LanguageDescription d;
  d.id = std::move(id);
  d.referred_identities = std::move(ids);
  return d;
}


// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("crmot-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace crmot::test
