#pragma once

// On-disk formats.
//
//   scene manifest (JSON):  {"name", "views", "frames_per_view",
//                            "image_width", "image_height"}
//   ground truth:           <gt_dir>/view_<k>.csv, rows "frame,id,x,y,w,h"
//   predictions:            <root>/<description_id>/view_<k>.csv,
//                           rows "frame,id,x,y,w,h[,s_t,s_a]"
//   descriptions (JSON):    [{"id", "text", "attributes": {category: word},
//                             "referred_identities": [...]}]
//   embeddings (CSV):       rows "view,frame,id,D,F_f[0..D),F_Ai[0..D)"
//
// Boxes are top-left corner plus width/height in pixels; frames are 1-based;
// views are 0-based. CSV files have no header; blank lines are ignored.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crmot/datamodel.hpp"
#include "crmot/fusion.hpp"
#include "crmot/predictor.hpp"

namespace crmot {

namespace fs = std::filesystem;

class ParseError : public std::runtime_error {
 public:
  ParseError(fs::path file, int line, const std::string& message);

  const fs::path& file() const { return file_; }
  int line() const { return line_; }  // 0 when not tied to a line

 private:
  fs::path file_;
  int line_;
};

// A prediction directory (or view file set) that does not exist.
class MissingInput : public std::runtime_error {
 public:
  explicit MissingInput(const fs::path& path);
};

struct TrackRow {
  int line = 0;
  int frame = 0;
  Identity identity = 0;
  BBox bbox{0, 0, 1, 1};
  std::optional<ScoreRecord> score;
};

struct RowError {
  int line = 0;
  std::string message;
};

// Every non-blank line ends up in exactly one of rows or errors.
struct TrackCsv {
  std::vector<TrackRow> rows;
  std::vector<RowError> errors;
  std::size_t total_rows = 0;
};

TrackCsv read_track_csv(const fs::path& path, bool allow_scores);

fs::path view_file(const fs::path& dir, int view);

struct PredictionSet {
  std::string description_id;
  std::vector<Track> tracks;
  ScoreMap scores;

  bool operator==(const PredictionSet&) const = default;
};

struct EmbeddingRecord {
  SlotKey key;
  std::vector<double> full_feature;     // F_f
  std::vector<double> encoder_feature;  // F_Ai

  std::vector<double> fused(double alpha) const;
  bool operator==(const EmbeddingRecord&) const = default;
};

// Reads without validating Scene invariants; row-level problems still throw.
Scene read_scene_unchecked(const fs::path& manifest_path, const fs::path& gt_dir);
// Reads and validates; violations throw ParseError listing all of them.
Scene parse_scene(const fs::path& manifest_path, const fs::path& gt_dir);
void write_scene(const Scene& scene, const fs::path& manifest_path, const fs::path& gt_dir);

std::vector<LanguageDescription> parse_descriptions(const fs::path& path);
// Also checks each description against the scene and vocabulary.
class AttributeVocabulary;
std::vector<LanguageDescription> parse_descriptions(const fs::path& path, const Scene& scene,
                                                    const AttributeVocabulary& vocab);
void write_descriptions(const std::vector<LanguageDescription>& descriptions,
                        const fs::path& path);

// Throws MissingInput when <root>/<description_id> does not exist.
PredictionSet parse_predictions(const fs::path& root, const std::string& description_id);
// Writes view_0 .. view_{num_views-1}, empty files included.
void write_predictions(const PredictionSet& predictions, const fs::path& root, int num_views);

std::vector<EmbeddingRecord> parse_embeddings(const fs::path& path);
void write_embeddings(const std::vector<EmbeddingRecord>& records, const fs::path& path);

// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

}  // namespace crmot
