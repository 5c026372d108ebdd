#include "crmot/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "crmot/vocabulary.hpp"

namespace crmot {

using nlohmann::json;

ParseError::ParseError(fs::path file, int line, const std::string& message)
    : std::runtime_error(file.string() + (line > 0 ? ":" + std::to_string(line) : "") + ": " +
                         message),
      file_(std::move(file)),
      line_(line) {}

MissingInput::MissingInput(const fs::path& path)
    : std::runtime_error(path.string() + ": not found") {}

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
bool parse_field(std::string_view text, T& value) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

// Numeric fields of one row; the error names the first bad column.
class FieldReader {
 public:
  explicit FieldReader(std::vector<std::string_view> fields) : fields_(std::move(fields)) {}

  template <typename T>
  T get(std::size_t index, const char* name) {
    T value{};
    if (!parse_field(fields_.at(index), value)) {
      throw std::invalid_argument(std::string("bad ") + name + " value '" +
                                  std::string(fields_.at(index)) + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(value)) {
        throw std::invalid_argument(std::string(name) + " must be finite");
      }
    }
    return value;
  }

 private:
  std::vector<std::string_view> fields_;
};

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return in;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  return out;
}

[[noreturn]] void throw_row_errors(const fs::path& path, const std::vector<RowError>& errors) {
  std::ostringstream os;
  os << errors.size() << " bad row(s)";
  for (const auto& e : errors) os << "\n  " << path.string() << ":" << e.line << ": " << e.message;
  throw ParseError(path, errors.front().line, os.str());
}

void write_rows(std::ostream& out, std::vector<Detection> dets, const ScoreMap* scores) {
  std::sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
    return std::tie(a.frame, a.identity) < std::tie(b.frame, b.identity);
  });
  for (const auto& d : dets) {
    out << d.frame << ',' << d.identity << ',' << format_number(d.bbox.x()) << ','
        << format_number(d.bbox.y()) << ',' << format_number(d.bbox.w()) << ','
        << format_number(d.bbox.h());
    if (scores != nullptr) {
      if (auto it = scores->find(d.key()); it != scores->end()) {
        out << ',' << format_number(it->second.s_t) << ',' << format_number(it->second.s_a);
      }
    }
    out << '\n';
  }
}

std::vector<std::vector<Detection>> split_by_view(std::span<const Track> tracks, int num_views) {
  std::vector<std::vector<Detection>> views(static_cast<std::size_t>(std::max(num_views, 0)));
  for (const auto& d : flatten(tracks)) {
    if (d.view_id < 0 || d.view_id >= num_views) {
      throw std::invalid_argument("detection view " + std::to_string(d.view_id) +
                                  " is outside the scene's views");
    }
    views[static_cast<std::size_t>(d.view_id)].push_back(d);
  }
  return views;
}

template <typename T>
T required(const json& j, const char* key, const fs::path& path) {
  if (!j.contains(key)) throw ParseError(path, 0, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(path, 0, std::string("field '") + key + "': " + e.what());
  }
}

json read_json(const fs::path& path) {
  auto in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path, 0, e.what());
  }
}

}  // namespace

fs::path view_file(const fs::path& dir, int view) {
  return dir / ("view_" + std::to_string(view) + ".csv");
}

TrackCsv read_track_csv(const fs::path& path, bool allow_scores) {
  auto in = open_input(path);
  TrackCsv out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++out.total_rows;
    const auto fields = split_fields(line);
    const bool with_scores = fields.size() == 8;
    if (fields.size() != 6 && !(allow_scores && with_scores)) {
      out.errors.push_back({line_no, "expected " + std::string(allow_scores ? "6 or 8" : "6") +
                                         " fields, found " + std::to_string(fields.size())});
      continue;
    }
    try {
      FieldReader r(fields);
      TrackRow row;
      row.line = line_no;
      row.frame = r.get<int>(0, "frame");
      row.identity = r.get<Identity>(1, "id");
      if (row.frame < 1) throw std::invalid_argument("frame must be >= 1");
      row.bbox = BBox(r.get<double>(2, "x"), r.get<double>(3, "y"), r.get<double>(4, "w"),
                      r.get<double>(5, "h"));
      if (with_scores) {
        const ScoreRecord s{r.get<double>(6, "s_t"), r.get<double>(7, "s_a")};
        if (!(s.s_t >= 0.0 && s.s_t <= 1.0) || !(s.s_a >= 0.0 && s.s_a <= 1.0)) {
          throw std::invalid_argument("scores s_t and s_a must lie in [0, 1]");
        }
        row.score = s;
      }
      out.rows.push_back(row);
    } catch (const std::invalid_argument& e) {
      out.errors.push_back({line_no, e.what()});
    }
  }
  return out;
}

Scene read_scene_unchecked(const fs::path& manifest_path, const fs::path& gt_dir) {
  const json manifest = read_json(manifest_path);
  Scene scene;
  scene.name = required<std::string>(manifest, "name", manifest_path);
  scene.num_views = required<int>(manifest, "views", manifest_path);
  scene.frames_per_view = required<int>(manifest, "frames_per_view", manifest_path);
  scene.image_width = required<int>(manifest, "image_width", manifest_path);
  scene.image_height = required<int>(manifest, "image_height", manifest_path);
  if (scene.num_views < 1) throw ParseError(manifest_path, 0, "'views' must be positive");

  std::vector<Detection> detections;
  for (int v = 0; v < scene.num_views; ++v) {
    const fs::path file = view_file(gt_dir, v);
    if (!fs::exists(file)) throw ParseError(file, 0, "missing ground-truth file for view " +
                                                         std::to_string(v));
    const TrackCsv csv = read_track_csv(file, false);
    if (!csv.errors.empty()) throw_row_errors(file, csv.errors);
    for (const auto& row : csv.rows) {
      detections.push_back(Detection{v, row.frame, row.identity, row.bbox});
    }
  }
  scene.gt_tracks = assemble_tracks(std::move(detections));
  return scene;
}

Scene parse_scene(const fs::path& manifest_path, const fs::path& gt_dir) {
  Scene scene = read_scene_unchecked(manifest_path, gt_dir);
  const ValidationReport report = validate_scene(scene);
  if (!report.ok()) {
    throw ParseError(manifest_path, 0,
                     std::to_string(report.size()) + " scene violation(s)\n" + report.to_string());
  }
  return scene;
}

void write_scene(const Scene& scene, const fs::path& manifest_path, const fs::path& gt_dir) {
  const json manifest = {{"name", scene.name},
                         {"views", scene.num_views},
                         {"frames_per_view", scene.frames_per_view},
                         {"image_width", scene.image_width},
                         {"image_height", scene.image_height}};
  open_output(manifest_path) << manifest.dump(2) << '\n';
  const auto views = split_by_view(scene.gt_tracks, scene.num_views);
  for (int v = 0; v < scene.num_views; ++v) {
    auto out = open_output(view_file(gt_dir, v));
    write_rows(out, views[static_cast<std::size_t>(v)], nullptr);
  }
}

std::vector<LanguageDescription> parse_descriptions(const fs::path& path) {
  const json doc = read_json(path);
  if (!doc.is_array()) throw ParseError(path, 0, "expected a JSON array of descriptions");
  std::vector<LanguageDescription> out;
  for (const auto& entry : doc) {
    LanguageDescription d;
    d.id = required<std::string>(entry, "id", path);
    d.text = entry.value("text", std::string());
    if (entry.contains("attributes")) {
      const auto& attrs = entry.at("attributes");
      if (!attrs.is_object()) throw ParseError(path, 0, "description '" + d.id + "': attributes must be an object");
      for (const auto& [category, word] : attrs.items()) {
        if (!word.is_string()) {
          throw ParseError(path, 0, "description '" + d.id + "': attribute '" + category +
                                        "' must be a string");
        }
        d.attributes.set(category, word.get<std::string>());
      }
    }
    for (Identity id : required<std::vector<Identity>>(entry, "referred_identities", path)) {
      d.referred_identities.insert(id);
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<LanguageDescription> parse_descriptions(const fs::path& path, const Scene& scene,
                                                    const AttributeVocabulary& vocab) {
  auto descriptions = parse_descriptions(path);
  ValidationReport all;
  for (const auto& d : descriptions) {
    for (auto& v : validate_description(d, scene, vocab).violations) {
      all.violations.push_back(std::move(v));
    }
  }
  if (!all.ok()) throw ParseError(path, 0, all.to_string());
  return descriptions;
}

void write_descriptions(const std::vector<LanguageDescription>& descriptions,
                        const fs::path& path) {
  json doc = json::array();
  for (const auto& d : descriptions) {
    json attrs = json::object();
    for (const auto& [category, word] : d.attributes.values()) attrs[category] = word;
    doc.push_back({{"id", d.id},
                   {"text", d.text},
                   {"attributes", attrs},
                   {"referred_identities", std::vector<Identity>(d.referred_identities.begin(),
                                                                 d.referred_identities.end())}});
  }
  open_output(path) << doc.dump(2) << '\n';
}

PredictionSet parse_predictions(const fs::path& root, const std::string& description_id) {
  const fs::path dir = root / description_id;
  if (!fs::is_directory(dir)) throw MissingInput(dir);

  static const std::regex kViewName(R"(view_(\d+)\.csv)");
  std::vector<std::pair<int, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && std::regex_match(name, m, kViewName)) {
      files.emplace_back(std::stoi(m[1].str()), entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  PredictionSet out;
  out.description_id = description_id;
  std::vector<Detection> detections;
  std::set<SlotKey> seen;
  for (const auto& [view, file] : files) {
    TrackCsv csv = read_track_csv(file, true);
    for (const auto& row : csv.rows) {
      const Detection d{view, row.frame, row.identity, row.bbox};
      if (!seen.insert(d.key()).second) {
        csv.errors.push_back({row.line, "duplicate detection of id " +
                                            std::to_string(row.identity) + " at frame " +
                                            std::to_string(row.frame)});
        continue;
      }
      if (row.score) out.scores.emplace(d.key(), *row.score);
      detections.push_back(d);
    }
    if (!csv.errors.empty()) {
      std::sort(csv.errors.begin(), csv.errors.end(),
                [](const RowError& a, const RowError& b) { return a.line < b.line; });
      throw_row_errors(file, csv.errors);
    }
  }
  out.tracks = assemble_tracks(std::move(detections));
  return out;
}

void write_predictions(const PredictionSet& predictions, const fs::path& root, int num_views) {
  const fs::path dir = root / predictions.description_id;
  fs::create_directories(dir);
  const auto views = split_by_view(predictions.tracks, num_views);
  for (int v = 0; v < num_views; ++v) {
    auto out = open_output(view_file(dir, v));
    write_rows(out, views[static_cast<std::size_t>(v)], &predictions.scores);
  }
}

std::vector<double> EmbeddingRecord::fused(double alpha) const {
  return fuse_features(full_feature, encoder_feature, alpha);
}

std::vector<EmbeddingRecord> parse_embeddings(const fs::path& path) {
  auto in = open_input(path);
  std::vector<EmbeddingRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    try {
      if (fields.size() < 4) throw std::invalid_argument("expected view,frame,id,D,...");
      FieldReader r(fields);
      EmbeddingRecord rec;
      rec.key = {r.get<int>(0, "view"), r.get<int>(1, "frame"), r.get<Identity>(2, "id")};
      const auto dim = r.get<long>(3, "D");
      if (dim <= 0) throw std::invalid_argument("D must be positive");
      if (fields.size() != 4 + 2 * static_cast<std::size_t>(dim)) {
        throw std::invalid_argument("expected " + std::to_string(4 + 2 * dim) +
                                    " fields for D = " + std::to_string(dim) + ", found " +
                                    std::to_string(fields.size()));
      }
      for (long k = 0; k < dim; ++k) {
        rec.full_feature.push_back(r.get<double>(4 + static_cast<std::size_t>(k), "F_f"));
      }
      for (long k = 0; k < dim; ++k) {
        rec.encoder_feature.push_back(
            r.get<double>(4 + static_cast<std::size_t>(dim + k), "F_Ai"));
      }
      out.push_back(std::move(rec));
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, line_no, e.what());
    }
  }
  return out;
}

void write_embeddings(const std::vector<EmbeddingRecord>& records, const fs::path& path) {
  auto out = open_output(path);
  for (const auto& rec : records) {
    if (rec.full_feature.size() != rec.encoder_feature.size() || rec.full_feature.empty()) {
      throw std::invalid_argument("embedding features must be non-empty and of equal length");
    }
    out << rec.key.view_id << ',' << rec.key.frame << ',' << rec.key.identity << ','
        << rec.full_feature.size();
    for (double v : rec.full_feature) out << ',' << format_number(v);
    for (double v : rec.encoder_feature) out << ',' << format_number(v);
    out << '\n';
  }
}

}  // namespace crmot
