#include "crmot/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json_io.hpp"

namespace crmot {

using ojson = nlohmann::ordered_json;

Report make_report(const RunConfig& config, std::vector<DescriptionResult> results) {
  Report r;
  r.config = config;
  r.descriptions = std::move(results);
  if (!r.descriptions.empty()) r.aggregate = aggregate(r.descriptions);
  return r;
}

std::string report_to_json(const Report& report) {
  ojson doc;
  doc["config"] = detail::config_json(report.config);
  doc["descriptions"] = ojson::array();
  for (const auto& d : report.descriptions) {
    const EventTotals t = d.totals();
    ojson entry;
    entry["id"] = d.description_id;
    entry["cvidf1"] = d.cvidf1;
    entry["cvma_raw"] = d.cvma_raw;
    entry["cvma_clamped"] = std::max(d.cvma_raw, 0.0);
    entry["cvidp"] = d.id_measures.cvidp();
    entry["cvidr"] = d.id_measures.cvidr();
    entry["idtp"] = d.id_measures.idtp;
    entry["idfp"] = d.id_measures.idfp;
    entry["idfn"] = d.id_measures.idfn;
    entry["misses"] = t.misses;
    entry["false_positives"] = t.false_positives;
    entry["mismatches"] = t.mismatches();
    entry["temporal_mismatches"] = t.temporal_mismatches;
    entry["crossview_mismatches"] = t.crossview_mismatches;
    entry["gt_total"] = t.gt;
    // frame, misses, false positives, temporal mismatches, cross-view mismatches, gt
    ojson frames = ojson::array();
    for (const auto& c : d.counts) {
      frames.push_back({c.frame, c.misses, c.false_positives, c.temporal_mismatches,
                        c.crossview_mismatches, c.gt});
    }
    entry["frames"] = std::move(frames);
    doc["descriptions"].push_back(std::move(entry));
  }
  ojson agg;
  agg["defined"] = report.aggregate.has_value();
  agg["n_l"] = report.descriptions.size();
  if (report.aggregate) {
    agg["cvridf1"] = report.aggregate->cvridf1;
    agg["cvrma"] = report.aggregate->cvrma;
  }
  doc["aggregate"] = std::move(agg);
  return doc.dump(2) + "\n";
}

Report report_from_json(std::string_view text) {
  try {
    const nlohmann::json doc = nlohmann::json::parse(text);
    Report r;
    detail::apply_config(r.config, doc.at("config"));
    for (const auto& entry : doc.at("descriptions")) {
      DescriptionResult d;
      d.description_id = entry.at("id").get<std::string>();
      d.cvidf1 = entry.at("cvidf1").get<double>();
      d.cvma_raw = entry.at("cvma_raw").get<double>();
      d.id_measures.idtp = entry.at("idtp").get<std::int64_t>();
      d.id_measures.idfp = entry.at("idfp").get<std::int64_t>();
      d.id_measures.idfn = entry.at("idfn").get<std::int64_t>();
      for (const auto& f : entry.at("frames")) {
        d.counts.push_back(FrameCounts{f.at(0).get<int>(), f.at(1).get<std::int64_t>(),
                                       f.at(2).get<std::int64_t>(), f.at(3).get<std::int64_t>(),
                                       f.at(4).get<std::int64_t>(), f.at(5).get<std::int64_t>()});
      }
      r.descriptions.push_back(std::move(d));
    }
    const auto& agg = doc.at("aggregate");
    if (agg.at("defined").get<bool>()) {
      r.aggregate = AggregateScores{agg.at("n_l").get<std::size_t>(),
                                    agg.at("cvridf1").get<double>(),
                                    agg.at("cvrma").get<double>()};
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed report: ") + e.what());
  }
}

void write_report(const Report& report, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out << report_to_json(report);
}

Report read_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open report");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return report_from_json(buffer.str());
}

namespace {

std::string percent(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * value);
  return buf;
}

}  // namespace

std::string format_table(const Report& report) {
  std::size_t width = 11;
  for (const auto& d : report.descriptions) width = std::max(width, d.description_id.size());

  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-*s %8s %8s %7s %7s %7s %7s %7s %7s %7s\n",
                static_cast<int>(width), "description", "CVIDF1", "CVMA", "IDTP", "IDFP",
                "IDFN", "miss", "fp", "mme", "gt");
  os << line;
  for (const auto& d : report.descriptions) {
    const EventTotals t = d.totals();
    std::snprintf(line, sizeof(line), "%-*s %8s %8s %7lld %7lld %7lld %7lld %7lld %7lld %7lld\n",
                  static_cast<int>(width), d.description_id.c_str(), percent(d.cvidf1).c_str(),
                  percent(d.cvma_raw).c_str(), static_cast<long long>(d.id_measures.idtp),
                  static_cast<long long>(d.id_measures.idfp),
                  static_cast<long long>(d.id_measures.idfn), static_cast<long long>(t.misses),
                  static_cast<long long>(t.false_positives),
                  static_cast<long long>(t.mismatches()), static_cast<long long>(t.gt));
    os << line;
  }
  if (report.aggregate) {
    os << "CVRIDF1 " << percent(report.aggregate->cvridf1) << "  CVRMA "
       << percent(report.aggregate->cvrma) << "  (" << report.aggregate->num_descriptions
       << " descriptions)\n";
  } else {
    os << "CVRIDF1 undefined  CVRMA undefined  (0 descriptions)\n";
  }
  return os.str();
}

}  // namespace crmot
