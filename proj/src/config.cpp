#include "crmot/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json_io.hpp"

namespace crmot {

void RunConfig::validate() const {
  metric.validate();
  predictor.validate();
  if (!std::isfinite(weights.alpha) || !std::isfinite(weights.beta)) {
    throw std::invalid_argument("fusion weights must be finite");
  }
}

std::string_view to_string(Accumulation a) {
  return a == Accumulation::kPerFrame ? "per_frame" : "per_track";
}

std::string_view to_string(Emission e) {
  return e == Emission::kPerFrame ? "per_frame" : "whole_track";
}

Accumulation parse_accumulation(std::string_view text) {
  if (text == "per_frame") return Accumulation::kPerFrame;
  if (text == "per_track") return Accumulation::kPerTrack;
  throw std::invalid_argument("accumulation must be per_frame or per_track, got '" +
                              std::string(text) + "'");
}

Emission parse_emission(std::string_view text) {
  if (text == "per_frame") return Emission::kPerFrame;
  if (text == "whole_track") return Emission::kWholeTrack;
  throw std::invalid_argument("emission must be per_frame or whole_track, got '" +
                              std::string(text) + "'");
}

namespace detail {

nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["iou_threshold"] = c.metric.iou_threshold;
  j["alpha"] = c.weights.alpha;
  j["beta"] = c.weights.beta;
  j["t_as"] = c.predictor.t_as;
  j["t_ss"] = c.predictor.t_ss;
  j["t_hs"] = c.predictor.t_hs;
  j["s1"] = c.predictor.s1;
  j["s2"] = c.predictor.s2;
  j["s3"] = c.predictor.s3;
  j["accumulation"] = std::string(to_string(c.predictor.accumulation));
  j["emission"] = std::string(to_string(c.predictor.emission));
  return j;
}

void apply_config(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    auto number = [&]() {
      if (!value.is_number()) throw std::invalid_argument("config '" + key + "' must be a number");
      return value.get<double>();
    };
    if (key == "iou_threshold") c.metric.iou_threshold = number();
    else if (key == "alpha") c.weights.alpha = number();
    else if (key == "beta") c.weights.beta = number();
    else if (key == "t_as") c.predictor.t_as = number();
    else if (key == "t_ss") c.predictor.t_ss = number();
    else if (key == "t_hs") c.predictor.t_hs = number();
    else if (key == "s1") c.predictor.s1 = number();
    else if (key == "s2") c.predictor.s2 = number();
    else if (key == "s3") c.predictor.s3 = number();
    else if (key == "accumulation") c.predictor.accumulation = parse_accumulation(value.get<std::string>());
    else if (key == "emission") c.predictor.emission = parse_emission(value.get<std::string>());
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

}  // namespace detail

std::string config_to_json(const RunConfig& config) { return detail::config_json(config).dump(2); }

RunConfig apply_config_json(RunConfig base, std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  try {
    detail::apply_config(base, j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  base.validate();
  return base;
}

RunConfig apply_config_file(RunConfig base, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return apply_config_json(std::move(base), buffer.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

}  // namespace crmot
