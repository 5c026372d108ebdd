#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "crmot/assignment.hpp"
#include "crmot/config.hpp"
#include "crmot/datamodel.hpp"
#include "crmot/fusion.hpp"
#include "crmot/ingest.hpp"
#include "crmot/predictor.hpp"
#include "crmot/report.hpp"
#include "crmot/workflow.hpp"

namespace py = pybind11;
using namespace crmot;

namespace {

using Box = std::tuple<double, double, double, double>;

RunConfig config_from(const std::optional<std::string>& json) {
  RunConfig c = json ? apply_config_json({}, *json) : RunConfig{};
  c.validate();
  return c;
}

CostMatrix to_matrix(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  CostMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw std::invalid_argument("cost rows differ in length");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

py::tuple to_tuple(const Assignment& a) { return py::make_tuple(a.pairs, a.total_cost); }

LossInputs loss_inputs(double l_d, double l_s, double l_c, double w1, double w2) {
  LossInputs in;
  in.l_d = l_d;
  in.l_s = l_s;
  in.l_c = l_c;
  in.w1 = w1;
  in.w2 = w2;
  return in;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the crmot package";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<MissingInput>(m, "MissingInput", PyExc_FileNotFoundError);

  m.def("iou", [](const Box& a, const Box& b) {
    return iou(std::make_from_tuple<BBox>(a), std::make_from_tuple<BBox>(b));
  }, py::arg("a"), py::arg("b"));

  m.def("solve_lap", [](const std::vector<std::vector<double>>& cost) {
    return to_tuple(solve_lap(to_matrix(cost)));
  }, py::arg("cost"));
  m.def("brute_force_lap", [](const std::vector<std::vector<double>>& cost) {
    return to_tuple(brute_force_lap(to_matrix(cost)));
  }, py::arg("cost"));

  m.def("fuse_scores", &fuse_scores, py::arg("s_t"), py::arg("s_a"), py::arg("beta") = 0.1);
  m.def("fuse_features", [](const std::vector<double>& f, const std::vector<double>& a, double alpha) {
    return fuse_features(f, a, alpha);
  }, py::arg("full_feature"), py::arg("attribute_feature"), py::arg("alpha") = 0.01);

  m.def("loss_cmot", [](double l_d, double l_s, double l_c, double w1, double w2) {
    return loss_cmot(loss_inputs(l_d, l_s, l_c, w1, w2));
  }, py::arg("l_d"), py::arg("l_s"), py::arg("l_c"), py::arg("w1"), py::arg("w2"));
  m.def("grad_loss_cmot", [](double l_d, double l_s, double l_c, double w1, double w2) {
    const CmotGradient g = grad_loss_cmot(loss_inputs(l_d, l_s, l_c, w1, w2));
    return py::make_tuple(g.d_w1, g.d_w2);
  }, py::arg("l_d"), py::arg("l_s"), py::arg("l_c"), py::arg("w1"), py::arg("w2"));
  m.def("loss_referring", &loss_referring, py::arg("probs"), py::arg("labels"));

  m.def("predictor_step", [](const std::vector<double>& view_scores, double hit_score,
                             const std::optional<std::string>& config) {
    const StepResult r = step({0, hit_score, {}}, view_scores, config_from(config).predictor);
    return py::make_tuple(r.state.hit_score, r.emit);
  }, py::arg("view_scores"), py::arg("hit_score") = 0.0, py::arg("config") = py::none());

  m.def("default_config", [] { return config_to_json(RunConfig{}); });

  m.def("evaluate", [](const fs::path& scene_dir, const fs::path& predictions_root,
                       const std::optional<fs::path>& descriptions,
                       const std::optional<std::string>& config, unsigned jobs) {
    std::vector<std::string> warnings;
    Report report;
    {
      py::gil_scoped_release release;
      report = evaluate_directory(config_from(config), scene_dir, predictions_root, descriptions,
                                  jobs, &warnings);
    }
    return py::make_tuple(report_to_json(report), warnings);
  }, py::arg("scene_dir"), py::arg("predictions_root"), py::arg("descriptions") = py::none(),
     py::arg("config") = py::none(), py::arg("jobs") = 0);

  m.def("filter", [](const fs::path& tracks_dir, const fs::path& scores_root,
                     const fs::path& out_root, const std::optional<std::string>& config) {
    py::list out;
    for (const auto& s : filter_directory(config_from(config), tracks_dir, scores_root, out_root)) {
      out.append(py::dict(py::arg("description_id") = s.description_id,
                          py::arg("tracks") = s.tracks, py::arg("detections") = s.detections));
    }
    return out;
  }, py::arg("tracks_dir"), py::arg("scores_root"), py::arg("out_root"),
     py::arg("config") = py::none());

  m.def("synth", [](const fs::path& out, int views, int ids, int frames, int descriptions,
                    int width, int height, double hi, double lo, double jitter,
                    const std::optional<fs::path>& errors, std::uint64_t seed) {
    SynthOptions o;
    o.views = views;
    o.ids = ids;
    o.frames = frames;
    o.descriptions = descriptions;
    o.image = {width, height};
    o.hi = hi;
    o.lo = lo;
    o.jitter = jitter;
    if (errors) o.errors = parse_error_spec(*errors);
    o.seed = seed;
    const SynthSummary s = synth_directory(o, out);
    return py::dict(py::arg("gt_detections") = s.gt_detections,
                    py::arg("descriptions") = s.descriptions);
  }, py::arg("out"), py::arg("views") = 3, py::arg("ids") = 4, py::arg("frames") = 20,
     py::arg("descriptions") = 4, py::arg("width") = 1920, py::arg("height") = 1080,
     py::arg("hi") = 0.95, py::arg("lo") = 0.05, py::arg("jitter") = 0.0,
     py::arg("errors") = py::none(), py::arg("seed") = 0);
}
