#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "vasum/checkpoint.hpp"
#include "vasum/dataset.hpp"
#include "vasum/error.hpp"
#include "vasum/evaluation.hpp"
#include "vasum/ground_truth.hpp"
#include "vasum/model.hpp"
#include "vasum/rng.hpp"
#include "vasum/segmentation.hpp"
#include "vasum/summarizer.hpp"
#include "vasum/synthetic.hpp"
#include "vasum/training.hpp"

namespace py = pybind11;
using namespace vasum;

namespace {

using Mask = std::vector<std::uint8_t>;

py::array_t<std::uint8_t> user_matrix(const VideoRecord& r) {
  py::array_t<std::uint8_t> out({r.n_users, r.n_frames});
  std::copy(r.user_summaries.begin(), r.user_summaries.end(), out.mutable_data());
  return out;
}

std::vector<std::pair<std::int64_t, std::int64_t>> shot_pairs(const std::vector<Shot>& shots) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (const auto& s : shots) out.emplace_back(s.first, s.last);
  return out;
}

py::dict summary_dict(const Summary& s) {
  py::dict d;
  d["mask"] = py::array_t<std::uint8_t>(static_cast<py::ssize_t>(s.mask.size()), s.mask.data());
  d["selected_shots"] = s.selected_shots;
  d["budget"] = s.budget;
  d["selected_frames"] = s.selected_frames();
  return d;
}

py::dict fscore_dict(const FScore& f) {
  py::dict d;
  d["precision"] = f.precision;
  d["recall"] = f.recall;
  d["f"] = f.f;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Keyshot video summarization core";

  auto error = py::register_exception<Error>(m, "VasumError", PyExc_RuntimeError);
  py::register_exception<DatasetError>(m, "DatasetError", error.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<NumericError>(m, "NumericError", error.ptr());
  py::register_exception<SplitError>(m, "SplitError", error.ptr());

  py::class_<VideoRecord>(m, "VideoRecord")
      .def_readonly("id", &VideoRecord::id)
      .def_readonly("n_frames", &VideoRecord::n_frames)
      .def_readonly("fps", &VideoRecord::fps)
      .def_readonly("picks", &VideoRecord::picks)
      .def_readonly("n_users", &VideoRecord::n_users)
      .def_property_readonly("features", &VideoRecord::features_as_double)
      .def_property_readonly("gt_score", &VideoRecord::gt_score_as_double)
      .def_property_readonly("user_summaries", &user_matrix)
      .def_property_readonly("change_points",
                             [](const VideoRecord& r) { return shot_pairs(r.change_points); })
      .def("__repr__", [](const VideoRecord& r) {
        return "<VideoRecord " + r.id + " frames=" + std::to_string(r.n_frames) +
               " picks=" + std::to_string(r.num_picks()) + ">";
      });

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("name", &Dataset::name)
      .def_property_readonly("protocol", [](const Dataset& d) { return std::string(to_string(d.protocol)); })
      .def_readonly("videos", &Dataset::videos)
      .def("__len__", [](const Dataset& d) { return d.videos.size(); })
      .def("__getitem__", [](const Dataset& d, const std::string& id) {
        const VideoRecord* r = d.find(id);
        if (!r) throw py::key_error(id);
        return *r;
      });

  m.def("load_dataset", &load_dataset, py::arg("path"));
  m.def("write_dataset", &write_dataset, py::arg("dataset"), py::arg("path"));
  m.def("validate_dataset", [](const std::filesystem::path& dir) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& v : validate_dataset_dir(dir)) out.emplace_back(v.video_id, v.message);
    return out;
  }, py::arg("path"));
  m.def("make_synthetic_dataset", [](std::int64_t videos, std::int64_t dim, std::int64_t users,
                                     std::uint64_t seed, const std::string& name) {
    SyntheticOptions o;
    o.videos = videos;
    o.feature_dim = dim;
    o.users = users;
    o.seed = seed;
    o.name = name;
    return make_synthetic_dataset(o);
  }, py::arg("videos") = 10, py::arg("dim") = 32, py::arg("users") = 5, py::arg("seed") = 0,
        py::arg("name") = "synthetic");

  m.def("kts", [](const Matrix& x, std::int64_t max_change_points, double penalty) {
    return kts(x, {max_change_points, penalty}).segmentation.boundaries;
  }, py::arg("features"), py::arg("max_change_points"), py::arg("penalty") = 1.0,
        "Change-point indices (first pick of each new segment).");

  m.def("knapsack_select", [](const std::vector<double>& values, const std::vector<std::int64_t>& lengths,
                              std::int64_t capacity) { return knapsack_select(values, lengths, capacity); },
        py::arg("values"), py::arg("lengths"), py::arg("capacity"));
  m.def("summarize", [](const VideoRecord& r, const std::vector<double>& scores, double ratio) {
    return summary_dict(summarize(r, scores, ratio));
  }, py::arg("record"), py::arg("pick_scores"), py::arg("budget_ratio") = 0.15);
  m.def("keyshot_ground_truth", [](const VideoRecord& r, double ratio) {
    return summary_dict(frame_scores_to_keyshot_gt(r, r.gt_score_as_double(), ratio));
  }, py::arg("record"), py::arg("budget_ratio") = 0.15);

  m.def("fscore", [](const Mask& a, const Mask& b) { return fscore_dict(fscore(a, b)); },
        py::arg("machine"), py::arg("user"));
  m.def("evaluate_video", [](const Mask& machine, const std::vector<Mask>& users, const std::string& protocol) {
    return fscore_dict(evaluate_video(machine, users, parse_protocol(protocol)));
  }, py::arg("machine"), py::arg("users"), py::arg("protocol") = "mean");
  m.def("human_baseline", [](const Dataset& d, const std::string& mode, bool keyshot_users) {
    HumanBaselineOptions o;
    o.users_to_keyshots = keyshot_users;
    return human_baseline(d, mode == "gt" ? HumanMode::kGtVsUsers : HumanMode::kAmongUsers, o);
  }, py::arg("dataset"), py::arg("mode") = "among", py::arg("keyshot_users") = false);

  py::class_<ModelParameters>(m, "Model")
      .def_static("initialize", [](std::int64_t d, std::int64_t h, const std::string& attention,
                                   double scale, std::uint64_t seed) {
        ModelConfig c;
        c.input_dim = d;
        c.hidden_dim = h;
        c.attention = parse_attention(attention);
        c.scale = scale;
        Rng rng(seed, "init");
        return ModelParameters::initialize(c, rng);
      }, py::arg("input_dim"), py::arg("hidden_dim"), py::arg("attention") = "mul",
                  py::arg("scale") = 0.06, py::arg("seed") = 0)
      .def_static("load", &load_checkpoint, py::arg("path"))
      .def("save", [](const ModelParameters& p, const std::filesystem::path& path) { save_checkpoint(p, path); },
           py::arg("path"))
      .def_property_readonly("input_dim", [](const ModelParameters& p) { return p.config.input_dim; })
      .def_property_readonly("hidden_dim", [](const ModelParameters& p) { return p.config.hidden_dim; })
      .def_property_readonly("num_parameters", &ModelParameters::num_parameters)
      .def("predict", [](const ModelParameters& p, const Matrix& x) { return predict(x, p); }, py::arg("features"))
      .def("attention", [](const ModelParameters& p, const Matrix& x) {
        return forward(x, p, Mode::kInfer).attention;
      }, py::arg("features"));

  m.def("cross_validate", [](const Dataset& d, int folds, std::int64_t epochs, double lr, double l2,
                             double dropout, std::uint64_t seed, int jobs) {
    const std::vector<Dataset> data{d};
    const SplitConfig splits = make_splits(d, folds, 0.8, seed, Setting::kCanonical);
    TrainOptions o;
    o.hyper.epochs = epochs;
    o.hyper.learning_rate = lr;
    o.hyper.l2 = l2;
    o.hyper.p_drop = dropout;
    o.hyper.seed = seed;
    o.model.input_dim = o.model.hidden_dim = d.videos.front().feature_dim();
    CrossValidation cv;
    {
      py::gil_scoped_release release;
      cv = cross_validate(splits, data, o, jobs);
    }
    py::dict out;
    out["mean_f"] = cv.result.mean_f;
    std::vector<double> fold_f;
    for (const auto& f : cv.result.folds) fold_f.push_back(f.mean_f);
    out["fold_f"] = fold_f;
    std::vector<ModelParameters> models;
    for (const auto& r : cv.reports) models.push_back(r.best);
    out["models"] = models;
    return out;
  }, py::arg("dataset"), py::arg("folds") = 5, py::arg("epochs") = 200, py::arg("lr") = 5e-5,
        py::arg("l2") = 1e-5, py::arg("dropout") = 0.5, py::arg("seed") = 0, py::arg("jobs") = 1);
}
