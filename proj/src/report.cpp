#include "vasum/report.hpp"

#include <cstdio>
#include <sstream>

namespace vasum {
namespace {

ordered_json keys_json(const std::vector<VideoKey>& keys) {
  ordered_json out = ordered_json::array();
  for (const auto& k : keys) out.push_back({k.dataset, k.video});
  return out;
}

std::vector<VideoKey> keys_from_json(const ordered_json& j) {
  std::vector<VideoKey> out;
  for (const auto& k : j) out.push_back({k.at(0).get<std::string>(), k.at(1).get<std::string>()});
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

ordered_json to_json(const SplitConfig& s) {
  ordered_json j;
  j["seed"] = s.seed;
  j["setting"] = std::string(to_string(s.setting));
  j["target"] = s.target;
  j["augment_sources"] = s.augment_sources;
  j["train_fraction"] = s.train_fraction;
  ordered_json folds = ordered_json::array();
  for (const auto& f : s.folds) folds.push_back({{"train", keys_json(f.train)}, {"test", keys_json(f.test)}});
  j["folds"] = std::move(folds);
  return j;
}

SplitConfig split_config_from_json(const ordered_json& j) {
  SplitConfig s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.setting = parse_setting(j.at("setting").get<std::string>());
  s.target = j.at("target").get<std::string>();
  s.augment_sources = j.at("augment_sources").get<std::vector<std::string>>();
  s.train_fraction = j.value("train_fraction", 0.8);
  for (const auto& f : j.at("folds"))
    s.folds.push_back({keys_from_json(f.at("train")), keys_from_json(f.at("test"))});
  return s;
}

ordered_json to_json(const Hyperparameters& h) {
  return {{"learning_rate", h.learning_rate}, {"l2", h.l2},
          {"epochs", h.epochs},               {"dropout", h.p_drop},
          {"adam_beta1", h.adam_beta1},       {"adam_beta2", h.adam_beta2},
          {"adam_eps", h.adam_eps},           {"seed", h.seed}};
}

ordered_json to_json(const ModelConfig& c) {
  return {{"input_dim", c.input_dim}, {"hidden_dim", c.hidden_dim},
          {"scale", c.scale},         {"attention", to_string(c.attention)},
          {"ln_eps", c.ln_eps}};
}

ordered_json train_report_json(const TrainReport& r, const TrainOptions& o, std::size_t fold) {
  ordered_json j;
  j["fold"] = fold;
  j["hyperparameters"] = to_json(o.hyper);
  j["model"] = to_json(o.model);
  j["budget_ratio"] = o.budget_ratio;
  j["seed"] = o.hyper.seed;
  j["epoch_loss"] = r.epoch_loss;
  j["epoch_fscore"] = r.epoch_fscore;
  j["best_epoch"] = r.best_epoch;
  j["best_fscore"] = r.best_epoch >= 0 ? r.epoch_fscore[r.best_epoch] : 0.0;
  j["validation_note"] = "model selection uses the fold's test split as validation";
  return j;
}

ordered_json results_json(const EvalResult& r, const std::string& method) {
  ordered_json j;
  j["method"] = method;
  j["dataset"] = r.dataset;
  j["setting"] = std::string(to_string(r.setting));
  j["protocol"] = std::string(to_string(r.protocol));
  j["f_score"] = r.mean_f;
  ordered_json folds = ordered_json::array();
  for (const auto& f : r.folds) {
    ordered_json videos = ordered_json::array();
    for (const auto& v : f.videos)
      videos.push_back({{"dataset", v.key.dataset}, {"video", v.key.video},
                        {"precision", v.score.precision}, {"recall", v.score.recall},
                        {"f", v.score.f}});
    folds.push_back({{"mean_f", f.mean_f}, {"videos", std::move(videos)}});
  }
  j["folds"] = std::move(folds);
  return j;
}

std::string per_video_csv(const EvalResult& r) {
  std::ostringstream os;
  os << "fold,dataset,video,precision,recall,f\n";
  for (std::size_t k = 0; k < r.folds.size(); ++k)
    for (const auto& v : r.folds[k].videos)
      os << k << ',' << v.key.dataset << ',' << v.key.video << ',' << fmt(v.score.precision)
         << ',' << fmt(v.score.recall) << ',' << fmt(v.score.f) << '\n';
  return os.str();
}

}  // namespace vasum
