#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vasum/checkpoint.hpp"
#include "vasum/dataset.hpp"
#include "vasum/error.hpp"
#include "vasum/evaluation.hpp"
#include "vasum/ground_truth.hpp"
#include "vasum/model.hpp"
#include "vasum/report.hpp"
#include "vasum/segmentation.hpp"
#include "vasum/summarizer.hpp"
#include "vasum/synthetic.hpp"
#include "vasum/training.hpp"

namespace fs = std::filesystem;
using namespace vasum;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct Args {
  std::string dataset;
  std::string setting = "canonical";
  std::vector<std::string> augment;
  std::uint64_t seed = 0;
  std::int64_t epochs = 200;
  double lr = 5e-5;
  double l2 = 1e-5;
  double dropout = 0.5;
  double scale = 0.06;
  std::string attention = "mul";
  std::optional<std::int64_t> hidden;
  double budget_ratio = 0.15;
  double kts_penalty = 1.0;
  std::optional<std::int64_t> kts_max_cps;
  int jobs = 1;
  int folds = 5;
  std::string out;
  std::string video;
  std::string checkpoint;
  std::string run;
  std::string mode = "among";
  bool keyshot_users = false;
  std::string scores_csv;
  SyntheticOptions synth;
};

std::string g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

void write_json(const fs::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

ordered_json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return ordered_json::parse(in);
}

std::vector<Dataset> load_all(const std::string& target, const std::vector<std::string>& augment) {
  std::vector<Dataset> out;
  out.push_back(load_dataset(target));
  for (const auto& a : augment) out.push_back(load_dataset(a));
  return out;
}

const VideoRecord& find_video(const Dataset& d, const std::string& id) {
  const VideoRecord* r = d.find(id);
  if (!r) throw DatasetError(id, "no such video in dataset " + d.name);
  return *r;
}

std::vector<double> as_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

TrainOptions train_options(const Args& a) {
  TrainOptions o;
  o.hyper.learning_rate = a.lr;
  o.hyper.l2 = a.l2;
  o.hyper.epochs = a.epochs;
  o.hyper.p_drop = a.dropout;
  o.hyper.seed = a.seed;
  o.hyper.validate();
  o.model.scale = a.scale;
  o.model.attention = parse_attention(a.attention);
  o.budget_ratio = a.budget_ratio;
  return o;
}

int cmd_validate(const Args& a) {
  const auto violations = validate_dataset_dir(a.dataset);
  if (violations.empty()) {
    std::cout << "ok: " << load_dataset(a.dataset).videos.size() << " videos\n";
    return kOk;
  }
  for (const auto& v : violations)
    std::cout << (v.video_id.empty() ? std::string("manifest") : v.video_id) << ": " << v.message
              << "\n";
  return kFailure;
}

int cmd_kts(const Args& a) {
  Dataset d = load_dataset(a.dataset);
  for (auto& r : d.videos) {
    if (!a.video.empty() && r.id != a.video) continue;
    KtsOptions k = default_kts_options(r);
    k.penalty_weight = a.kts_penalty;
    if (a.kts_max_cps)
      k.max_change_points = std::min<std::int64_t>(*a.kts_max_cps, r.num_picks() - 1);
    r.change_points.clear();
    ensure_change_points(r, &k);
    std::cout << r.id << ": " << r.change_points.size() << " shots\n";
  }
  write_dataset(d, a.out);
  return kOk;
}

int cmd_train(const Args& a) {
  const auto datasets = load_all(a.dataset, a.augment);
  const Setting setting = parse_setting(a.setting);
  if (setting == Setting::kAugmented && a.augment.empty())
    throw ConfigError("augmented setting needs at least one --augment dataset");
  const SplitConfig splits = make_splits(datasets[0], a.folds, 0.8, a.seed, setting,
                                         std::span(datasets).subspan(1));
  TrainOptions options = train_options(a);
  options.model.input_dim = datasets[0].videos.front().feature_dim();
  options.model.hidden_dim = a.hidden.value_or(options.model.input_dim);

  ordered_json config;
  config["dataset"] = fs::absolute(a.dataset).string();
  ordered_json aug = ordered_json::array();
  for (const auto& p : a.augment) aug.push_back(fs::absolute(p).string());
  config["augment"] = aug;
  config["hyperparameters"] = to_json(options.hyper);
  config["model"] = to_json(options.model);
  config["budget_ratio"] = options.budget_ratio;
  std::cout << config.dump(2) << "\n";

  const fs::path out(a.out);
  write_json(out / "splits.json", to_json(splits));
  write_json(out / "config.json", config);
  const CrossValidation cv = cross_validate(splits, datasets, options, a.jobs);
  for (std::size_t f = 0; f < cv.reports.size(); ++f) {
    const fs::path dir = out / ("fold_" + std::to_string(f));
    fs::create_directories(dir);
    save_checkpoint(cv.reports[f].best, dir / "model.ckpt");
    write_json(dir / "report.json", train_report_json(cv.reports[f], options, f));
    std::cout << "fold " << f << ": best epoch " << cv.reports[f].best_epoch << ", F "
              << g9(cv.result.folds[f].mean_f) << "\n";
  }
  std::cout << "mean F " << g9(cv.result.mean_f) << "\n";
  return kOk;
}

int cmd_eval(const Args& a) {
  const fs::path run(a.run);
  const ordered_json config = read_json(run / "config.json");
  const SplitConfig splits = split_config_from_json(read_json(run / "splits.json"));
  const std::string target = a.dataset.empty() ? config.at("dataset").get<std::string>() : a.dataset;
  const auto augment = a.augment.empty() ? config.at("augment").get<std::vector<std::string>>() : a.augment;
  const auto datasets = load_all(target, augment);
  const double ratio = config.value("budget_ratio", a.budget_ratio);

  EvalResult result;
  result.dataset = splits.target;
  result.setting = splits.setting;
  result.protocol = datasets[0].protocol;
  for (std::size_t f = 0; f < splits.folds.size(); ++f) {
    const fs::path ckpt = run / ("fold_" + std::to_string(f)) / "model.ckpt";
    result.folds.push_back(evaluate_fold(load_checkpoint(ckpt), splits.folds[f], datasets, ratio));
    result.mean_f += result.folds.back().mean_f;
  }
  if (!result.folds.empty()) result.mean_f /= static_cast<double>(result.folds.size());

  const fs::path out = a.out.empty() ? run : fs::path(a.out);
  write_json(out / "results.json", results_json(result, "vasum"));
  write_text(out / "per_video.csv", per_video_csv(result));
  std::cout << "mean F " << g9(result.mean_f) << "\n";
  return kOk;
}

int cmd_summarize(const Args& a) {
  const Dataset d = load_dataset(a.dataset);
  const VideoRecord& r = find_video(d, a.video);
  const ModelParameters p = load_checkpoint(a.checkpoint);
  const auto scores = as_vector(predict(r.features_as_double(), p));
  const Summary s = summarize(r, scores, a.budget_ratio);

  ordered_json j;
  j["video"] = r.id;
  j["n_frames"] = r.n_frames;
  j["budget"] = s.budget;
  j["selected_frames"] = s.selected_frames();
  ordered_json shots = ordered_json::array();
  for (auto k : s.selected_shots)
    shots.push_back({r.change_points[k].first, r.change_points[k].last});
  j["selected_shots"] = s.selected_shots;
  j["keyshots"] = shots;
  j["scores"] = scores;
  if (a.out.empty())
    std::cout << j.dump(2) << "\n";
  else
    write_json(a.out, j);

  if (!a.scores_csv.empty()) {
    std::string csv = "pick,frame,score\n";
    for (std::size_t i = 0; i < scores.size(); ++i)
      csv += std::to_string(i) + "," + std::to_string(r.picks[i]) + "," + g9(scores[i]) + "\n";
    write_text(a.scores_csv, csv);
  }
  return kOk;
}

int cmd_plot_data(const Args& a) {
  const Dataset d = load_dataset(a.dataset);
  const VideoRecord& r = find_video(d, a.video);
  const ModelParameters p = load_checkpoint(a.checkpoint);
  const ForwardTrace tr = forward(r.features_as_double(), p, Mode::kInfer);
  const auto scores = as_vector(tr.scores);
  const fs::path out(a.out);

  std::string csv = "pick,frame,gt_score,predicted\n";
  for (std::size_t i = 0; i < scores.size(); ++i)
    csv += std::to_string(i) + "," + std::to_string(r.picks[i]) + "," + g9(r.gt_score[i]) + "," +
           g9(scores[i]) + "\n";
  write_text(out / "scores.csv", csv);

  csv.clear();
  for (Eigen::Index i = 0; i < tr.attention.rows(); ++i) {
    for (Eigen::Index j = 0; j < tr.attention.cols(); ++j)
      csv += (j ? "," : "") + g9(tr.attention(i, j));
    csv += "\n";
  }
  write_text(out / "attention.csv", csv);

  const Summary machine = summarize(r, scores, a.budget_ratio);
  const Summary gt = frame_scores_to_keyshot_gt(r, r.gt_score_as_double(), a.budget_ratio);
  csv = "frame,machine,gt_keyshot,user_fraction\n";
  for (std::int64_t f = 0; f < r.n_frames; ++f) {
    int votes = 0;
    for (std::int64_t u = 0; u < r.n_users; ++u) votes += r.user_summary(u)[f] != 0;
    csv += std::to_string(f) + "," + std::to_string(int(machine.mask[f])) + "," +
           std::to_string(int(gt.mask[f])) + "," +
           g9(r.n_users ? double(votes) / double(r.n_users) : 0.0) + "\n";
  }
  write_text(out / "keyshots.csv", csv);
  return kOk;
}

int cmd_human_baseline(const Args& a) {
  const Dataset d = load_dataset(a.dataset);
  HumanBaselineOptions o;
  o.budget_ratio = a.budget_ratio;
  o.users_to_keyshots = a.keyshot_users;
  const HumanMode mode = a.mode == "gt" ? HumanMode::kGtVsUsers : HumanMode::kAmongUsers;
  ordered_json j;
  j["dataset"] = d.name;
  j["mode"] = a.mode;
  j["f_score"] = human_baseline(d, mode, o);
  std::cout << j.dump(2) << "\n";
  if (!a.out.empty()) write_json(a.out, j);
  return kOk;
}

int cmd_synth(const Args& a) {
  SyntheticOptions o = a.synth;
  o.seed = a.seed;
  write_dataset(make_synthetic_dataset(o), a.out);
  std::cout << "wrote " << o.videos << " videos to " << a.out << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keyshot video summarization with self-attention"};
  app.require_subcommand(1);
  Args a;

  auto add_dataset = [&](CLI::App* c) {
    c->add_option("--dataset", a.dataset, "Dataset directory (manifest.json + sidecars)")
        ->required()
        ->check(CLI::ExistingDirectory);
  };
  auto add_model = [&](CLI::App* c) {
    c->add_option("--checkpoint", a.checkpoint, "Model checkpoint")->required()->check(CLI::ExistingFile);
    c->add_option("--video", a.video, "Video id")->required();
    c->add_option("--budget-ratio", a.budget_ratio, "Summary length as a fraction of the video")
        ->check(CLI::Range(0.0, 1.0));
  };

  auto* validate = app.add_subcommand("validate", "Check every video record in a dataset");
  add_dataset(validate);

  auto* kts_cmd = app.add_subcommand("kts", "Segment videos into shots and write the dataset");
  add_dataset(kts_cmd);
  kts_cmd->add_option("--video", a.video, "Only segment this video");
  kts_cmd->add_option("--kts-penalty", a.kts_penalty, "Penalty weight")->check(CLI::NonNegativeNumber);
  kts_cmd->add_option("--kts-max-cps", a.kts_max_cps, "Maximum change points per video")
      ->check(CLI::NonNegativeNumber);
  kts_cmd->add_option("--out", a.out, "Output dataset directory")->required();

  auto* train_cmd = app.add_subcommand("train", "Cross-validated training");
  add_dataset(train_cmd);
  train_cmd->add_option("--setting", a.setting, "canonical or augmented")
      ->check(CLI::IsMember({"canonical", "augmented"}));
  train_cmd->add_option("--augment", a.augment, "Extra training datasets")->check(CLI::ExistingDirectory);
  train_cmd->add_option("--seed", a.seed, "Master seed");
  train_cmd->add_option("--epochs", a.epochs, "Training epochs")->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", a.lr, "Learning rate")->check(CLI::PositiveNumber);
  train_cmd->add_option("--l2", a.l2, "L2 regularization")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--dropout", a.dropout, "Dropout probability")->check(CLI::Range(0.0, 0.99));
  train_cmd->add_option("--scale", a.scale, "Attention energy scale")->check(CLI::PositiveNumber);
  train_cmd->add_option("--attention", a.attention, "mul or add")->check(CLI::IsMember({"mul", "add"}));
  train_cmd->add_option("--hidden", a.hidden, "Hidden width (default: feature width)")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--budget-ratio", a.budget_ratio, "Summary length fraction")
      ->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--folds", a.folds, "Number of folds")->check(CLI::PositiveNumber);
  train_cmd->add_option("--jobs", a.jobs, "Folds trained in parallel")->check(CLI::PositiveNumber);
  train_cmd->add_option("--out", a.out, "Run directory")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Score a trained run on its test splits");
  eval_cmd->add_option("--run", a.run, "Run directory written by train")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--dataset", a.dataset, "Override the dataset path")->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--augment", a.augment, "Override the augment paths")->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--out", a.out, "Output directory (default: run directory)");

  auto* summarize_cmd = app.add_subcommand("summarize", "Keyshot summary for one video");
  add_dataset(summarize_cmd);
  add_model(summarize_cmd);
  summarize_cmd->add_option("--out", a.out, "Summary JSON (default: stdout)");
  summarize_cmd->add_option("--scores-csv", a.scores_csv, "Also write per-pick scores");

  auto* plot_cmd = app.add_subcommand("plot-data", "Export score, attention and keyshot columns");
  add_dataset(plot_cmd);
  add_model(plot_cmd);
  plot_cmd->add_option("--out", a.out, "Output directory")->required();

  auto* human_cmd = app.add_subcommand("human-baseline", "Agreement among users or GT vs users");
  add_dataset(human_cmd);
  human_cmd->add_option("--mode", a.mode, "among or gt")->check(CLI::IsMember({"among", "gt"}));
  human_cmd->add_flag("--keyshot-users", a.keyshot_users, "Convert user summaries to keyshots first");
  human_cmd->add_option("--budget-ratio", a.budget_ratio, "Keyshot budget")->check(CLI::Range(0.0, 1.0));
  human_cmd->add_option("--out", a.out, "Also write the JSON here");

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset");
  synth_cmd->add_option("--out", a.out, "Output dataset directory")->required();
  synth_cmd->add_option("--name", a.synth.name, "Dataset name");
  synth_cmd->add_option("--videos", a.synth.videos, "Number of videos")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--dim", a.synth.feature_dim, "Feature width")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--users", a.synth.users, "Users per video")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", a.seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const std::map<CLI::App*, int (*)(const Args&)> handlers{
      {validate, cmd_validate},       {kts_cmd, cmd_kts},         {train_cmd, cmd_train},
      {eval_cmd, cmd_eval},           {summarize_cmd, cmd_summarize}, {plot_cmd, cmd_plot_data},
      {human_cmd, cmd_human_baseline}, {synth_cmd, cmd_synth}};
  try {
    for (const auto& [sub, run] : handlers)
      if (sub->parsed()) return run(a);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
