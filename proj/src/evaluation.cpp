#include "vasum/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "vasum/error.hpp"
#include "vasum/ground_truth.hpp"

namespace vasum {

FScore fscore(std::span<const std::uint8_t> machine, std::span<const std::uint8_t> user) {
  if (machine.size() != user.size())
    throw ParameterError("fscore: mask lengths differ (" + std::to_string(machine.size()) +
                         " vs " + std::to_string(user.size()) + ")");
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < machine.size(); ++i) {
    const bool m = machine[i] != 0, u = user[i] != 0;
    tp += m && u;
    fp += m && !u;
    fn += !m && u;
  }
  FScore s;
  if (tp + fp > 0) s.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) s.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (s.precision + s.recall > 0.0)
    s.f = 2.0 * s.precision * s.recall / (s.precision + s.recall) * 100.0;
  return s;
}

FScore evaluate_video(std::span<const std::uint8_t> machine,
                      std::span<const std::vector<std::uint8_t>> users, Protocol protocol) {
  if (users.empty()) throw ParameterError("evaluate_video: no user summaries");
  FScore out;
  bool first = true;
  for (const auto& u : users) {
    const FScore s = fscore(machine, u);
    if (protocol == Protocol::kMean) {
      out.precision += s.precision;
      out.recall += s.recall;
      out.f += s.f;
    } else if (first || s.f > out.f) {
      out = s;
    }
    first = false;
  }
  if (protocol == Protocol::kMean) {
    const auto n = static_cast<double>(users.size());
    out.precision /= n;
    out.recall /= n;
    out.f /= n;
  }
  return out;
}

FScore evaluate_video(const Summary& machine, const VideoRecord& record, Protocol protocol) {
  if (record.n_users < 1) throw DatasetError(record.id, "no user summaries to evaluate against");
  std::vector<std::vector<std::uint8_t>> users;
  for (std::int64_t u = 0; u < record.n_users; ++u) {
    const auto s = record.user_summary(u);
    users.emplace_back(s.begin(), s.end());
  }
  return evaluate_video(machine.mask, users, protocol);
}

FoldEval evaluate_fold(const ModelParameters& params, const Fold& fold,
                       std::span<const Dataset> datasets, double budget_ratio) {
  FoldEval out;
  for (const auto& key : fold.test) {
    const auto& record = resolve(datasets, key);
    const Vector y = predict(record.features_as_double(), params);
    const Summary summary =
        summarize(record, {y.data(), static_cast<std::size_t>(y.size())}, budget_ratio);
    out.videos.push_back({key, evaluate_video(summary, record, protocol_for(datasets, key))});
    out.mean_f += out.videos.back().score.f;
  }
  if (!out.videos.empty()) out.mean_f /= static_cast<double>(out.videos.size());
  return out;
}

CrossValidation cross_validate(const SplitConfig& splits, std::span<const Dataset> datasets,
                               const TrainOptions& options, int jobs) {
  const std::size_t k = splits.folds.size();
  CrossValidation cv;
  cv.reports.resize(k);
  cv.result.folds.resize(k);
  cv.result.setting = splits.setting;
  cv.result.dataset = splits.target;
  cv.result.protocol =
      splits.folds.empty() || splits.folds.front().test.empty()
          ? default_protocol_for(splits.target)
          : protocol_for(datasets, splits.folds.front().test.front());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t f = next++; f < k; f = next++) {
      try {
        TrainOptions fold_options = options;
        fold_options.fold_index = f;
        cv.reports[f] = train(splits.folds[f], datasets, fold_options);
        cv.result.folds[f] =
            evaluate_fold(cv.reports[f].best, splits.folds[f], datasets, options.budget_ratio);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const auto n_threads = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, std::max<std::size_t>(k, 1));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& fold : cv.result.folds) cv.result.mean_f += fold.mean_f;
  if (k > 0) cv.result.mean_f /= static_cast<double>(k);
  return cv;
}

double human_baseline(const Dataset& dataset, HumanMode mode,
                      const HumanBaselineOptions& options) {
  double total = 0.0;
  std::size_t videos = 0;
  for (const auto& record : dataset.videos) {
    std::vector<std::vector<std::uint8_t>> users;
    for (std::int64_t u = 0; u < record.n_users; ++u) {
      const auto s = record.user_summary(u);
      users.emplace_back(s.begin(), s.end());
    }
    if (mode == HumanMode::kAmongUsers) {
      if (users.size() < 2)
        throw DatasetError(record.id, "pairwise agreement needs at least two users");
      if (options.users_to_keyshots) {
        if (record.change_points.empty())
          throw DatasetError(record.id, "keyshot conversion needs change points");
        const auto budget = budget_frames(record.n_frames, options.budget_ratio);
        for (auto& u : users) {
          const std::vector<double> scores(u.begin(), u.end());
          u = summarize_frames(scores, record.change_points, budget).mask;
        }
      }
      double sum = 0.0;
      std::size_t pairs = 0;
      for (std::size_t a = 0; a < users.size(); ++a)
        for (std::size_t b = a + 1; b < users.size(); ++b, ++pairs) sum += fscore(users[a], users[b]).f;
      total += sum / static_cast<double>(pairs);
    } else {
      if (users.empty()) throw DatasetError(record.id, "no user summaries");
      const auto gt = record.gt_score_as_double();
      const Summary summary = frame_scores_to_keyshot_gt(record, gt, options.budget_ratio);
      total += evaluate_video(summary.mask, users, Protocol::kMean).f;
    }
    ++videos;
  }
  return videos ? total / static_cast<double>(videos) : 0.0;
}

}  // namespace vasum
