#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vasum/dataset.hpp"
#include "vasum/model.hpp"
#include "vasum/summarizer.hpp"
#include "vasum/training.hpp"

namespace vasum {

struct FScore {
  double precision = 0.0;  // fractions in [0, 1]
  double recall = 0.0;
  double f = 0.0;  // percent; 0 when precision + recall == 0
};

// Per-frame overlap between two binary masks of equal length.
FScore fscore(std::span<const std::uint8_t> machine, std::span<const std::uint8_t> user);

// Mean protocol averages F over users; max protocol keeps the best user.
// Precision/recall follow the same aggregation.
FScore evaluate_video(std::span<const std::uint8_t> machine,
                      std::span<const std::vector<std::uint8_t>> users, Protocol protocol);
FScore evaluate_video(const Summary& machine, const VideoRecord& record, Protocol protocol);

struct VideoEval {
  VideoKey key;
  FScore score;
};

struct FoldEval {
  std::vector<VideoEval> videos;
  double mean_f = 0.0;
};

struct EvalResult {
  std::vector<FoldEval> folds;
  double mean_f = 0.0;  // unweighted mean of fold means
  Protocol protocol = Protocol::kMean;
  Setting setting = Setting::kCanonical;
  std::string dataset;
};

// Scores `params` on the fold's test videos.
FoldEval evaluate_fold(const ModelParameters& params, const Fold& fold,
                       std::span<const Dataset> datasets, double budget_ratio = 0.15);

struct CrossValidation {
  EvalResult result;
  std::vector<TrainReport> reports;
};

// Trains every fold (in parallel up to `jobs`) and evaluates each best
// snapshot on its test split.
CrossValidation cross_validate(const SplitConfig& splits, std::span<const Dataset> datasets,
                               const TrainOptions& options, int jobs = 1);

enum class HumanMode { kAmongUsers, kGtVsUsers };

struct HumanBaselineOptions {
  double budget_ratio = 0.15;
  // Turn each user summary into budgeted keyshots over the change points
  // before pairing (the frame-score style datasets need this).
  bool users_to_keyshots = false;
};

// Mean pairwise F over all unordered user pairs, or mean F between the
// keyshot ground truth and every user, averaged over videos.
double human_baseline(const Dataset& dataset, HumanMode mode,
                      const HumanBaselineOptions& options = {});

}  // namespace vasum
