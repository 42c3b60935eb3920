#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vasum/types.hpp"

namespace vasum {

using FeatureMatrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One video, subsampled at `picks`. Features and gt_score live at pick
// positions; user summaries and change points live on original frames.
struct VideoRecord {
  std::string id;
  std::int64_t n_frames = 0;
  double fps = 30.0;
  std::vector<std::int64_t> picks;
  FeatureMatrix features;               // P x D
  std::vector<float> gt_score;          // P
  std::int64_t n_users = 0;             // U
  std::vector<std::uint8_t> user_summaries;  // U x n_frames, row-major
  std::vector<Shot> change_points;      // may be empty until segmented

  std::int64_t num_picks() const { return static_cast<std::int64_t>(picks.size()); }
  std::int64_t feature_dim() const { return features.cols(); }
  double duration_seconds() const { return fps > 0 ? n_frames / fps : 0.0; }

  std::span<const std::uint8_t> user_summary(std::int64_t u) const {
    return {user_summaries.data() + u * n_frames, static_cast<std::size_t>(n_frames)};
  }
  Matrix features_as_double() const { return features.cast<double>(); }
  std::vector<double> gt_score_as_double() const {
    return {gt_score.begin(), gt_score.end()};
  }
};

struct Dataset {
  std::string name;
  // Scoring protocol for this dataset; defaults to max for SumMe-named
  // datasets and mean otherwise.
  Protocol protocol = Protocol::kMean;
  std::vector<VideoRecord> videos;

  const VideoRecord* find(std::string_view id) const;
};

struct Violation {
  std::string video_id;  // empty for manifest-level problems
  std::string message;
};

// Invariant checks on an in-memory record; empty when valid.
std::vector<std::string> check_record(const VideoRecord& record);

// Loads every video and collects all violations instead of stopping at
// the first one.
std::vector<Violation> validate_dataset_dir(const std::filesystem::path& dir);

// Throws DatasetError naming the first offending video.
Dataset load_dataset(const std::filesystem::path& dir);

// Writes manifest.json plus the three binary sidecars per video.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

Protocol default_protocol_for(std::string_view dataset_name);

// Frame j takes the score of pick i where picks[i] <= j < picks[i+1];
// frames before picks[0] take the first pick's score.
std::vector<double> upsample_to_frames(const VideoRecord& record,
                                       std::span<const double> pick_scores);

// Down-projects a per-frame vector onto pick positions.
std::vector<double> sample_at_picks(const VideoRecord& record,
                                    std::span<const double> frame_values);

// ---------------------------------------------------------------------------
// Cross-validation splits.

struct VideoKey {
  std::string dataset;
  std::string video;
  friend bool operator==(const VideoKey&, const VideoKey&) = default;
};

struct Fold {
  std::vector<VideoKey> train;
  std::vector<VideoKey> test;
};

struct SplitConfig {
  std::uint64_t seed = 0;
  Setting setting = Setting::kCanonical;
  std::string target;
  std::vector<std::string> augment_sources;
  double train_fraction = 0.8;
  std::vector<Fold> folds;
};

// k independent random train/test divisions of `target`; train count is
// floor(train_fraction * |target|). In the augmented setting every video of
// every augment dataset is appended to each training fold.
SplitConfig make_splits(const Dataset& target, int k, double train_fraction,
                        std::uint64_t seed, Setting setting,
                        std::span<const Dataset> augment = {});

const VideoRecord& resolve(std::span<const Dataset> datasets, const VideoKey& key);

}  // namespace vasum
