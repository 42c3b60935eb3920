#include "vasum/ground_truth.hpp"

#include <string>

#include "vasum/error.hpp"

namespace vasum {

KtsOptions default_kts_options(const VideoRecord& record) {
  KtsOptions o;
  o.max_change_points = default_max_change_points(record.duration_seconds(), record.num_picks());
  return o;
}

void ensure_change_points(VideoRecord& record, const KtsOptions* options) {
  if (!record.change_points.empty()) return;
  const KtsOptions opts = options ? *options : default_kts_options(record);
  const auto result = kts(record.features_as_double(), opts);
  record.change_points = result.segmentation.to_shots(record.picks, record.n_frames);
}

Summary frame_scores_to_keyshot_gt(const VideoRecord& record,
                                   std::span<const double> pick_scores,
                                   double budget_ratio) {
  return summarize(record, pick_scores, budget_ratio);
}

KeyframeGroundTruth keyframes_to_gt(
    const VideoRecord& input, std::span<const std::vector<std::int64_t>> user_keyframes,
    std::int64_t budget, const KtsOptions* kts_options) {
  VideoRecord segmented;
  const VideoRecord* record = &input;
  if (input.change_points.empty()) {
    segmented = input;
    ensure_change_points(segmented, kts_options);
    record = &segmented;
  }
  const auto& shots = record->change_points;
  const auto n_frames = static_cast<std::size_t>(record->n_frames);

  std::vector<std::int64_t> lengths;
  for (const auto& s : shots) lengths.push_back(s.length());
  // shot index per frame
  std::vector<std::size_t> owner(n_frames);
  for (std::size_t i = 0; i < shots.size(); ++i)
    for (std::int64_t j = shots[i].first; j <= shots[i].last; ++j) owner[j] = i;

  KeyframeGroundTruth out;
  std::vector<double> mean_frames(n_frames, 0.0);
  for (const auto& keyframes : user_keyframes) {
    std::vector<double> density(shots.size(), 0.0);
    for (std::int64_t f : keyframes) {
      if (f < 0 || f >= record->n_frames)
        throw DatasetError(record->id, "keyframe index " + std::to_string(f) + " out of range");
      density[owner[f]] += 1.0;
    }
    for (std::size_t i = 0; i < shots.size(); ++i) density[i] /= static_cast<double>(lengths[i]);

    std::vector<std::uint8_t> mask(n_frames, 0);
    // Shots without keyframes are not candidates.
    std::vector<double> values;
    std::vector<std::int64_t> cand_lengths, cand_index;
    for (std::size_t i = 0; i < shots.size(); ++i) {
      if (density[i] > 0.0) {
        values.push_back(density[i]);
        cand_lengths.push_back(lengths[i]);
        cand_index.push_back(static_cast<std::int64_t>(i));
      }
    }
    for (std::int64_t c : knapsack_select(values, cand_lengths, budget)) {
      const auto& s = shots[cand_index[c]];
      for (std::int64_t j = s.first; j <= s.last; ++j) mask[j] = 1;
    }
    for (std::size_t j = 0; j < n_frames; ++j) mean_frames[j] += mask[j];
    out.user_masks.push_back(std::move(mask));
  }
  if (!user_keyframes.empty())
    for (double& v : mean_frames) v /= static_cast<double>(user_keyframes.size());

  out.gt_score = sample_at_picks(*record, mean_frames);
  out.summary = summarize_frames(mean_frames, shots, budget);
  return out;
}

KeyframeGroundTruth keyframes_to_gt(
    const VideoRecord& record, std::span<const std::vector<std::int64_t>> user_keyframes,
    double budget_ratio) {
  return keyframes_to_gt(record, user_keyframes, budget_frames(record.n_frames, budget_ratio));
}

}  // namespace vasum
