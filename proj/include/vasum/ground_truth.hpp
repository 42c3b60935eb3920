#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vasum/dataset.hpp"
#include "vasum/segmentation.hpp"
#include "vasum/summarizer.hpp"

namespace vasum {

// Frame-level importance scores at pick positions -> budgeted keyshots
// (shot averaging + knapsack with L = floor(ratio * n_frames)).
Summary frame_scores_to_keyshot_gt(const VideoRecord& record,
                                   std::span<const double> pick_scores,
                                   double budget_ratio = 0.15);

struct KeyframeGroundTruth {
  std::vector<double> gt_score;  // per pick, averaged over users
  Summary summary;               // keyshots of the averaged score
  std::vector<std::vector<std::uint8_t>> user_masks;  // per-user keyshots
};

// Keyframe annotations (per user, original-frame indices) -> training
// targets. Each user's keyframes are converted separately: shot value is
// (#keyframes in shot) / shot length, then knapsack under the budget.
// Without change points the record is segmented with KTS first.
KeyframeGroundTruth keyframes_to_gt(
    const VideoRecord& record,
    std::span<const std::vector<std::int64_t>> user_keyframes,
    std::int64_t budget, const KtsOptions* kts_options = nullptr);

KeyframeGroundTruth keyframes_to_gt(
    const VideoRecord& record,
    std::span<const std::vector<std::int64_t>> user_keyframes,
    double budget_ratio = 0.15);

// Fills record.change_points with KTS shots if it has none; dataset change
// points are kept verbatim.
void ensure_change_points(VideoRecord& record, const KtsOptions* options = nullptr);

// Default KTS options for a record (penalty 1, max = floor(duration / 2 s)).
KtsOptions default_kts_options(const VideoRecord& record);

}  // namespace vasum
