#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vasum/types.hpp"

namespace vasum {

struct VideoRecord;

struct Summary {
  std::vector<std::uint8_t> mask;  // one entry per original frame
  std::vector<std::int64_t> selected_shots;
  std::int64_t budget = 0;  // L, in frames

  std::int64_t selected_frames() const;
};

// Mean frame score per shot.
std::vector<double> shot_scores(std::span<const double> frame_scores,
                                std::span<const Shot> shots);

// Exact 0/1 knapsack over integer lengths. Among value-optimal selections the
// lexicographically smallest sorted index list wins (so {0, 2} beats {1} and
// {} beats {0} when shot 0 adds nothing). Returns sorted shot indices.
std::vector<std::int64_t> knapsack_select(std::span<const double> values,
                                          std::span<const std::int64_t> lengths,
                                          std::int64_t budget);

// floor(ratio * n_frames); ratio must lie in (0, 1).
std::int64_t budget_frames(std::int64_t n_frames, double budget_ratio);

// Per-shot averaging and knapsack over already-upsampled frame scores.
Summary summarize_frames(std::span<const double> frame_scores,
                         std::span<const Shot> shots, std::int64_t budget);

// Pick-level scores -> keyshot mask over record.change_points.
Summary summarize(const VideoRecord& record, std::span<const double> pick_scores,
                  double budget_ratio = 0.15);

}  // namespace vasum
