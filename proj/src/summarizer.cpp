#include "vasum/summarizer.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "vasum/dataset.hpp"
#include "vasum/error.hpp"

namespace vasum {

std::int64_t Summary::selected_frames() const {
  return std::accumulate(mask.begin(), mask.end(), std::int64_t{0});
}

std::vector<double> shot_scores(std::span<const double> frame_scores,
                                std::span<const Shot> shots) {
  std::vector<double> out;
  out.reserve(shots.size());
  for (const auto& s : shots) {
    if (s.first < 0 || s.last < s.first ||
        s.last >= static_cast<std::int64_t>(frame_scores.size()))
      throw ParameterError("shot [" + std::to_string(s.first) + ", " +
                           std::to_string(s.last) + "] outside the frame range");
    double sum = 0.0;
    for (std::int64_t j = s.first; j <= s.last; ++j) sum += frame_scores[j];
    out.push_back(sum / static_cast<double>(s.length()));
  }
  return out;
}

std::vector<std::int64_t> knapsack_select(std::span<const double> values,
                                          std::span<const std::int64_t> lengths,
                                          std::int64_t budget) {
  const std::size_t k = values.size();
  if (lengths.size() != k) throw ParameterError("knapsack: values/lengths size mismatch");
  for (std::int64_t l : lengths)
    if (l < 1) throw ParameterError("knapsack: shot lengths must be >= 1");
  if (budget < 0) budget = 0;
  const auto cap = static_cast<std::size_t>(budget);

  // best[i][c]: optimal value using shots i..k-1 within capacity c. Built
  // back to front so the front-to-back reconstruction can favour low indices.
  std::vector<double> best((k + 1) * (cap + 1), 0.0);
  auto at = [&](std::size_t i, std::size_t c) -> double& { return best[i * (cap + 1) + c]; };
  for (std::size_t i = k; i-- > 0;) {
    const auto l = static_cast<std::size_t>(lengths[i]);
    for (std::size_t c = 0; c <= cap; ++c) {
      double v = at(i + 1, c);
      if (l <= c) v = std::max(v, values[i] + at(i + 1, c - l));
      at(i, c) = v;
    }
  }

  std::vector<std::int64_t> selected;
  std::size_t c = cap;
  for (std::size_t i = 0; i < k; ++i) {
    // An empty remainder is optimal here and sorts before any extension.
    if (at(i, c) <= 0.0) break;
    const auto l = static_cast<std::size_t>(lengths[i]);
    if (l <= c && values[i] + at(i + 1, c - l) >= at(i + 1, c)) {
      selected.push_back(static_cast<std::int64_t>(i));
      c -= l;
    }
  }
  return selected;
}

std::int64_t budget_frames(std::int64_t n_frames, double budget_ratio) {
  if (!(budget_ratio > 0.0 && budget_ratio < 1.0))
    throw ParameterError("budget ratio must lie in (0, 1), got " + std::to_string(budget_ratio));
  return static_cast<std::int64_t>(std::floor(budget_ratio * static_cast<double>(n_frames)));
}

Summary summarize_frames(std::span<const double> frame_scores,
                         std::span<const Shot> shots, std::int64_t budget) {
  for (double v : frame_scores)
    if (!std::isfinite(v)) throw NumericError("summarize: non-finite frame score");
  const auto scores = shot_scores(frame_scores, shots);
  std::vector<std::int64_t> lengths;
  lengths.reserve(shots.size());
  for (const auto& s : shots) lengths.push_back(s.length());

  Summary out;
  out.budget = budget;
  out.mask.assign(frame_scores.size(), 0);
  out.selected_shots = knapsack_select(scores, lengths, budget);
  for (std::int64_t i : out.selected_shots)
    for (std::int64_t j = shots[i].first; j <= shots[i].last; ++j) out.mask[j] = 1;
  return out;
}

Summary summarize(const VideoRecord& record, std::span<const double> pick_scores,
                  double budget_ratio) {
  if (record.change_points.empty())
    throw DatasetError(record.id, "no change points; segment the video first");
  const auto frames = upsample_to_frames(record, pick_scores);
  return summarize_frames(frames, record.change_points,
                          budget_frames(record.n_frames, budget_ratio));
}

}  // namespace vasum
