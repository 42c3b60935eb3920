#include "vasum/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "vasum/error.hpp"
#include "vasum/rng.hpp"
#include "vasum/summarizer.hpp"

namespace vasum {

Dataset make_synthetic_dataset(const SyntheticOptions& o) {
  if (o.videos < 1 || o.feature_dim < 1 || o.min_picks < 2 || o.max_picks < o.min_picks ||
      o.frames_per_pick < 1 || o.users < 1)
    throw ParameterError("invalid synthetic dataset options");

  Rng rng(o.seed, "synthetic");
  const auto d = o.feature_dim;
  Vector direction(d);
  for (Eigen::Index k = 0; k < d; ++k) direction(k) = rng.normal();
  direction.normalize();

  Dataset ds;
  ds.name = o.name;
  ds.protocol = default_protocol_for(o.name);
  for (std::int64_t v = 0; v < o.videos; ++v) {
    VideoRecord r;
    r.id = "video_" + std::to_string(v + 1);
    const auto p = o.min_picks + static_cast<std::int64_t>(rng.below(o.max_picks - o.min_picks + 1));
    r.fps = o.fps;
    r.n_frames = p * o.frames_per_pick;
    for (std::int64_t i = 0; i < p; ++i) r.picks.push_back(i * o.frames_per_pick);
    r.features.resize(p, d);
    r.gt_score.resize(p);

    // Shots of 3..10 picks.
    std::vector<std::pair<std::int64_t, std::int64_t>> segments;
    for (std::int64_t start = 0; start < p;) {
      std::int64_t len = 3 + static_cast<std::int64_t>(rng.below(8));
      if (p - (start + len) < 3) len = p - start;
      segments.emplace_back(start, start + len - 1);
      start += len;
    }
    std::vector<double> importance(p);
    for (auto [a, b] : segments) {
      Vector content(d);
      for (Eigen::Index k = 0; k < d; ++k) content(k) = rng.normal();
      content.normalize();
      const double level = 1.0 / (1.0 + std::exp(-4.0 * content.dot(direction) * std::sqrt(double(d)) / 2.0));
      const double phase = rng.uniform(0.0, 6.283185307179586);
      for (std::int64_t i = a; i <= b; ++i) {
        Vector f = content;
        for (Eigen::Index k = 0; k < d; ++k) f(k) += o.feature_noise * rng.normal() / std::sqrt(double(d));
        r.features.row(i) = f.cast<float>().transpose();
        const double wiggle = 0.05 * std::sin(phase + 0.7 * static_cast<double>(i - a));
        importance[i] = std::clamp(level + wiggle, 0.0, 1.0);
        r.gt_score[i] = static_cast<float>(importance[i]);
      }
      r.change_points.push_back({a * o.frames_per_pick,
                                 b + 1 < p ? (b + 1) * o.frames_per_pick - 1 : r.n_frames - 1});
    }

    r.n_users = o.users;
    const auto budget = budget_frames(r.n_frames, 0.15);
    for (std::int64_t u = 0; u < o.users; ++u) {
      std::vector<double> frame_scores(static_cast<std::size_t>(r.n_frames));
      for (std::int64_t i = 0; i < p; ++i) {
        const double noisy = importance[i] + o.user_noise * rng.normal();
        for (std::int64_t j = 0; j < o.frames_per_pick; ++j)
          frame_scores[i * o.frames_per_pick + j] = noisy;
      }
      const auto mask = summarize_frames(frame_scores, r.change_points, budget).mask;
      r.user_summaries.insert(r.user_summaries.end(), mask.begin(), mask.end());
    }
    ds.videos.push_back(std::move(r));
  }
  return ds;
}

}  // namespace vasum
