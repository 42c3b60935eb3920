#pragma once

#include <cstdint>
#include <string>

#include "vasum/dataset.hpp"

namespace vasum {

struct SyntheticOptions {
  std::string name = "synthetic";
  std::int64_t videos = 10;
  std::int64_t feature_dim = 32;
  std::int64_t min_picks = 40;
  std::int64_t max_picks = 80;
  std::int64_t frames_per_pick = 15;  // 2 picks per second at 30 fps
  double fps = 30.0;
  std::int64_t users = 5;
  double feature_noise = 0.15;
  double user_noise = 0.15;
  std::uint64_t seed = 0;
};

// Shot-structured videos: each shot shares a random content vector, shot
// importance is a fixed smooth function of that content (so it can be
// learned across videos), and each user summary is a 15 % keyshot selection
// of a noisy copy of the importance.
Dataset make_synthetic_dataset(const SyntheticOptions& options);

}  // namespace vasum
