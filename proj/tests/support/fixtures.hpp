#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "vasum/dataset.hpp"
#include "vasum/rng.hpp"

namespace vasum::testing {

// Record with one pick per `stride` frames, the given shots, and random
// features; gt_score and a single all-zero user are filled in.
inline VideoRecord make_record(std::string id, std::int64_t n_frames, std::int64_t stride,
                               std::vector<Shot> shots, std::int64_t dim = 4,
                               std::uint64_t seed = 1) {
  VideoRecord r;
  r.id = std::move(id);
  r.n_frames = n_frames;
  r.fps = 30.0;
  for (std::int64_t j = 0; j < n_frames; j += stride) r.picks.push_back(j);
  Rng rng(seed);
  r.features.resize(r.num_picks(), dim);
  for (Eigen::Index i = 0; i < r.features.size(); ++i)
    r.features.data()[i] = static_cast<float>(rng.normal());
  r.gt_score.assign(r.picks.size(), 0.5f);
  r.n_users = 1;
  r.user_summaries.assign(static_cast<std::size_t>(n_frames), 0);
  r.change_points = std::move(shots);
  return r;
}

inline std::vector<Shot> equal_shots(std::int64_t count, std::int64_t length) {
  std::vector<Shot> s;
  for (std::int64_t i = 0; i < count; ++i) s.push_back({i * length, (i + 1) * length - 1});
  return s;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("vasum_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<unsigned char> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace vasum::testing
