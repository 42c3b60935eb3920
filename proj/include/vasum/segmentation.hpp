#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vasum/types.hpp"

namespace vasum {

// Change points over pick positions. A boundary b means a new segment
// starts at position b.
struct Segmentation {
  std::int64_t length = 0;  // P
  std::vector<std::int64_t> boundaries;

  // Inclusive (start, end) pick ranges.
  std::vector<std::pair<std::int64_t, std::int64_t>> segments() const;

  // Projects pick segments onto original frames using the same ownership
  // rule as score upsampling: segment [a, b] covers frames
  // [picks[a], picks[b+1] - 1], with the ends stretched to 0 and n_frames-1.
  std::vector<Shot> to_shots(std::span<const std::int64_t> picks,
                             std::int64_t n_frames) const;
};

// Cosine kernel: inner products of L2-normalised rows. Zero rows stay zero.
Matrix gram_matrix(const Matrix& features);

// Within-segment kernel scatter,
//   cost(i, j) = sum_{t=i..j} K[t,t] - 1/(j-i+1) * sum_{t,u=i..j} K[t,u],
// filled on and above the diagonal from 2-D prefix sums.
Matrix segment_cost_table(const Matrix& gram);

struct KtsOptions {
  std::int64_t max_change_points = 0;
  double penalty_weight = 1.0;
};

struct KtsResult {
  Segmentation segmentation;
  // scatter[m] = minimal total scatter with exactly m change points.
  std::vector<double> scatter;
  std::vector<double> objective;  // scatter[m] + penalty(m)
};

// Penalised change-point selection by dynamic programming. Ties prefer fewer
// change points, then the lexicographically earliest boundary list.
KtsResult kts(const Matrix& features, const KtsOptions& options);

// Same, starting from a precomputed cost table.
KtsResult kts_from_costs(const Matrix& costs, const KtsOptions& options);

double kts_penalty(std::int64_t m, std::int64_t length, double weight);

// floor(duration / 2 s), clamped to [0, P-1].
std::int64_t default_max_change_points(double duration_seconds, std::int64_t num_picks);

}  // namespace vasum
