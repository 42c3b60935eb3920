#include "vasum/segmentation.hpp"

#include <cmath>
#include <limits>

#include "vasum/error.hpp"

namespace vasum {

std::vector<std::pair<std::int64_t, std::int64_t>> Segmentation::segments() const {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  std::int64_t start = 0;
  for (std::int64_t b : boundaries) {
    out.emplace_back(start, b - 1);
    start = b;
  }
  if (length > 0) out.emplace_back(start, length - 1);
  return out;
}

std::vector<Shot> Segmentation::to_shots(std::span<const std::int64_t> picks,
                                         std::int64_t n_frames) const {
  if (static_cast<std::int64_t>(picks.size()) != length)
    throw ParameterError("segmentation length does not match number of picks");
  std::vector<Shot> shots;
  for (auto [a, b] : segments()) {
    const std::int64_t first = a == 0 ? 0 : picks[a];
    const std::int64_t last = b + 1 < length ? picks[b + 1] - 1 : n_frames - 1;
    shots.push_back({first, last});
  }
  return shots;
}

Matrix gram_matrix(const Matrix& features) {
  Matrix normed = features;
  for (Eigen::Index i = 0; i < normed.rows(); ++i) {
    const double n = normed.row(i).norm();
    if (n > 0) normed.row(i) /= n;
  }
  Matrix k = normed * normed.transpose();
  // Exact symmetry regardless of the GEMM kernel's summation order.
  for (Eigen::Index i = 0; i < k.rows(); ++i)
    for (Eigen::Index j = i + 1; j < k.cols(); ++j) k(j, i) = k(i, j);
  return k;
}

Matrix segment_cost_table(const Matrix& gram) {
  const Eigen::Index p = gram.rows();
  if (gram.cols() != p) throw ParameterError("gram matrix must be square");
  // cum(i, j) = sum of gram over [0, i) x [0, j).
  Matrix cum = Matrix::Zero(p + 1, p + 1);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      cum(i + 1, j + 1) = gram(i, j) + cum(i, j + 1) + cum(i + 1, j) - cum(i, j);
  Vector diag_cum = Vector::Zero(p + 1);
  for (Eigen::Index i = 0; i < p; ++i) diag_cum(i + 1) = diag_cum(i) + gram(i, i);

  Matrix costs = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i; j < p; ++j) {
      const double block = cum(j + 1, j + 1) - cum(i, j + 1) - cum(j + 1, i) + cum(i, i);
      const double c = diag_cum(j + 1) - diag_cum(i) - block / static_cast<double>(j - i + 1);
      costs(i, j) = i == j ? 0.0 : std::max(c, 0.0);
    }
  }
  return costs;
}

double kts_penalty(std::int64_t m, std::int64_t length, double weight) {
  if (m == 0) return 0.0;
  return weight * static_cast<double>(m) *
         (std::log(static_cast<double>(length) / static_cast<double>(m)) + 1.0);
}

std::int64_t default_max_change_points(double duration_seconds, std::int64_t num_picks) {
  auto m = static_cast<std::int64_t>(std::floor(duration_seconds / 2.0));
  return std::clamp<std::int64_t>(m, 0, std::max<std::int64_t>(num_picks - 1, 0));
}

KtsResult kts_from_costs(const Matrix& costs, const KtsOptions& options) {
  const std::int64_t p = costs.rows();
  if (p == 0) throw ParameterError("kts: empty input");
  const std::int64_t max_m = options.max_change_points;
  if (max_m < 0 || max_m >= p)
    throw ParameterError("kts: max_change_points must lie in [0, P-1]");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // best[k][i]: minimal scatter splitting [i, P-1] into k+1 segments;
  // next[k][i]: start of the second segment in that optimum (earliest on ties).
  std::vector<std::vector<double>> best(max_m + 1, std::vector<double>(p, kInf));
  std::vector<std::vector<std::int64_t>> next(max_m + 1, std::vector<std::int64_t>(p, -1));
  for (std::int64_t i = 0; i < p; ++i) best[0][i] = costs(i, p - 1);
  for (std::int64_t k = 1; k <= max_m; ++k) {
    for (std::int64_t i = 0; i + k < p; ++i) {
      double v = kInf;
      std::int64_t arg = -1;
      for (std::int64_t b = i + 1; b + k <= p; ++b) {
        const double c = costs(i, b - 1) + best[k - 1][b];
        if (c < v) {
          v = c;
          arg = b;
        }
      }
      best[k][i] = v;
      next[k][i] = arg;
    }
  }

  KtsResult result;
  std::int64_t chosen = 0;
  for (std::int64_t m = 0; m <= max_m; ++m) {
    result.scatter.push_back(best[m][0]);
    result.objective.push_back(best[m][0] + kts_penalty(m, p, options.penalty_weight));
    if (result.objective[m] < result.objective[chosen]) chosen = m;
  }
  result.segmentation.length = p;
  std::int64_t i = 0;
  for (std::int64_t k = chosen; k >= 1; --k) {
    i = next[k][i];
    result.segmentation.boundaries.push_back(i);
  }
  return result;
}

KtsResult kts(const Matrix& features, const KtsOptions& options) {
  if (features.rows() == 0) throw ParameterError("kts: empty input");
  if (!features.allFinite()) throw NumericError("kts: non-finite feature value");
  return kts_from_costs(segment_cost_table(gram_matrix(features)), options);
}

}  // namespace vasum
