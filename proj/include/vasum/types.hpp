#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace vasum {

// Row-major so that .data() matches the on-disk tensor order.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Inclusive range of original frame indices.
struct Shot {
  std::int64_t first = 0;
  std::int64_t last = 0;
  std::int64_t length() const { return last - first + 1; }
  friend bool operator==(const Shot&, const Shot&) = default;
};

// How one machine summary is scored against several user summaries.
enum class Protocol { kMean, kMax };

enum class Setting { kCanonical, kAugmented };

std::string_view to_string(Protocol p);
std::string_view to_string(Setting s);
Protocol parse_protocol(std::string_view s);
Setting parse_setting(std::string_view s);

}  // namespace vasum
