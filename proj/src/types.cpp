#include "vasum/types.hpp"

#include "vasum/error.hpp"

namespace vasum {

std::string_view to_string(Protocol p) { return p == Protocol::kMax ? "max" : "mean"; }

std::string_view to_string(Setting s) {
  return s == Setting::kAugmented ? "augmented" : "canonical";
}

Protocol parse_protocol(std::string_view s) {
  if (s == "mean") return Protocol::kMean;
  if (s == "max") return Protocol::kMax;
  throw ConfigError("unknown protocol '" + std::string(s) + "' (expected mean|max)");
}

Setting parse_setting(std::string_view s) {
  if (s == "canonical") return Setting::kCanonical;
  if (s == "augmented") return Setting::kAugmented;
  throw ConfigError("unknown setting '" + std::string(s) +
                    "' (expected canonical|augmented)");
}

}  // namespace vasum
