#include <cmath>
#include <string>

#include "vasum/dataset.hpp"
#include "vasum/error.hpp"
#include "vasum/rng.hpp"

namespace vasum {

SplitConfig make_splits(const Dataset& target, int k, double train_fraction,
                        std::uint64_t seed, Setting setting,
                        std::span<const Dataset> augment) {
  if (k < 1) throw ParameterError("number of folds must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ParameterError("train fraction must lie in (0, 1)");
  const auto n = target.videos.size();
  // Need at least 1/(1 - f) videos so every test split is non-empty.
  if (static_cast<double>(n) * (1.0 - train_fraction) < 1.0 - 1e-9)
    throw SplitError("dataset '" + target.name + "' has " + std::to_string(n) +
                     " videos; at least " +
                     std::to_string(static_cast<int>(std::ceil(1.0 / (1.0 - train_fraction) - 1e-9))) +
                     " are needed for train fraction " + std::to_string(train_fraction));
  if (setting == Setting::kCanonical && !augment.empty())
    throw ParameterError("canonical setting takes no augment sources");

  const auto n_train =
      static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 1e-9));

  SplitConfig cfg;
  cfg.seed = seed;
  cfg.setting = setting;
  cfg.target = target.name;
  cfg.train_fraction = train_fraction;
  for (const auto& a : augment) cfg.augment_sources.push_back(a.name);

  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed, "splits", static_cast<std::uint64_t>(f));
    rng.shuffle(order);

    Fold fold;
    for (std::size_t i = 0; i < n; ++i) {
      VideoKey key{target.name, target.videos[order[i]].id};
      (i < n_train ? fold.train : fold.test).push_back(std::move(key));
    }
    for (const auto& a : augment)
      for (const auto& v : a.videos) fold.train.push_back({a.name, v.id});
    cfg.folds.push_back(std::move(fold));
  }
  return cfg;
}

const VideoRecord& resolve(std::span<const Dataset> datasets, const VideoKey& key) {
  for (const auto& ds : datasets) {
    if (ds.name != key.dataset) continue;
    if (const auto* r = ds.find(key.video)) return *r;
  }
  throw DatasetError(key.video, "not found in dataset '" + key.dataset + "'");
}

}  // namespace vasum
