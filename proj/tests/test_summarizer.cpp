#include <doctest.h>

#include <numeric>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "vasum/error.hpp"
#include "vasum/rng.hpp"
#include "vasum/summarizer.hpp"

using namespace vasum;
using vasum::testing::equal_shots;
using vasum::testing::make_record;

TEST_CASE("shot scores") {
  const std::vector<Shot> shots{{0, 1}, {2, 3}};
  CHECK(shot_scores(std::vector<double>{1, 1, 0, 0}, shots) == std::vector<double>{1.0, 0.0});
  CHECK(shot_scores(std::vector<double>(4, 0.3), shots) == std::vector<double>{0.3, 0.3});

  Rng rng(1);
  std::vector<double> frames(50);
  for (double& v : frames) v = rng.uniform();
  const std::vector<Shot> uneven{{0, 6}, {7, 7}, {8, 29}, {30, 49}};
  const auto s = shot_scores(frames, uneven);
  for (std::size_t i = 0; i < uneven.size(); ++i) {
    double sum = 0.0;
    for (auto j = uneven[i].first; j <= uneven[i].last; ++j) sum += frames[j];
    CHECK(s[i] == doctest::Approx(sum / double(uneven[i].length())).epsilon(1e-14));
  }
  CHECK_THROWS_AS(shot_scores(std::vector<double>(3, 0.0), shots), ParameterError);
}

TEST_CASE("knapsack selection") {
  SUBCASE("slack budget takes every positive shot") {
    CHECK(knapsack_select(std::vector<double>{0.2, 0.5, 0.1}, std::vector<std::int64_t>{3, 4, 5},
                          12) == std::vector<std::int64_t>{0, 1, 2});
  }
  SUBCASE("[0.9, 0.1, 0.8] at L = 20") {
    const std::vector<double> s{0.9, 0.1, 0.8};
    const std::vector<std::int64_t> l{10, 10, 10};
    CHECK(knapsack_select(s, l, 20) == oracle::knapsack(s, l, 20));
    CHECK(knapsack_select(s, l, 20) == std::vector<std::int64_t>{0, 2});
  }
  SUBCASE("ties resolve to the lowest indices") {
    const std::vector<double> s(10, 0.5);
    const std::vector<std::int64_t> l(10, 4);
    CHECK(knapsack_select(s, l, 13) == std::vector<std::int64_t>{0, 1, 2});
    // {0, 2} and {1} are worth the same; {0, 2} sorts first.
    CHECK(knapsack_select(std::vector<double>{0.25, 0.5, 0.25}, std::vector<std::int64_t>{1, 2, 1},
                          2) == std::vector<std::int64_t>{0, 2});
  }
  SUBCASE("nothing fits") {
    CHECK(knapsack_select(std::vector<double>{1.0}, std::vector<std::int64_t>{5}, 4).empty());
    CHECK(knapsack_select(std::vector<double>{}, std::vector<std::int64_t>{}, 4).empty());
  }
  SUBCASE("all-zero scores select nothing") {
    CHECK(knapsack_select(std::vector<double>(4, 0.0), std::vector<std::int64_t>(4, 1), 4).empty());
  }
  SUBCASE("12 random shots agree with exhaustive search") {
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> s(12);
      std::vector<std::int64_t> l(12);
      for (int i = 0; i < 12; ++i) {
        s[i] = rng.uniform();
        l[i] = 1 + static_cast<std::int64_t>(rng.below(20));
      }
      const auto budget = static_cast<std::int64_t>(rng.below(120));
      CHECK(knapsack_select(s, l, budget) == oracle::knapsack(s, l, budget));
    }
  }
  SUBCASE("raising a selected shot keeps it selected") {
    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> s(8);
      std::vector<std::int64_t> l(8);
      for (int i = 0; i < 8; ++i) {
        s[i] = rng.uniform();
        l[i] = 1 + static_cast<std::int64_t>(rng.below(10));
      }
      const auto budget = 5 + static_cast<std::int64_t>(rng.below(30));
      const auto before = knapsack_select(s, l, budget);
      if (before.empty()) continue;
      const auto pick = before[rng.below(before.size())];
      s[pick] += rng.uniform();
      const auto after = knapsack_select(s, l, budget);
      CHECK(std::find(after.begin(), after.end(), pick) != after.end());
    }
  }
  SUBCASE("bad lengths") {
    CHECK_THROWS_AS(knapsack_select(std::vector<double>{1.0}, std::vector<std::int64_t>{0}, 4),
                    ParameterError);
  }
}

TEST_CASE("summarize") {
  SUBCASE("equal scores take the first floor(0.15 K) shots") {
    VideoRecord r = make_record("v", 100, 5, equal_shots(10, 10));
    const std::vector<double> scores(r.picks.size(), 0.4);
    const Summary s = summarize(r, scores);
    CHECK(s.budget == 15);
    CHECK(s.selected_shots == std::vector<std::int64_t>{0});
  }
  SUBCASE("a dominant shot that fits is always chosen") {
    VideoRecord r = make_record("v", 100, 5, equal_shots(10, 10));
    std::vector<double> scores(r.picks.size(), 0.1);
    scores[14] = scores[15] = 0.95;  // picks 70..79 -> shot 7
    CHECK(summarize(r, scores).selected_shots == std::vector<std::int64_t>{7});
  }
  SUBCASE("TvSum-shaped record respects the budget and is shot-constant") {
    Rng rng(6);
    std::vector<Shot> shots;
    std::int64_t start = 0;
    while (start < 7050) {
      const std::int64_t len = 30 + static_cast<std::int64_t>(rng.below(150));
      shots.push_back({start, std::min<std::int64_t>(start + len - 1, 7049)});
      start += len;
    }
    VideoRecord r = make_record("v", 7050, 15, shots, 2);
    std::vector<double> scores(r.picks.size());
    for (double& v : scores) v = rng.uniform();
    const Summary s = summarize(r, scores);
    CHECK(static_cast<double>(s.selected_frames()) / 7050.0 <= 0.15);
    for (const auto& shot : shots)
      for (auto j = shot.first; j <= shot.last; ++j) CHECK(s.mask[j] == s.mask[shot.first]);
  }
  SUBCASE("needs change points") {
    VideoRecord r = make_record("v", 20, 5, {});
    CHECK_THROWS(summarize(r, std::vector<double>(4, 0.5)));
  }
}
