// Copyright 2026 The robon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "robon/baselines.hpp"
#include "support/scripted_source.hpp"
#include "support/test_util.hpp"

namespace robon {
namespace {

using testing::cand;
using testing::code_of;
using testing::identity_reward;
using testing::make_prompt;

using Cands = std::vector<ScoredCandidate>;

Portfolio scripted(std::size_t M, std::uint64_t seed) {
  Portfolio out;
  for (std::size_t i = 0; i < M; ++i) {
    out.push_back(std::make_shared<testing::ScriptedSource>(
        "m" + std::to_string(i),
        [seed, i](const std::string&, std::size_t k) { return testing::random_draw(seed, i, k); }));
  }
  return out;
}

TEST(Bon, Examples) {
  EXPECT_EQ(bon(Cands{cand(0.3, "a"), cand(0.3, "b"), cand(0.9, "c")}), 2u);
  EXPECT_EQ(bon(Cands{cand(0.5, "a"), cand(0.5, "b"), cand(0.5, "c")}), 0u);
  EXPECT_EQ(bon(Cands{cand(0.1, "a")}), 0u);
  EXPECT_EQ(code_of([] { bon(Cands{}); }), ErrorCode::kEmptySet);
}

TEST(SoftBon, LargeBetaPicksArgmax) {
  const Cands c = {cand(0.2, "a"), cand(0.8, "b"), cand(0.5, "c")};
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) ASSERT_EQ(soft_bon(c, 1e5, rng), 1u);
}

TEST(SoftBon, EqualRewardsSplitEvenly) {
  const Cands c = {cand(0.5, "a"), cand(0.5, "b")};
  Rng rng(2);
  int first = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) first += soft_bon(c, 1.0, rng) == 0;
  EXPECT_NEAR(first / static_cast<double>(n), 0.5, 0.01);
}

TEST(SoftBon, SingletonSeededAndErrors) {
  EXPECT_EQ(soft_bon(Cands{cand(0.1, "a")}, 1.0, std::uint64_t{3}), 0u);
  const Cands c = {cand(0.4, "a"), cand(0.5, "b"), cand(0.6, "c")};
  EXPECT_EQ(soft_bon(c, 2.0, std::uint64_t{9}), soft_bon(c, 2.0, std::uint64_t{9}));
  EXPECT_EQ(code_of([] { soft_bon(Cands{}, 1.0, std::uint64_t{1}); }), ErrorCode::kEmptySet);
}

TEST(SoftBon, AgreesWithBonAtLargeBetaOnUniqueMax) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    Cands c;
    for (int i = 0; i < 1 + trial % 9; ++i) c.push_back(cand(u(gen), "a"));
    ASSERT_EQ(soft_bon(c, 1e5, static_cast<std::uint64_t>(trial)), bon(c));
  }
}

TEST(MajorityVote, Examples) {
  const Cands strict = {cand(0.1, "a"), cand(0.2, "a"), cand(0.9, "b")};
  EXPECT_EQ(strict[majority_vote(strict)].answer.value, "a");
  EXPECT_EQ(majority_vote(strict), 1u);  // highest-reward member of the group
  const Cands tie = {cand(0.1, "b"), cand(0.9, "a")};
  EXPECT_EQ(majority_vote(tie), 1u);
  EXPECT_EQ(majority_vote(Cands{cand(0.3, std::nullopt)}), 0u);
  // Absent answers never pool together.
  const Cands absent = {cand(0.9, std::nullopt), cand(0.8, std::nullopt), cand(0.1, "z")};
  EXPECT_EQ(majority_vote(absent), 0u);
  EXPECT_EQ(code_of([] { majority_vote(Cands{}); }), ErrorCode::kEmptySet);
}

TEST(MajorityVote, WinningGroupIsLargest) {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Cands c;
    for (std::size_t k = 1; k <= 1 + seed % 11; ++k) {
      const auto d = testing::random_draw(seed, 0, k);
      c.push_back(cand(d.reward, d.answer));
    }
    const auto& w = c[majority_vote(c)];
    std::map<std::string, std::size_t> counts;
    for (const auto& x : c) counts[x.answer.present ? x.answer.value : ""] += x.answer.present;
    const std::size_t mine = w.answer.present ? counts[w.answer.value] : 1;
    for (const auto& [a, k] : counts) ASSERT_GE(mine, k) << seed;
  }
}

TEST(EqualSplit, Allocation) {
  EXPECT_EQ(equal_split_allocation(4, 4, 1, "q"), (std::vector<std::size_t>{1, 1, 1, 1}));
  EXPECT_EQ(equal_split_allocation(4, 16, 1, "q"), (std::vector<std::size_t>{4, 4, 4, 4}));
  std::set<std::vector<std::size_t>> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto a = equal_split_allocation(4, 6, seed, "q");
    ASSERT_EQ(std::accumulate(a.begin(), a.end(), std::size_t{0}), 6u);
    ASSERT_EQ(std::count(a.begin(), a.end(), 2u), 2);
    ASSERT_EQ(std::count(a.begin(), a.end(), 1u), 2);
    ASSERT_EQ(a, equal_split_allocation(4, 6, seed, "q"));
    seen.insert(a);
  }
  EXPECT_EQ(seen.size(), 6u);  // every choice of two models occurs
  std::vector<int> picked(3, 0);
  for (std::uint64_t seed = 0; seed < 3000; ++seed) {
    const auto a = equal_split_allocation(3, 1, seed, "q");
    ASSERT_EQ(std::accumulate(a.begin(), a.end(), std::size_t{0}), 1u);
    ++picked[std::max_element(a.begin(), a.end()) - a.begin()];
  }
  for (int p : picked) EXPECT_NEAR(p / 3000.0, 1.0 / 3.0, 0.04);
}

TEST(EqualSplit, PoolsAndSelectsBest) {
  const auto sources = scripted(4, 8);
  const auto r = equal_split(sources, make_prompt("q"), 8, identity_reward(), 8);
  ASSERT_EQ(r.pool.size(), 8u);
  EXPECT_EQ(r.generations, (std::vector<std::size_t>{2, 2, 2, 2}));
  EXPECT_EQ(r.selected, bon(r.pool));
  EXPECT_EQ(r.pool[0].model_index, 0u);
  EXPECT_EQ(r.pool[1].draw_index, 2u);
}

TEST(EqualSplit, SingleModelIsBestOfN) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 1 + seed % 10;
    const auto sources = scripted(1, seed);
    const auto r = equal_split(sources, make_prompt("q"), n, identity_reward(), seed);
    Cands draws;
    for (std::size_t k = 1; k <= n; ++k) {
      draws.push_back(draw_scored(*sources[0], 0, make_prompt("q"), k, identity_reward()));
    }
    ASSERT_EQ(r.pool[r.selected].draw_index, draws[bon(draws)].draw_index);
  }
}

TEST(AverageMetric, Examples) {
  EXPECT_NEAR(average_metric(std::vector<double>{0.546, 0.548, 0.548, 0.549}), 0.54775, 1e-12);
  EXPECT_EQ(average_metric(std::vector<double>{0.3}), 0.3);
  EXPECT_EQ(average_metric(std::vector<double>{0.0, 1.0}), 0.5);
  EXPECT_EQ(code_of([] { average_metric(std::vector<double>{}); }), ErrorCode::kEmptySet);
}

}  // namespace
}  // namespace robon
