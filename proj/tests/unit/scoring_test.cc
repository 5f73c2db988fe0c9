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

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "oracle/brute_force_robon.hpp"
#include "robon/scoring.hpp"
#include "support/scripted_source.hpp"
#include "support/test_util.hpp"

namespace robon {
namespace {

using testing::cand;
using testing::code_of;
using Big = boost::multiprecision::cpp_dec_float_50;

std::vector<Big> big_softmax(const std::vector<double>& r, double beta) {
  std::vector<Big> w;
  Big z = 0;
  for (double x : r) {
    w.push_back(boost::multiprecision::exp(Big(beta) * Big(x)));
    z += w.back();
  }
  for (auto& x : w) x /= z;
  return w;
}

oracle::Pair to_pair(const ScoredCandidate& c) {
  oracle::Pair p;
  p.reward = c.reward;
  if (c.answer.present) p.answer = c.answer.value;
  return p;
}

std::vector<oracle::Pair> to_pairs(const CandidateSet& set) {
  std::vector<oracle::Pair> out;
  for (const auto& c : set.items()) out.push_back(to_pair(c));
  return out;
}

TEST(ScoringParams, Validation) {
  EXPECT_EQ(ScoringParams().alpha(), 0.4);
  EXPECT_EQ(ScoringParams().beta(), 1e5);
  EXPECT_EQ(code_of([] { ScoringParams(1.1, 1.0); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { ScoringParams(-0.1, 1.0); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { ScoringParams(0.5, 0.0); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { ScoringParams(0.5, INFINITY); }), ErrorCode::kConfigError);
}

TEST(Softmax, Symmetric) {
  const std::vector<double> r = {0.5, 0.5};
  EXPECT_EQ(softmax_weights(r, 1e5), (std::vector<double>{0.5, 0.5}));
}

TEST(Softmax, MatchesHighPrecision) {
  const std::vector<double> r = {0.2, 0.8};
  const auto w = softmax_weights(r, 1.0);
  const auto big = big_softmax(r, 1.0);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(w[i], big[i].convert_to<double>(), 1e-15);
  EXPECT_NEAR(w[0], 0.3543, 1e-4);
  EXPECT_NEAR(w[1], 0.6457, 1e-4);
}

TEST(Softmax, LargeBetaConcentrates) {
  const std::vector<double> r = {0.2, 0.8};
  const auto w = softmax_weights(r, 1e5);
  EXPECT_GE(w[1], 1.0 - 1e-12);
  EXPECT_LE(w[0], 1e-12);
  EXPECT_TRUE(std::isfinite(w[0]));
}

TEST(Softmax, Errors) {
  EXPECT_EQ(code_of([] { softmax_weights(std::vector<double>{}, 1.0); }), ErrorCode::kEmptySet);
  EXPECT_EQ(code_of([] { softmax_weights(std::vector<double>{0.1, NAN}, 1.0); }),
            ErrorCode::kNonFiniteReward);
}

TEST(Softmax, ShiftInvariantAndNormalized) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0), shift(-10.0, 10.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> r(1 + trial % 9);
    for (auto& x : r) x = u(rng);
    const double beta = std::pow(10.0, -3.0 + 8.0 * u(rng));
    const double c = shift(rng);
    std::vector<double> shifted;
    for (double x : r) shifted.push_back(x + c);
    const auto a = softmax_weights(r, beta);
    const auto b = softmax_weights(shifted, std::min(beta, 1e2));
    const auto a2 = softmax_weights(r, std::min(beta, 1e2));
    double sum = 0.0;
    for (double x : a) sum += x;
    ASSERT_NEAR(sum, 1.0, 1e-12);
    for (std::size_t i = 0; i < r.size(); ++i) ASSERT_NEAR(a2[i], b[i], 1e-12);
  }
}

TEST(Softmax, ConcentrationWheneverGapIsLarge) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> r(2 + trial % 7);
    for (auto& x : r) x = u(rng);
    auto sorted = r;
    std::sort(sorted.rbegin(), sorted.rend());
    const double gap = sorted[0] - sorted[1];
    if (gap <= 1e-6) continue;
    const double beta = 40.0 / gap * (1.0 + u(rng));
    const auto w = softmax_weights(r, beta);
    const auto top = std::max_element(r.begin(), r.end()) - r.begin();
    ASSERT_GE(w[top], 1.0 - 1e-12);
  }
}

TEST(Agreement, Examples) {
  CandidateSet s({cand(0.1, "42"), cand(0.2, "42"), cand(0.3, "7")});
  EXPECT_DOUBLE_EQ(agreement(s, 0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(agreement(s, 2), 1.0 / 3.0);
  CandidateSet absent({cand(0.1, std::nullopt), cand(0.2, std::nullopt)});
  EXPECT_EQ(agreement(absent, 0), 0.0);
  EXPECT_EQ(agreement(absent, 1), 0.0);
  EXPECT_EQ(code_of([&] { agreement(s, 3); }), ErrorCode::kIndexOutOfRange);
}

TEST(Agreement, BoundsAndCountIdentity) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    CandidateSet s;
    const std::size_t n = 1 + trial % 8;
    for (std::size_t i = 0; i < n; ++i) {
      const int a = static_cast<int>(rng() % 4);
      s.push_back(cand(0.5, a == 3 ? std::nullopt : std::optional<std::string>(std::string(1, 'a' + a))));
    }
    std::map<std::string, double> seen;
    for (std::size_t l = 0; l < n; ++l) {
      const double g = agreement(s, l);
      if (s[l].answer.present) {
        ASSERT_GE(g, 1.0 / n - 1e-15);
        ASSERT_LE(g, 1.0);
        seen[s[l].answer.value] = g;
      } else {
        ASSERT_EQ(g, 0.0);
      }
    }
    double lhs = 0.0, rhs = 0.0;
    for (const auto& [a, g] : seen) {
      const double count = static_cast<double>(s.count_of(NormalizedAnswer{a, true}));
      lhs += count * g;
      rhs += count * count / n;
    }
    ASSERT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(Score, Examples) {
  for (double alpha : {0.0, 0.4, 1.0}) {
    for (double beta : {1e-9, 1.0, 1e5}) {
      CandidateSet single({cand(0.7, "x")});
      EXPECT_NEAR(score(single, ScoringParams(alpha, beta)), alpha * 0.7 + (1 - alpha), 1e-15);
    }
  }
  CandidateSet two({cand(0.2, "42"), cand(0.8, "42")});
  const auto w = big_softmax({0.2, 0.8}, 1.0);
  const Big want = Big("0.4") * (w[0] * Big("0.2") + w[1] * Big("0.8")) + Big("0.6");
  EXPECT_NEAR(score(two, ScoringParams(0.4, 1.0)), want.convert_to<double>(), 1e-15);
  EXPECT_NEAR(score(two, ScoringParams(0.4, 1.0)), 0.8350, 1e-4);
  EXPECT_EQ(code_of([] { score(CandidateSet{}, ScoringParams()); }), ErrorCode::kEmptySet);
}

TEST(Score, AlphaOneIsWeightedReward) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    CandidateSet s;
    std::vector<double> r;
    for (std::size_t i = 0; i < 1 + trial % 6; ++i) {
      r.push_back(testing::random_draw(trial, 0, i).reward);
      s.push_back(cand(r.back(), testing::random_draw(trial, 0, i).answer));
    }
    const auto w = softmax_weights(r, 3.0);
    double want = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) want += w[i] * r[i];
    ASSERT_NEAR(score(s, ScoringParams(1.0, 3.0)), want, 1e-15);
  }
}

TEST(Score, MatchesBruteForceAndStaysInUnitInterval) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 3000; ++trial) {
    CandidateSet s;
    for (std::size_t i = 0; i < 1 + trial % 10; ++i) {
      s.push_back(cand(u(rng), testing::random_draw(trial, 1, i).answer));
    }
    const ScoringParams p(u(rng), std::pow(10.0, -9.0 + 14.0 * u(rng)));
    const double got = score(s, p);
    ASSERT_EQ(got, oracle::brute_score(to_pairs(s), p.alpha(), p.beta()));
    ASSERT_GE(got, 0.0);
    ASSERT_LE(got, 1.0);
  }
}

TEST(MarginalScore, Examples) {
  EXPECT_NEAR(marginal_score(CandidateSet{}, cand(0.7, "x"), ScoringParams(0.4, 1e5)), 0.88, 1e-15);

  CandidateSet s({cand(0.5, "a"), cand(0.5, "a"), cand(0.5, "b")});
  const ScoringParams p(0.0, 1e-9);
  const double a = marginal_score(s, cand(0.5, "a"), p);
  const double b = marginal_score(s, cand(0.5, "b"), p);
  EXPECT_NEAR(a, 10.0 / 16.0, 1e-9);
  EXPECT_NEAR(b, 8.0 / 16.0, 1e-9);
  EXPECT_GT(a, b);
}

TEST(MarginalScore, EqualsScoreOfExtendedSetAndIsPure) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    CandidateSet s;
    for (std::size_t i = 0; i < trial % 7; ++i) s.push_back(cand(u(rng), testing::random_draw(trial, 2, i).answer));
    // Duplicating an existing member is ordinary multiset semantics.
    const auto c = (trial % 3 == 0 && !s.empty()) ? s[0] : cand(u(rng), testing::random_draw(trial, 3, 0).answer);
    const ScoringParams p(u(rng), 10.0);
    const auto before = s.items();
    const double m1 = marginal_score(s, c, p);
    const double m2 = marginal_score(s, c, p);
    CandidateSet ext = s;
    ext.push_back(c);
    ASSERT_EQ(m1, m2);
    ASSERT_EQ(m1, score(ext, p));
    ASSERT_EQ(s.size(), before.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      ASSERT_EQ(s[i].reward, before[i].reward);
      ASSERT_EQ(s[i].answer, before[i].answer);
    }
  }
}

// alpha = 0 with near-uniform weights: every modal answer maximizes the
// marginal score over all candidate answers. Exhaustive over sets of size
// <= 6 drawn from 3 answers.
TEST(MarginalScore, MajorityLimitExhaustive) {
  const ScoringParams p(0.0, 1e-9);
  const std::vector<std::string> alphabet = {"a", "b", "c"};
  std::size_t checked = 0;
  for (std::size_t size = 1; size <= 6; ++size) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < size; ++i) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
      CandidateSet s;
      std::size_t x = code;
      std::map<std::string, std::size_t> counts;
      for (std::size_t i = 0; i < size; ++i, x /= 3) {
        s.push_back(cand(0.5, alphabet[x % 3]));
        ++counts[alphabet[x % 3]];
      }
      std::size_t max_count = 0;
      for (const auto& [a, k] : counts) max_count = std::max(max_count, k);
      double best = -1.0;
      for (const auto& a : alphabet) best = std::max(best, marginal_score(s, cand(0.5, a), p));
      for (const auto& a : alphabet) {
        const double m = marginal_score(s, cand(0.5, a), p);
        const bool modal = counts[a] == max_count;
        if (modal) ASSERT_NEAR(m, best, 1e-12) << code;
        if (!modal) ASSERT_LT(m, best - 1e-6) << code;
      }
      ++checked;
    }
  }
  EXPECT_EQ(checked, 3u + 9u + 27u + 81u + 243u + 729u);
}

TEST(ArgmaxReward, EarliestTie) {
  const std::vector<ScoredCandidate> c = {cand(0.1, "a"), cand(0.9, "b"), cand(0.5, "c")};
  EXPECT_EQ(argmax_reward(c), 1u);
  const std::vector<ScoredCandidate> tie = {cand(0.7, "a"), cand(0.7, "b")};
  EXPECT_EQ(argmax_reward(tie), 0u);
  EXPECT_EQ(code_of([] { argmax_reward(std::vector<ScoredCandidate>{}); }), ErrorCode::kEmptySet);
}

TEST(PerCandidateScore, SingletonAndAgreement) {
  const ScoringParams p(0.4, 1e5);
  EXPECT_NEAR(per_candidate_score(CandidateSet{}, cand(0.7, "x"), p), 0.88, 1e-15);
  CandidateSet s({cand(0.5, "x"), cand(0.5, "y")});
  EXPECT_GT(per_candidate_score(s, cand(0.5, "x"), p), per_candidate_score(s, cand(0.5, "z"), p));
}

}  // namespace
}  // namespace robon
