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
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <vector>

#include "robon/errors.hpp"
#include "robon/rewards.hpp"
#include "support/test_util.hpp"

namespace robon {
namespace {

using Point = EmpiricalCdf::Point;
using testing::code_of;

// Direct midrank formula, one query at a time.
double midrank(const std::vector<double>& data, double v) {
  double less = 0, equal = 0;
  for (double r : data) {
    less += r < v ? 1 : 0;
    equal += r == v ? 1 : 0;
  }
  return (less + 0.5 * equal) / static_cast<double>(data.size());
}

TEST(FitCdf, MidrankOfDistinctValues) {
  const std::vector<double> data = {1.0, 2.0, 3.0, 4.0};
  const auto cdf = EmpiricalCdf::fit("m", data);
  const std::vector<Point> want = {{1.0, 0.125}, {2.0, 0.375}, {3.0, 0.625}, {4.0, 0.875}};
  ASSERT_EQ(cdf.points().size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(cdf.points()[i].raw, want[i].raw);
    EXPECT_NEAR(cdf.points()[i].fraction, midrank(data, want[i].raw), 1e-12);
    EXPECT_NEAR(cdf.points()[i].fraction, want[i].fraction, 1e-12);
  }
  EXPECT_EQ(cdf.n_fit(), 4u);
}

TEST(FitCdf, AllTied) {
  const std::vector<double> data = {5.0, 5.0};
  const auto cdf = EmpiricalCdf::fit("m", data);
  ASSERT_EQ(cdf.points().size(), 1u);
  EXPECT_EQ(cdf.points()[0], (Point{5.0, 0.5}));
}

TEST(FitCdf, TiesUseMidranks) {
  const std::vector<double> data = {3.0, 1.0, 3.0, 3.0, 2.0, 1.0};
  const auto cdf = EmpiricalCdf::fit("m", data);
  for (const auto& p : cdf.points()) EXPECT_NEAR(p.fraction, midrank(data, p.raw), 1e-12);
}

TEST(FitCdf, Errors) {
  EXPECT_EQ(code_of([] { EmpiricalCdf::fit("m", std::vector<double>{}); }),
            ErrorCode::kTooFewSamples);
  EXPECT_EQ(code_of([] { EmpiricalCdf::fit("m", std::vector<double>{1.0}); }),
            ErrorCode::kTooFewSamples);
  EXPECT_EQ(code_of([] {
              EmpiricalCdf::fit("m", std::vector<double>{1.0, std::nan("")});
            }),
            ErrorCode::kNonFiniteReward);
  EXPECT_EQ(code_of([] {
              EmpiricalCdf::fit("m", std::vector<double>{1.0, -INFINITY});
            }),
            ErrorCode::kNonFiniteReward);
}

TEST(Normalize, InterpolatesAndClamps) {
  const auto cdf = EmpiricalCdf::fit("m", std::vector<double>{1, 2, 3, 4});
  // Linear between (2, 0.375) and (3, 0.625).
  EXPECT_NEAR(cdf.normalize(2.5), 0.375 + 0.5 * (0.625 - 0.375), 1e-12);
  EXPECT_NEAR(cdf.normalize(2.5), 0.5, 1e-12);
  EXPECT_EQ(cdf.normalize(0.0), 0.0);
  EXPECT_EQ(cdf.normalize(5.0), 1.0);
  EXPECT_NEAR(cdf.normalize(2.0), 0.375, 1e-12);
  EXPECT_EQ(code_of([&] { cdf.normalize(std::nan("")); }), ErrorCode::kNonFiniteReward);
}

TEST(Normalize, SinglePointCdf) {
  const auto cdf = EmpiricalCdf::fit("m", std::vector<double>{5.0, 5.0});
  EXPECT_EQ(cdf.normalize(4.0), 0.0);
  EXPECT_EQ(cdf.normalize(5.0), 0.5);
  EXPECT_EQ(cdf.normalize(6.0), 1.0);
}

TEST(Normalize, MonotoneAndBoundedOnRandomCorpora) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 3.0);
  std::uniform_int_distribution<int> coarse(-5, 5);
  for (int corpus = 0; corpus < 20; ++corpus) {
    std::vector<double> data(50 + corpus * 10);
    for (auto& x : data) x = corpus % 2 ? noise(rng) : coarse(rng);  // odd: continuous, even: ties
    const auto cdf = EmpiricalCdf::fit("m", data);
    std::vector<double> qs(2000);
    std::uniform_real_distribution<double> q(-12.0, 12.0);
    for (auto& x : qs) x = q(rng);
    std::sort(qs.begin(), qs.end());
    double prev = -1.0;
    for (double x : qs) {
      const double v = cdf.normalize(x);
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
      ASSERT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(Normalize, FitCorpusIsNearUniform) {
  // Kolmogorov distance of the normalized fit corpus from Uniform[0,1]. With
  // distinct values the midranks sit at (2i-1)/(2n), distance 1/(2n).
  std::mt19937_64 rng(5);
  std::lognormal_distribution<double> dist(0.0, 1.0);
  for (std::size_t n : {2u, 7u, 100u, 1000u}) {
    std::vector<double> data(n);
    for (auto& x : data) x = dist(rng);
    const auto cdf = EmpiricalCdf::fit("m", data);
    std::vector<double> u;
    for (double x : data) u.push_back(cdf.normalize(x));
    std::sort(u.begin(), u.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d = std::max({d, std::abs(u[i] - static_cast<double>(i) / n),
                    std::abs(static_cast<double>(i + 1) / n - u[i])});
    }
    EXPECT_LE(d, 1.0 / static_cast<double>(n) + 1e-12) << n;
  }
}

TEST(CdfArtifact, RoundTripsBitExactly) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> data(3 + trial);
    for (auto& x : data) x = dist(rng) / 3.0;
    const auto cdf = EmpiricalCdf::fit("model-" + std::to_string(trial), data);
    const auto back = cdf_from_json(cdf_to_json(cdf));
    ASSERT_EQ(back, cdf);
    ASSERT_EQ(cdf_to_json(back), cdf_to_json(cdf));
  }
}

TEST(CdfArtifact, FileSchema) {
  const auto cdf = EmpiricalCdf::fit("qwen", std::vector<double>{1, 2, 3, 4});
  EXPECT_EQ(cdf_to_json(cdf),
            R"({"model_id":"qwen","n_fit":4,"points":[[1.0,0.125],[2.0,0.375],[3.0,0.625],[4.0,0.875]]})");
  const auto path = std::filesystem::temp_directory_path() / "robon_cdf_test.json";
  save_cdf(cdf, path);
  EXPECT_EQ(load_cdf(path), cdf);
  std::filesystem::remove(path);
}

TEST(CdfArtifact, RejectsBrokenInvariants) {
  EXPECT_EQ(code_of([] { cdf_from_json(R"({"model_id":"m","n_fit":2,"points":[[2,0.6],[1,0.7]]})"); }),
            ErrorCode::kDataError);
  EXPECT_EQ(code_of([] { cdf_from_json(R"({"model_id":"m","n_fit":2,"points":[[1,1.0]]})"); }),
            ErrorCode::kDataError);
  EXPECT_EQ(code_of([] { cdf_from_json(R"({"model_id":"m","n_fit":1,"points":[[1,0.5]]})"); }),
            ErrorCode::kDataError);
  EXPECT_EQ(code_of([] { cdf_from_json("not json"); }), ErrorCode::kDataError);
}

TEST(RewardNormalizer, LookupAndIdentity) {
  auto n = RewardNormalizer::from_cdfs({EmpiricalCdf::fit("a", std::vector<double>{1, 2, 3, 4})});
  EXPECT_NEAR(n.normalize("a", 2.5), 0.5, 1e-12);
  EXPECT_EQ(code_of([&] { n.normalize("b", 1.0); }), ErrorCode::kMissingCdf);

  auto id = RewardNormalizer::identity();
  EXPECT_EQ(id.normalize("b", 0.25), 0.25);
  EXPECT_EQ(code_of([&] { id.normalize("b", 1.5); }), ErrorCode::kRewardFailure);
  id.add(EmpiricalCdf::fit("a", std::vector<double>{1, 2, 3, 4}));
  EXPECT_NEAR(id.normalize("a", 2.5), 0.5, 1e-12);
}

}  // namespace
}  // namespace robon
