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

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace robon {

// Per-model map from raw reward-model scores to [0,1].
//
// Fit points hold the midrank cumulative fraction
//   F(v) = (#{r < v} + 0.5 * #{r = v}) / n_fit
// for every distinct fit value v. Queries between fit points interpolate
// linearly; queries outside the fit range clamp to 0 or 1.
class EmpiricalCdf {
 public:
  struct Point {
    double raw;
    double fraction;
    friend bool operator==(const Point&, const Point&) = default;
  };

  // Throws kTooFewSamples (fewer than two rewards) or kNonFiniteReward.
  static EmpiricalCdf fit(std::string model_id, std::span<const double> raw_rewards);

  // Rebuilds a fitted map from stored points, validating its invariants.
  // Throws kDataError when they do not hold.
  static EmpiricalCdf from_points(std::string model_id, std::size_t n_fit,
                                  std::vector<Point> points);

  double normalize(double raw) const;

  const std::string& model_id() const noexcept { return model_id_; }
  std::size_t n_fit() const noexcept { return n_fit_; }
  const std::vector<Point>& points() const noexcept { return points_; }

  friend bool operator==(const EmpiricalCdf&, const EmpiricalCdf&) = default;

 private:
  EmpiricalCdf(std::string model_id, std::size_t n_fit, std::vector<Point> points)
      : model_id_(std::move(model_id)), n_fit_(n_fit), points_(std::move(points)) {}

  std::string model_id_;
  std::size_t n_fit_ = 0;
  std::vector<Point> points_;
};

// JSON artifact: {"model_id": ..., "n_fit": ..., "points": [[raw, frac], ...]}.
std::string cdf_to_json(const EmpiricalCdf& cdf);
EmpiricalCdf cdf_from_json(const std::string& text);
void save_cdf(const EmpiricalCdf& cdf, const std::filesystem::path& path);
EmpiricalCdf load_cdf(const std::filesystem::path& path);

// Raw-to-normalized reward lookup across a portfolio. Models without a fitted
// CDF either fail with kMissingCdf or, when identity mode is on, pass raw
// rewards through (which must already lie in [0,1]).
class RewardNormalizer {
 public:
  static RewardNormalizer identity();
  static RewardNormalizer from_cdfs(std::vector<EmpiricalCdf> cdfs);

  void add(EmpiricalCdf cdf);
  bool has(const std::string& model_id) const;
  bool is_identity() const noexcept { return identity_; }

  // Throws kMissingCdf, kNonFiniteReward, or kRewardFailure (identity mode,
  // raw outside [0,1]).
  double normalize(const std::string& model_id, double raw) const;

 private:
  bool identity_ = false;
  std::map<std::string, EmpiricalCdf, std::less<>> cdfs_;
};

}  // namespace robon
