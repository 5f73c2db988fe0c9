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

#include "robon/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "robon/errors.hpp"

namespace robon {
namespace {

void require_finite(double v, const std::string& model_id) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kNonFiniteReward,
                "non-finite reward for model '" + model_id + "'");
  }
}

}  // namespace

EmpiricalCdf EmpiricalCdf::fit(std::string model_id, std::span<const double> raw_rewards) {
  if (raw_rewards.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples,
                "model '" + model_id + "' has " + std::to_string(raw_rewards.size()) +
                    " rewards; at least 2 are needed");
  }
  for (double r : raw_rewards) require_finite(r, model_id);

  std::vector<double> sorted(raw_rewards.begin(), raw_rewards.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  std::vector<Point> points;
  std::size_t below = 0;
  while (below < sorted.size()) {
    std::size_t end = below;
    while (end < sorted.size() && sorted[end] == sorted[below]) ++end;
    const double ties = static_cast<double>(end - below);
    points.push_back({sorted[below], (static_cast<double>(below) + 0.5 * ties) / n});
    below = end;
  }
  return EmpiricalCdf(std::move(model_id), sorted.size(), std::move(points));
}

EmpiricalCdf EmpiricalCdf::from_points(std::string model_id, std::size_t n_fit,
                                       std::vector<Point> points) {
  auto bad = [&](const std::string& why) {
    return Error(ErrorCode::kDataError, "CDF for model '" + model_id + "': " + why);
  };
  if (n_fit < 2) throw bad("n_fit must be at least 2");
  if (points.empty() || points.size() > n_fit) throw bad("point count inconsistent with n_fit");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!std::isfinite(p.raw) || !(p.fraction > 0.0 && p.fraction < 1.0)) {
      throw bad("point " + std::to_string(i) + " out of range");
    }
    if (i > 0 && !(p.raw > points[i - 1].raw && p.fraction > points[i - 1].fraction)) {
      throw bad("points are not strictly increasing at index " + std::to_string(i));
    }
  }
  return EmpiricalCdf(std::move(model_id), n_fit, std::move(points));
}

double EmpiricalCdf::normalize(double raw) const {
  require_finite(raw, model_id_);
  if (raw < points_.front().raw) return 0.0;
  if (raw > points_.back().raw) return 1.0;
  auto hi = std::lower_bound(points_.begin(), points_.end(), raw,
                             [](const Point& p, double v) { return p.raw < v; });
  if (hi->raw == raw) return hi->fraction;
  auto lo = std::prev(hi);
  const double t = (raw - lo->raw) / (hi->raw - lo->raw);
  return lo->fraction + t * (hi->fraction - lo->fraction);
}

std::string cdf_to_json(const EmpiricalCdf& cdf) {
  nlohmann::ordered_json j;
  j["model_id"] = cdf.model_id();
  j["n_fit"] = cdf.n_fit();
  auto& pts = j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : cdf.points()) pts.push_back({p.raw, p.fraction});
  return j.dump();
}

EmpiricalCdf cdf_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    std::vector<EmpiricalCdf::Point> points;
    for (const auto& p : j.at("points")) {
      if (!p.is_array() || p.size() != 2) {
        throw Error(ErrorCode::kDataError, "CDF point must be a [raw, frac] pair");
      }
      points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return EmpiricalCdf::from_points(j.at("model_id").get<std::string>(),
                                     j.at("n_fit").get<std::size_t>(), std::move(points));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kDataError, std::string("malformed CDF artifact: ") + e.what());
  }
}

void save_cdf(const EmpiricalCdf& cdf, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << cdf_to_json(cdf) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

EmpiricalCdf load_cdf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return cdf_from_json(buf.str());
}

RewardNormalizer RewardNormalizer::identity() {
  RewardNormalizer n;
  n.identity_ = true;
  return n;
}

RewardNormalizer RewardNormalizer::from_cdfs(std::vector<EmpiricalCdf> cdfs) {
  RewardNormalizer n;
  for (auto& c : cdfs) n.add(std::move(c));
  return n;
}

void RewardNormalizer::add(EmpiricalCdf cdf) {
  std::string id = cdf.model_id();
  cdfs_.insert_or_assign(std::move(id), std::move(cdf));
}

bool RewardNormalizer::has(const std::string& model_id) const {
  return identity_ || cdfs_.contains(model_id);
}

double RewardNormalizer::normalize(const std::string& model_id, double raw) const {
  if (auto it = cdfs_.find(model_id); it != cdfs_.end()) return it->second.normalize(raw);
  if (!identity_) {
    throw Error(ErrorCode::kMissingCdf, "no reward CDF for model '" + model_id + "'");
  }
  require_finite(raw, model_id);
  if (raw < 0.0 || raw > 1.0) {
    throw Error(ErrorCode::kRewardFailure,
                "identity normalization needs rewards in [0,1]; model '" + model_id +
                    "' produced " + std::to_string(raw));
  }
  return raw;
}

}  // namespace robon
