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

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "robon/corpus.hpp"
#include "robon/scoring.hpp"

namespace robon {

// One generation from a model for a prompt.
struct Response {
  std::string model_id;
  std::string prompt_id;
  std::size_t draw_index = 1;
  std::string text;
  double reward_raw = 0.0;
  bool recycled = false;  // replay sample reused beyond corpus capacity
  int retries = 0;        // transport retries spent (HTTP only)
};

// Per-model response supplier. Replay and synthetic sources are pure
// functions of (prompt, draw_index, seed) and safe for concurrent draws.
class ModelSource {
 public:
  virtual ~ModelSource() = default;

  virtual const std::string& model_id() const = 0;

  // draw_index is 1-based.
  virtual Response draw(const Prompt& prompt, std::size_t draw_index) const = 0;

  // Copy of this source with its sampling seed replaced.
  virtual std::shared_ptr<const ModelSource> reseeded(std::uint64_t seed) const = 0;
};

using SourcePtr = std::shared_ptr<const ModelSource>;
using Portfolio = std::vector<SourcePtr>;

// Maps a drawn response to its normalized reward in [0,1].
using RewardFn = std::function<double(const Response&)>;

// Draws response `draw_index` from `source` and scores it. Throws
// kRewardFailure if the reward is non-finite or outside [0,1].
ScoredCandidate draw_scored(const ModelSource& source, std::size_t model_index,
                            const Prompt& prompt, std::size_t draw_index,
                            const RewardFn& reward_fn);

// Counts draws passing through to the wrapped source. Reseeded copies share
// the counter.
class CountingSource final : public ModelSource {
 public:
  explicit CountingSource(SourcePtr inner);

  const std::string& model_id() const override { return inner_->model_id(); }
  Response draw(const Prompt& prompt, std::size_t draw_index) const override;
  SourcePtr reseeded(std::uint64_t seed) const override;

  std::uint64_t count() const noexcept { return counter_->load(); }

 private:
  CountingSource(SourcePtr inner, std::shared_ptr<std::atomic<std::uint64_t>> counter);

  SourcePtr inner_;
  std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

// Serves stored corpus responses. Draw k of a prompt is the k-th entry of a
// permutation of that model's samples seeded by (shuffle_seed, prompt, model).
// Past the stored capacity it throws kSourceExhausted, or, with recycling on,
// resamples uniformly with replacement and flags the response.
class ReplaySource final : public ModelSource {
 public:
  // Throws kUnknownModel when the corpus holds no responses for model_id.
  ReplaySource(std::shared_ptr<const Corpus> corpus, std::string model_id,
               std::uint64_t shuffle_seed, bool recycle = false);

  const std::string& model_id() const override { return model_id_; }
  Response draw(const Prompt& prompt, std::size_t draw_index) const override;
  SourcePtr reseeded(std::uint64_t seed) const override;

  // Position in the stored sample list served for draw k (0-based), for
  // k within capacity.
  std::size_t permuted_position(const std::string& prompt_id, std::size_t draw_index) const;

 private:
  std::shared_ptr<const Corpus> corpus_;
  std::string model_id_;
  std::uint64_t seed_;
  bool recycle_;
  std::map<std::string, std::vector<std::uint32_t>> permutations_;
};

struct BetaParams {
  double a = 1.0;
  double b = 1.0;
};

struct WeightedAnswer {
  std::string answer;
  double weight = 1.0;
};

// Generative stand-in for a model: each draw is correct with a per-prompt
// probability and carries a Beta-distributed raw reward whose parameters
// depend on correctness.
struct SyntheticModelSpec {
  std::string model_id;
  double p_correct = 0.5;
  std::map<std::string, double> p_by_dataset;  // overrides p_correct
  std::map<std::string, double> p_by_prompt;   // overrides both
  std::string gold = "gold";                   // used when the prompt has none
  std::vector<WeightedAnswer> wrong_answers{{"wrong", 1.0}};
  BetaParams correct_reward{8.0, 2.0};
  BetaParams incorrect_reward{2.0, 8.0};

  // Throws kConfigError on probabilities outside [0,1], non-positive Beta
  // parameters, or wrong-answer weights that do not sum to 1.
  void validate() const;
  double p_for(const Prompt& prompt) const;
};

class SyntheticSource final : public ModelSource {
 public:
  SyntheticSource(SyntheticModelSpec spec, std::uint64_t seed);

  const std::string& model_id() const override { return spec_.model_id; }
  Response draw(const Prompt& prompt, std::size_t draw_index) const override;
  SourcePtr reseeded(std::uint64_t seed) const override;

  const SyntheticModelSpec& spec() const noexcept { return spec_; }

 private:
  SyntheticModelSpec spec_;
  std::uint64_t seed_;
};

}  // namespace robon
