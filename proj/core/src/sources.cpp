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

#include "robon/sources.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "robon/errors.hpp"
#include "robon/rng.hpp"

namespace robon {

ScoredCandidate draw_scored(const ModelSource& source, std::size_t model_index,
                            const Prompt& prompt, std::size_t draw_index,
                            const RewardFn& reward_fn) {
  Response r = source.draw(prompt, draw_index);
  const double reward = reward_fn(r);
  if (!std::isfinite(reward) || reward < 0.0 || reward > 1.0) {
    throw Error(ErrorCode::kRewardFailure,
                "normalized reward " + std::to_string(reward) + " for model '" + r.model_id +
                    "' prompt '" + prompt.id + "' is not a finite value in [0,1]");
  }
  ScoredCandidate c;
  c.answer = answer_of(r.text);
  c.response_text = std::move(r.text);
  c.reward = reward;
  c.model_id = source.model_id();
  c.model_index = model_index;
  c.draw_index = draw_index;
  c.recycled = r.recycled;
  return c;
}

// CountingSource

CountingSource::CountingSource(SourcePtr inner)
    : CountingSource(std::move(inner), std::make_shared<std::atomic<std::uint64_t>>(0)) {}

CountingSource::CountingSource(SourcePtr inner,
                               std::shared_ptr<std::atomic<std::uint64_t>> counter)
    : inner_(std::move(inner)), counter_(std::move(counter)) {}

Response CountingSource::draw(const Prompt& prompt, std::size_t draw_index) const {
  counter_->fetch_add(1, std::memory_order_relaxed);
  return inner_->draw(prompt, draw_index);
}

SourcePtr CountingSource::reseeded(std::uint64_t seed) const {
  return SourcePtr(new CountingSource(inner_->reseeded(seed), counter_));
}

// ReplaySource

ReplaySource::ReplaySource(std::shared_ptr<const Corpus> corpus, std::string model_id,
                           std::uint64_t shuffle_seed, bool recycle)
    : corpus_(std::move(corpus)), model_id_(std::move(model_id)), seed_(shuffle_seed),
      recycle_(recycle) {
  if (!corpus_->has_model(model_id_)) {
    throw Error(ErrorCode::kUnknownModel, "corpus has no responses for model '" + model_id_ + "'");
  }
  for (const auto& prompt : corpus_->prompts()) {
    const auto samples = corpus_->samples(prompt.id, model_id_);
    if (samples.empty()) continue;
    std::vector<std::uint32_t> perm(samples.size());
    std::iota(perm.begin(), perm.end(), 0u);
    Rng rng = make_rng({seed_, fnv1a(prompt.id), fnv1a(model_id_)});
    std::shuffle(perm.begin(), perm.end(), rng);
    permutations_.emplace(prompt.id, std::move(perm));
  }
}

std::size_t ReplaySource::permuted_position(const std::string& prompt_id,
                                            std::size_t draw_index) const {
  auto it = permutations_.find(prompt_id);
  if (it == permutations_.end()) {
    if (corpus_->find_prompt(prompt_id) == nullptr) {
      throw Error(ErrorCode::kUnknownPrompt, "prompt '" + prompt_id + "' is not in the corpus");
    }
    throw Error(ErrorCode::kSourceExhausted,
                "model '" + model_id_ + "' has no samples for prompt '" + prompt_id + "'");
  }
  if (draw_index < 1 || draw_index > it->second.size()) {
    throw Error(ErrorCode::kSourceExhausted,
                "model '" + model_id_ + "' prompt '" + prompt_id + "': draw " +
                    std::to_string(draw_index) + " exceeds " +
                    std::to_string(it->second.size()) + " stored samples");
  }
  return it->second[draw_index - 1];
}

Response ReplaySource::draw(const Prompt& prompt, std::size_t draw_index) const {
  const auto samples = corpus_->samples(prompt.id, model_id_);
  Response out;
  out.model_id = model_id_;
  out.prompt_id = prompt.id;
  out.draw_index = draw_index;

  std::size_t pos = 0;
  if (recycle_ && !samples.empty() && draw_index > samples.size()) {
    Rng rng = make_rng({seed_, fnv1a(prompt.id), fnv1a(model_id_), draw_index});
    pos = std::uniform_int_distribution<std::size_t>(0, samples.size() - 1)(rng);
    out.recycled = true;
  } else {
    pos = permuted_position(prompt.id, draw_index);
  }
  out.text = samples[pos].text;
  out.reward_raw = samples[pos].reward_raw;
  return out;
}

SourcePtr ReplaySource::reseeded(std::uint64_t seed) const {
  return std::make_shared<ReplaySource>(corpus_, model_id_, seed, recycle_);
}

// SyntheticSource

void SyntheticModelSpec::validate() const {
  auto fail = [&](const std::string& why) {
    return Error(ErrorCode::kConfigError, "synthetic model '" + model_id + "': " + why);
  };
  auto check_p = [&](double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw fail("correctness probability outside [0,1]");
  };
  check_p(p_correct);
  for (const auto& [_, p] : p_by_dataset) check_p(p);
  for (const auto& [_, p] : p_by_prompt) check_p(p);
  for (const BetaParams& b : {correct_reward, incorrect_reward}) {
    if (!(b.a > 0.0 && b.b > 0.0) || !std::isfinite(b.a) || !std::isfinite(b.b)) {
      throw fail("Beta parameters must be finite and positive");
    }
  }
  if (wrong_answers.empty()) throw fail("wrong-answer pool is empty");
  double total = 0.0;
  for (const auto& w : wrong_answers) {
    if (!(w.weight >= 0.0)) throw fail("negative wrong-answer weight");
    total += w.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw fail("wrong-answer weights must sum to 1");
}

double SyntheticModelSpec::p_for(const Prompt& prompt) const {
  if (auto it = p_by_prompt.find(prompt.id); it != p_by_prompt.end()) return it->second;
  if (auto it = p_by_dataset.find(prompt.dataset); it != p_by_dataset.end()) return it->second;
  return p_correct;
}

SyntheticSource::SyntheticSource(SyntheticModelSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), seed_(seed) {
  spec_.validate();
}

namespace {

double sample_beta(Rng& rng, const BetaParams& b) {
  const double x = std::gamma_distribution<double>(b.a, 1.0)(rng);
  const double y = std::gamma_distribution<double>(b.b, 1.0)(rng);
  return x / (x + y);
}

}  // namespace

Response SyntheticSource::draw(const Prompt& prompt, std::size_t draw_index) const {
  Rng rng = make_rng({seed_, fnv1a(spec_.model_id), fnv1a(prompt.id), draw_index});
  const bool correct = std::bernoulli_distribution(spec_.p_for(prompt))(rng);

  std::string answer;
  double reward = 0.0;
  if (correct) {
    answer = prompt.gold.value_or(spec_.gold);
    reward = sample_beta(rng, spec_.correct_reward);
  } else {
    std::vector<double> weights;
    weights.reserve(spec_.wrong_answers.size());
    for (const auto& w : spec_.wrong_answers) weights.push_back(w.weight);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    answer = spec_.wrong_answers[pick(rng)].answer;
    reward = sample_beta(rng, spec_.incorrect_reward);
  }

  Response out;
  out.model_id = spec_.model_id;
  out.prompt_id = prompt.id;
  out.draw_index = draw_index;
  out.text = "[" + spec_.model_id + " sample " + std::to_string(draw_index) +
             "] The final answer is \\boxed{" + answer + "}.";
  out.reward_raw = reward;
  return out;
}

SourcePtr SyntheticSource::reseeded(std::uint64_t seed) const {
  return std::make_shared<SyntheticSource>(spec_, seed);
}

}  // namespace robon
