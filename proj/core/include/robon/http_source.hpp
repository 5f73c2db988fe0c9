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

#include <chrono>
#include <memory>
#include <string>

#include "robon/sources.hpp"

namespace robon {

struct HttpSourceConfig {
  std::string model_id;         // sent as the "model" field
  std::string endpoint;         // generation server base URL, http://host:port
  std::string reward_endpoint;  // reward server base URL
  std::string completion_path = "/v1/chat/completions";
  std::string reward_path = "/score";
  double temperature = 1.0;
  double top_p = 0.95;
  int max_tokens = 2048;
  std::chrono::milliseconds connect_timeout{5000};
  std::chrono::milliseconds read_timeout{120000};
  int max_retries = 3;  // per request, on transport failure, 429 or 5xx
  std::chrono::milliseconds retry_backoff{200};
  std::size_t max_in_flight = 8;
};

// Live model behind an OpenAI-compatible chat-completions server, scored by a
// reward server answering POST {prompt, response} with {reward}.
//
// Failures raise kTimeout, kHttpError or kMalformedReply with the model and
// prompt ids in the message. Sampling is not reproducible; reseeded() only
// returns a copy sharing the in-flight cap.
class HttpSource final : public ModelSource {
 public:
  explicit HttpSource(HttpSourceConfig config);
  ~HttpSource() override;

  const std::string& model_id() const override { return config_.model_id; }
  Response draw(const Prompt& prompt, std::size_t draw_index) const override;
  SourcePtr reseeded(std::uint64_t seed) const override;

  const HttpSourceConfig& config() const noexcept { return config_; }

  class Limiter;

 private:
  HttpSource(HttpSourceConfig config, std::shared_ptr<Limiter> limiter);

  HttpSourceConfig config_;
  std::shared_ptr<Limiter> limiter_;
};

}  // namespace robon
