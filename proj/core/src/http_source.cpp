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

#include "robon/http_source.hpp"

#include <cmath>
#include <condition_variable>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "robon/errors.hpp"

namespace robon {

class HttpSource::Limiter {
 public:
  explicit Limiter(std::size_t cap) : free_(cap == 0 ? 1 : cap) {}

  void acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return free_ > 0; });
    --free_;
  }

  void release() {
    {
      std::lock_guard lock(mu_);
      ++free_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t free_;
};

namespace {

class Slot {
 public:
  explicit Slot(HttpSource::Limiter& l) : l_(l) { l_.acquire(); }
  ~Slot() { l_.release(); }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  HttpSource::Limiter& l_;
};

bool retryable_status(int status) { return status == 429 || status >= 500; }

// POSTs `body` and returns the parsed JSON reply, retrying transport failures
// and retryable statuses. `retries` accumulates the retries spent.
nlohmann::json post_json(const HttpSourceConfig& cfg, const std::string& base,
                         const std::string& path, const nlohmann::json& body,
                         const std::string& context, int& retries) {
  httplib::Client client(base);
  client.set_connection_timeout(cfg.connect_timeout);
  client.set_read_timeout(cfg.read_timeout);
  client.set_write_timeout(cfg.read_timeout);

  const std::string payload = body.dump();
  for (int attempt = 0;; ++attempt) {
    auto res = client.Post(path, payload, "application/json");
    const bool last = attempt >= cfg.max_retries;
    if (!res) {
      const auto err = res.error();
      if (last) {
        const bool timed_out =
            err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
        throw Error(timed_out ? ErrorCode::kTimeout : ErrorCode::kHttpError,
                    context + ": " + httplib::to_string(err) + " after " +
                        std::to_string(attempt) + " retries");
      }
    } else if (res->status >= 200 && res->status < 300) {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kMalformedReply, context + ": reply is not JSON: " + e.what());
      }
    } else if (last || !retryable_status(res->status)) {
      throw Error(ErrorCode::kHttpError,
                  context + ": HTTP status " + std::to_string(res->status));
    }
    ++retries;
    std::this_thread::sleep_for(cfg.retry_backoff * (attempt + 1));
  }
}

}  // namespace

HttpSource::HttpSource(HttpSourceConfig config)
    : HttpSource(std::move(config), nullptr) {}

HttpSource::HttpSource(HttpSourceConfig config, std::shared_ptr<Limiter> limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {
  if (config_.model_id.empty() || config_.endpoint.empty() || config_.reward_endpoint.empty()) {
    throw Error(ErrorCode::kConfigError, "HTTP source needs model_id, endpoint and reward_endpoint");
  }
  if (!limiter_) limiter_ = std::make_shared<Limiter>(config_.max_in_flight);
}

HttpSource::~HttpSource() = default;

Response HttpSource::draw(const Prompt& prompt, std::size_t draw_index) const {
  const std::string context = "model '" + config_.model_id + "' prompt '" + prompt.id + "'";
  Slot slot(*limiter_);

  Response out;
  out.model_id = config_.model_id;
  out.prompt_id = prompt.id;
  out.draw_index = draw_index;

  nlohmann::json request = {
      {"model", config_.model_id},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt.text}}})},
      {"temperature", config_.temperature},
      {"top_p", config_.top_p},
      {"max_tokens", config_.max_tokens},
  };
  const auto completion = post_json(config_, config_.endpoint, config_.completion_path, request,
                                    context, out.retries);
  try {
    out.text = completion.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedReply,
                context + ": completion reply lacks choices[0].message.content: " + e.what());
  }

  const auto scored = post_json(config_, config_.reward_endpoint, config_.reward_path,
                                {{"prompt", prompt.text}, {"response", out.text}}, context,
                                out.retries);
  const auto it = scored.find("reward");
  if (it == scored.end() || !it->is_number() || !std::isfinite(it->get<double>())) {
    throw Error(ErrorCode::kMalformedReply, context + ": reward reply lacks a finite numeric 'reward'");
  }
  out.reward_raw = it->get<double>();
  return out;
}

SourcePtr HttpSource::reseeded(std::uint64_t) const {
  return SourcePtr(new HttpSource(config_, limiter_));
}

}  // namespace robon
