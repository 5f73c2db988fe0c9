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

#include "robon/answers.hpp"

#include <algorithm>
#include <cctype>

namespace robon {
namespace {

constexpr std::string_view kBoxed = "\\boxed{";
constexpr std::string_view kMarker = "answer:";

// Position one past the brace that closes the group opened just before
// `open_end`, or npos when the group never closes.
std::size_t closing_brace(std::string_view text, std::size_t open_end) {
  int depth = 1;
  for (std::size_t i = open_end; i < text.size(); ++i) {
    if (text[i] == '{') {
      ++depth;
    } else if (text[i] == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<std::string> last_boxed(std::string_view text) {
  std::optional<std::string> found;
  std::size_t pos = 0;
  while ((pos = text.find(kBoxed, pos)) != std::string_view::npos) {
    const std::size_t open_end = pos + kBoxed.size();
    const std::size_t close_end = closing_brace(text, open_end);
    if (close_end == std::string_view::npos) {
      pos = open_end;
      continue;
    }
    found = std::string(text.substr(open_end, close_end - 1 - open_end));
    pos = close_end;
  }
  return found;
}

std::optional<std::string> after_marker(std::string_view text) {
  std::string lowered(text);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const std::size_t at = lowered.rfind(kMarker);
  if (at == std::string::npos) return std::nullopt;
  std::string_view rest = text.substr(at + kMarker.size());
  rest = rest.substr(0, rest.find('\n'));
  rest = trim(rest);
  if (rest.empty()) return std::nullopt;
  return std::string(rest);
}

}  // namespace

std::optional<std::string> extract_answer(std::string_view text) {
  if (auto boxed = last_boxed(text); boxed && !trim(*boxed).empty()) return boxed;
  return after_marker(text);
}

NormalizedAnswer normalize_answer(const std::optional<std::string>& raw) {
  if (!raw) return {};
  std::string v;
  v.reserve(raw->size());
  for (char c : *raw) {
    if (is_space(c)) continue;
    v.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (bool changed = true; changed;) {
    changed = false;
    if (v.size() >= 2 && v.front() == '$' && v.back() == '$') {
      v = v.substr(1, v.size() - 2);
      changed = true;
    }
    if (!v.empty() && v.back() == '.') {
      v.pop_back();
      changed = true;
    }
  }
  if (v.empty()) return {};
  return {std::move(v), true};
}

}  // namespace robon
