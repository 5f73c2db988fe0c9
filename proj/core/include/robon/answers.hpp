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

#include <optional>
#include <string>
#include <string_view>

namespace robon {

// Canonical final answer a(y) of a response. `present` is false when nothing
// could be extracted; in that case `value` is empty.
struct NormalizedAnswer {
  std::string value;
  bool present = false;

  friend bool operator==(const NormalizedAnswer&, const NormalizedAnswer&) = default;
};

// Returns the content of the last balanced \boxed{...} group. Falls back to
// the text after the last case-insensitive "answer:" marker, cut at the end
// of its line. Returns nullopt when neither site yields a non-empty answer.
//
// Groups are scanned left to right and a matched group is consumed whole, so
// for nested input like \boxed{\boxed{1}} the outer group is returned. An
// unterminated \boxed{ is skipped.
std::optional<std::string> extract_answer(std::string_view text);

// Removes ASCII whitespace, lowercases ASCII letters, then strips enclosing
// $...$ pairs and a trailing period until neither applies. An empty result is
// reported as not present.
NormalizedAnswer normalize_answer(const std::optional<std::string>& raw);

inline NormalizedAnswer answer_of(std::string_view text) {
  return normalize_answer(extract_answer(text));
}

// Exact match of present answers. Two absent answers are not equal.
inline bool answers_equal(const NormalizedAnswer& a, const NormalizedAnswer& b) {
  return a.present && b.present && a.value == b.value;
}

}  // namespace robon
