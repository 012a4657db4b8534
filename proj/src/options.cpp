/*
 * Copyright (c) 2026, The snapfwd Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#include "snapfwd/options.hpp"

#include <array>

namespace snapfwd {

namespace {

constexpr std::array<std::string_view, 11> kMutationNames = {
    "none",          "drop-r8-refill",     "no-recolor",     "skip-r5p-ext-guard",
    "r10-ignores-free", "r2-skip-copy-check", "r1-ignores-free", "r3-no-synchro",
    "r12-ignores-wave", "r5-skip-copy-check", "r6-ignores-free"};

}  // namespace

std::string_view to_string(Mutation m) {
  return kMutationNames[static_cast<size_t>(m)];
}

std::optional<Mutation> parse_mutation(std::string_view s) {
  for (size_t i = 0; i < kMutationNames.size(); ++i) {
    if (kMutationNames[i] == s) return static_cast<Mutation>(i);
  }
  return std::nullopt;
}

std::vector<Mutation> all_mutations() {
  std::vector<Mutation> out;
  for (size_t i = 1; i < kMutationNames.size(); ++i) {
    out.push_back(static_cast<Mutation>(i));
  }
  return out;
}

}  // namespace snapfwd
