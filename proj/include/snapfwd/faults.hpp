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

#ifndef SNAPFWD_FAULTS_HPP_
#define SNAPFWD_FAULTS_HPP_

#include <cstdint>
#include <optional>
#include <string_view>

#include "snapfwd/chain.hpp"

namespace snapfwd {

enum class Profile : std::uint8_t {
  kClean,
  kBuffersOnly,
  kPifOnly,
  kRoutingOnly,
  kFull,
  kWorstCaseFullBuffers,
};

std::string_view to_string(Profile p);
std::optional<Profile> parse_profile(std::string_view s);

struct FaultOptions {
  int color_count = kDefaultColorCount;
  int payloads = 4;
  bool extension = false;  // randomize the flipped bit too
};

/**
 * Samples an initial configuration of `n` nodes.
 *
 * Messages found in it get negative ghost ids; an output buffer and the
 * input buffer after it holding guard-equal contents count as one message
 * (a copy in flight) and share a ghost id. The clock starts at 0 with
 * t_stab left at 0; callers set the stabilization delay.
 *
 * kWorstCaseFullBuffers fills all 4n-3 buffers, EXT included, with pairwise
 * guard-distinct messages, none of them consumable where it sits, corrupts
 * routing, and keeps the wave quiescent.
 */
Configuration arbitrary_config(int n, std::uint64_t seed, Profile profile,
                               const FaultOptions& opts = {});

/// Renumbers ghosts of a hand-built configuration the same way.
void assign_initial_ghosts(Configuration& cfg);

}  // namespace snapfwd

#endif  // SNAPFWD_FAULTS_HPP_
