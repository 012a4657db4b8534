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

#ifndef SNAPFWD_OPTIONS_HPP_
#define SNAPFWD_OPTIONS_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "snapfwd/chain.hpp"

namespace snapfwd {

/**
 * Deliberate single-rule breakages used to check that the monitor and the
 * explorer detect real protocol bugs. Never enabled outside self-tests.
 */
enum class Mutation {
  kNone,
  kDropR8Refill,      // R8 copies IN into EXT but leaves IN untouched
  kNoRecolor,         // Choice keeps the incoming color
  kSkipR5pExtGuard,   // R5' at p0 ignores EXT = empty
  kR10IgnoresFree,    // R10 deletes EXT even when OUT is free
  kR2SkipCopyCheck,   // consumption ignores OUT_q(p) != IN_p(q)
  kR1IgnoresFree,     // generation overwrites a busy output buffer
  kR3NoSynchro,       // internal transmission ignores the wave
  kR12IgnoresWave,    // R12 clears EXT during the initiator's wave too
  kR5SkipCopyCheck,   // R5 erases an output buffer not yet copied
  kR6IgnoresFree,     // road change overwrites a busy OUT_0(1)
};

std::string_view to_string(Mutation m);
std::optional<Mutation> parse_mutation(std::string_view s);
std::vector<Mutation> all_mutations();

struct ProtocolOptions {
  int color_count = kDefaultColorCount;
  /// Dynamic-chain mode: messages carry a flipped bit and a second visit to
  /// a wrong extremity deletes them.
  bool extension = false;
  Mutation mutation = Mutation::kNone;
};

}  // namespace snapfwd

#endif  // SNAPFWD_OPTIONS_HPP_
