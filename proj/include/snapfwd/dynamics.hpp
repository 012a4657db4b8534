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

#ifndef SNAPFWD_DYNAMICS_HPP_
#define SNAPFWD_DYNAMICS_HPP_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "snapfwd/chain.hpp"

namespace snapfwd {

// Neat membership changes of a chain. p0 stays put: only the far end
// leaves, and joins happen at the far end unless left joins are allowed,
// in which case the newcomer becomes p0 with a fresh EXT.
//
// Each change restarts the routing stabilizer: t_stab becomes clock +
// `restab` (nullopt: never). Table entries for a new destination start
// out pointing towards p0, which is the wrong way after a right join.

enum class JoinSide : std::uint8_t { kLeft, kRight };

std::string_view to_string(JoinSide s);
std::optional<JoinSide> parse_join_side(std::string_view s);

/**
 * Marks `p` as departing. It stops generating and accepting messages,
 * its neighbor turns traffic around in its place, and requests at p or
 * addressed to p are cancelled. Rejects anything but the far end of a chain
 * of at least three nodes, and a second leave before the first detaches.
 */
void begin_leave(Configuration& cfg, NodeId p);

/// The departing node's link is empty and both ends are out of any wave.
bool can_detach(const Configuration& cfg);

/// Removes the departing node. Requires can_detach().
void detach(Configuration& cfg, std::optional<std::int64_t> restab);

/// Whether a left join can happen now: EXT empty, p0 quiescent, no wave
/// requested, no leave in progress.
bool can_join_left(const Configuration& cfg);

/**
 * Adds an extremity with empty buffers and a quiescent wave state. A left
 * join shifts every id by one (message destinations and requests
 * included). Rejects a join during a leave, and a left join unless
 * can_join_left().
 */
void join(Configuration& cfg, JoinSide side, std::optional<std::int64_t> restab);

}  // namespace snapfwd

#endif  // SNAPFWD_DYNAMICS_HPP_
