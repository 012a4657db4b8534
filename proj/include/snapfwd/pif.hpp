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

#ifndef SNAPFWD_PIF_HPP_
#define SNAPFWD_PIF_HPP_

#include <cstdint>
#include <optional>
#include <string_view>

#include "snapfwd/chain.hpp"
#include "snapfwd/static_vec.hpp"

namespace snapfwd {

/**
 * Wave actions with dynamic leafs.
 *
 * p0 owns B/C_INITIATOR; the other extremity and any node for which
 * leaf_p(q) holds play the leaf role; all other nodes the internal role.
 * The corrections apply to every node.
 */
enum class PifAction : std::uint8_t {
  kBInitiator,
  kCInitiator,
  kFLeaf,
  kCLeaf,
  kBInternal,
  kFInternal,
  kCInternal,
  kCorrBC,
  kCorrLeaf,
  kCorrF,  // feedback pointer disowned by a broadcasting neighbor
};

std::string_view to_string(PifAction a);
std::optional<PifAction> parse_pif_action(std::string_view s);

struct PifFiring {
  PifAction action = PifAction::kBInitiator;
  NodeId neighbor = -1;  // binding of q for parameterized actions

  friend bool operator==(const PifFiring&, const PifFiring&) = default;
};

using PifActionSet = StaticVec<PifFiring, 8>;

// Guard atoms. Phase C matches regardless of the pointer value.
inline bool is_b(const PifState& s) { return s.phase == PifPhase::kB; }
inline bool is_f(const PifState& s) { return s.phase == PifPhase::kF; }
inline bool is_c(const PifState& s) { return s.phase == PifPhase::kC; }

/// leaf_p(q): the wave reaching p from q can turn back at p.
bool pred_leaf(NodeId p, NodeId q, const Configuration& cfg);

/**
 * Neighbor c might write OUT_c(p) in the current step: the buffer is free
 * and c holds a request routed through p, a message in its other input
 * buffer, or (at the far end) a message to turn around. After p's broadcast
 * step the wave escorts exactly that free buffer, so the initiator and
 * internal B actions wait while the threat lasts. Over-approximates c's
 * guards with what p can read.
 */
bool pred_output_threat(NodeId p, NodeId c, const Configuration& cfg);

/// init-PIF at p0.
bool pred_init_pif(const Configuration& cfg);

/// NO-PIF_p: p is quiescent and no neighbor is broadcasting.
bool pred_no_pif(NodeId p, const Configuration& cfg);

/// Every wave action whose guard holds at p on this snapshot.
PifActionSet enabled_pif(NodeId p, const Configuration& cfg);

/**
 * The action p executes when selected. Every action writes S_p, so at most
 * one fires; when several F_LEAF bindings hold the lowest neighbor wins.
 */
std::optional<PifFiring> firing_pif(const PifActionSet& enabled);

/// Applies `a` reading from `snapshot` and writing S_p (and PIF-Request for
/// B_INITIATOR) into `next`. Throws ModelError if `a` is not enabled.
void apply_pif(NodeId p, const PifFiring& a, const Configuration& snapshot,
               Configuration& next);

/// Unchecked variant used by the step executor.
void apply_pif_unchecked(NodeId p, const PifFiring& a, Configuration& next);

}  // namespace snapfwd

#endif  // SNAPFWD_PIF_HPP_
