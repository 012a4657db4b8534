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

#ifndef SNAPFWD_FORWARDING_HPP_
#define SNAPFWD_FORWARDING_HPP_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "snapfwd/chain.hpp"
#include "snapfwd/options.hpp"
#include "snapfwd/pif.hpp"
#include "snapfwd/static_vec.hpp"

namespace snapfwd {

enum class Rule : std::uint8_t {
  kR1,   // generation
  kR2,   // consumption
  kR3,   // internal transmission
  kR4,   // copy OUT_q(p) into an empty IN_p(q)
  kR5,   // erase a transmitted message (two neighbors)
  kR5p,  // erase a transmitted message (extremity)
  kR6,   // road change at p0 through a free output buffer
  kR7,   // request a wave
  kR8,   // road change at p0 into EXT, with B_INITIATOR
  kR9,   // EXT into the output buffer, with C_INITIATOR
  kR10,  // EXT deleted, with C_INITIATOR
  kR11,  // road change at the other extremity
  kR12,  // EXT deleted outside a wave
  kR13,  // PIF-Request cleared during a wave
  kR14,  // PIF-Request cleared when no road change is pending
  kFlipDelete,  // extension mode: second wrong-extremity visit
};

std::string_view to_string(Rule r);
std::optional<Rule> parse_rule(std::string_view s);

struct RuleFiring {
  Rule rule = Rule::kR1;
  /// Link binding: the input link for R2/R3/R4/R6/R8/R11/FlipDelete, the
  /// output link for R1/R5/R5'/R9/R10; the only link for p0 rules.
  NodeId link = -1;

  friend bool operator==(const RuleFiring&, const RuleFiring&) = default;
};

using RuleSet = StaticVec<RuleFiring, 24>;

// --- predicates -------------------------------------------------------------

/// Consumption_p(q, m) with m bound to the content of IN_p(q).
bool pred_consumption(NodeId p, NodeId q, const Configuration& cfg,
                      const ProtocolOptions& opts = {});

/// PIF-Synchro_p(q): q broadcasts and p is taking a B or F step towards q.
bool pred_pif_synchro(NodeId p, NodeId q, const Configuration& cfg);
bool pred_pif_synchro(NodeId q, const Configuration& cfg,
                      const std::optional<PifFiring>& fired);

/// Inter-trans_p(q) with (m, d) bound to the content of IN_p(q).
bool pred_inter_trans(NodeId p, NodeId q, const Configuration& cfg);

/// Road-Change_p at p0.
bool pred_road_change(const Configuration& cfg);

/// Smallest color not carried by the slots adjacent to `target` in the
/// buffer graph (predecessor, successor) nor by `moved` (the slot whose
/// content is being written). Throws ModelError if none is left.
Color choice_color(int target, std::optional<int> moved,
                   const Configuration& cfg, const ProtocolOptions& opts);

// --- rules ------------------------------------------------------------------

RuleSet enabled_rules(NodeId p, const Configuration& cfg,
                      const ProtocolOptions& opts = {});

/// Same, given the wave action p would fire on this snapshot.
RuleSet enabled_rules(NodeId p, const Configuration& cfg,
                      const ProtocolOptions& opts,
                      const PifActionSet& pif_enabled);

/// Slots and variables a rule firing writes, encoded as slot indices plus
/// kWriteRequest / kWritePifRequest.
inline constexpr int kWriteRequest = -10;
inline constexpr int kWritePifRequest = -11;
StaticVec<int, 3> write_set(NodeId p, const RuleFiring& r, int n);

/**
 * Picks the rules p fires this step.
 *
 * R2 bindings go first. Generation competes with any transmission into the
 * same output buffer (R3, R6, R9, R11) through that buffer's fair pointer;
 * the pointer flips when its designated side fires. The rest follow in the
 * listing order, skipping any rule whose write set meets an earlier pick.
 * `pointers` receives the updated fair pointers.
 */
RuleSet select_rules(NodeId p, const RuleSet& enabled,
                     const Configuration& cfg,
                     std::vector<FairPointer>& pointers);

/// Events emitted by rule statements.
struct RuleEvents {
  struct Delivery {
    NodeId node;
    GhostId ghost;
    NodeId dest;
  };
  struct Deletion {
    NodeId node;
    GhostId ghost;
    Rule rule;
  };
  struct Generation {
    NodeId node;
    GhostId ghost;
    NodeId dest;
    bool wrong_direction;
  };
  std::vector<Delivery> deliveries;
  std::vector<Deletion> deletions;
  std::vector<Generation> generations;

  void clear() {
    deliveries.clear();
    deletions.clear();
    generations.clear();
  }
};

/**
 * Executes a rule statement: reads from `snapshot`, writes into `next`.
 * Throws ModelError if the rule is not enabled at p on the snapshot.
 */
void apply_rule(NodeId p, const RuleFiring& r, const Configuration& snapshot,
                Configuration& next, const ProtocolOptions& opts,
                RuleEvents& events);

void apply_rule_unchecked(NodeId p, const RuleFiring& r,
                          const Configuration& snapshot, Configuration& next,
                          const ProtocolOptions& opts, RuleEvents& events);

}  // namespace snapfwd

#endif  // SNAPFWD_FORWARDING_HPP_
