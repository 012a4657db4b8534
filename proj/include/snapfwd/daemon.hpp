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

#ifndef SNAPFWD_DAEMON_HPP_
#define SNAPFWD_DAEMON_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "snapfwd/chain.hpp"
#include "snapfwd/forwarding.hpp"
#include "snapfwd/options.hpp"
#include "snapfwd/pif.hpp"

namespace snapfwd {

/// One action executed by a selected node.
struct FiredAction {
  NodeId node = 0;
  bool is_pif = false;
  PifAction pif = PifAction::kBInitiator;
  Rule rule = Rule::kR1;
  NodeId link = -1;

  friend bool operator==(const FiredAction&, const FiredAction&) = default;
};

/// A request raised by the workload driver right before a step.
struct Injection {
  NodeId node = 0;
  int payload = 0;
  NodeId dest = 0;

  friend bool operator==(const Injection&, const Injection&) = default;
};

enum class TopologyOp : std::uint8_t { kLeaveStart, kDetach, kJoinRight, kJoinLeft };

std::string_view to_string(TopologyOp op);

struct TopologyEvent {
  TopologyOp op = TopologyOp::kJoinRight;
  NodeId node = 0;  // departing/new node, in the numbering before the event

  friend bool operator==(const TopologyEvent&, const TopologyEvent&) = default;
};

struct StepReport {
  std::int64_t step = 0;
  std::vector<NodeId> enabled;  // guard outcome of phase one
  std::vector<NodeId> selected;
  std::vector<FiredAction> fired;
  RuleEvents events;
  std::vector<Injection> injections;
  std::vector<TopologyEvent> topology;
  std::uint64_t hash = 0;
  bool terminal = false;

  void clear();
};

/**
 * Two-phase step execution shared by the daemon and the explorer.
 *
 * evaluate() computes every guard on a snapshot; fire() lets the selected
 * nodes execute their wave action and selected forwarding rules, reading the
 * snapshot and writing a fresh copy, then advances the routing stabilizer.
 */
class StepExecutor {
 public:
  explicit StepExecutor(ProtocolOptions opts = {}) : opts_(opts) {}

  const ProtocolOptions& options() const { return opts_; }

  void evaluate(const Configuration& cfg);
  const std::vector<NodeId>& enabled_nodes() const { return enabled_nodes_; }
  bool is_enabled(NodeId p) const { return enabled_[p]; }
  const PifActionSet& pif_enabled(NodeId p) const { return pif_[p]; }
  const RuleSet& rules_enabled(NodeId p) const { return rules_[p]; }

  /// `selected` must be a sorted subset of enabled_nodes() of the last
  /// evaluate() call on `snap`. An empty selection marks a terminal step:
  /// the configuration is copied unchanged and the stabilizer is not run.
  void fire(const Configuration& snap, const std::vector<NodeId>& selected,
            Configuration& next, StepReport& report);

 private:
  ProtocolOptions opts_;
  std::vector<PifActionSet> pif_;
  std::vector<RuleSet> rules_;
  std::vector<char> enabled_;
  std::vector<NodeId> enabled_nodes_;
};

enum class Strategy : std::uint8_t { kSync, kRandomFair, kAdversary, kReplay };

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view s);

struct Schedule {
  Strategy strategy = Strategy::kSync;
  std::uint64_t seed = 0;
  int fairness_bound = 0;  // 0: default 2n
  std::vector<std::vector<NodeId>> replay;
};

/**
 * Picks the nodes that move at each step.
 *
 * Every strategy enforces weak fairness: a node enabled for F-1 consecutive
 * steps without moving is selected at the next one.
 */
class Daemon {
 public:
  Daemon(Schedule sched, int n);

  /// `enabled` lists enabled nodes in increasing order; non-empty. The
  /// result stays valid until the next call.
  const std::vector<NodeId>& select(const std::vector<NodeId>& enabled, std::int64_t step);

  /// Oldest continuous enabledness among nodes, after the last selection.
  int max_age() const;
  int fairness_bound() const { return bound_; }
  /// Topology changes renumber nodes; ages are reset.
  void resize(int n);
  /// A step with nothing enabled: every age drops to zero.
  void idle();
  bool replay_exhausted(std::int64_t step) const;

 private:
  bool coin() { return (rng_() >> 63) != 0; }
  std::uint64_t below(std::uint64_t k) { return rng_() % k; }

  Schedule sched_;
  int n_;
  int bound_;
  std::mt19937_64 rng_;
  std::vector<int> age_;
  std::vector<NodeId> victims_;
  std::int64_t victims_since_ = -1;
  std::vector<NodeId> out_;
  std::vector<NodeId> others_;
  std::vector<char> pick_;
  std::vector<char> enabled_;
};

}  // namespace snapfwd

#endif  // SNAPFWD_DAEMON_HPP_
