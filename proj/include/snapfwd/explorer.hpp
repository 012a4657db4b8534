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

#ifndef SNAPFWD_EXPLORER_HPP_
#define SNAPFWD_EXPLORER_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "snapfwd/chain.hpp"
#include "snapfwd/daemon.hpp"
#include "snapfwd/options.hpp"

namespace snapfwd {

/// A transition of the explored system: a daemon step or an environment
/// move (routing repair, application request).
struct ExploreMove {
  enum class Kind : std::uint8_t { kStep, kStabilize, kRequest };
  Kind kind = Kind::kStep;
  std::vector<NodeId> selected;  // kStep
  NodeId node = -1;              // kRequest
  NodeId dest = -1;
  int payload = 0;

  friend bool operator==(const ExploreMove&, const ExploreMove&) = default;
};

std::string to_string(const ExploreMove& m);

struct ExploreOptions {
  ProtocolOptions protocol;
  /// Every non-empty subset of enabled nodes instead of singletons plus
  /// the synchronous selection.
  bool full_subsets = false;
  std::uint64_t state_budget = 5'000'000;
  int max_depth = 0;  // 0: until the frontier is empty
  /// Requests the environment may still raise along any path.
  int request_budget = 1;
  int payloads = 2;
  /// Allow the environment to repair routing tables once.
  bool stabilize_move = true;
  int max_violations = 8;
};

struct ExploreViolation {
  std::string property;
  std::string detail;
  int initial_index = 0;
  std::vector<ExploreMove> path;
};

struct ExploreReport {
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
  int depth = 0;          // deepest BFS level reached
  bool exhausted = false;  // frontier emptied within the budget
  bool budget_hit = false;
  std::string mode;
  std::vector<ExploreViolation> violations;
};

/**
 * Explorer state beyond the configuration: whether the current wave was
 * started together with R8, and how many requests may still be raised.
 */
struct ExploreState {
  Configuration cfg;
  bool r8_wave = false;
  int requests_left = 0;
};

/// Renumbers ghosts by slot order (valid from 1 up, initial from -1 down)
/// and zeroes the clock, so equal protocol states compare equal.
void canonicalize(Configuration& cfg);

/**
 * Successor generation and per-transition safety checks, usable on its own
 * (random walks, differential tests) or driven by explore().
 */
class ExplorerModel {
 public:
  explicit ExplorerModel(ExploreOptions opts);

  struct Successor {
    ExploreMove move;
    ExploreState state;
    std::vector<std::string> violations;  // "property: detail"
  };

  /// All transitions out of `s`, with successors canonicalized.
  std::vector<Successor> expand(const ExploreState& s);

  /// Violations visible in a single state.
  std::vector<std::string> check_state(const ExploreState& s) const;

  /// Set by expand(): the state had no enabled node although tables were
  /// correct and a request or a valid message was still waiting.
  const std::optional<std::string>& deadlock() const { return deadlock_; }

  const ExploreOptions& options() const { return opts_; }

 private:
  void step_successor(const ExploreState& s, const std::vector<NodeId>& sel,
                      std::vector<Successor>& out);

  ExploreOptions opts_;
  StepExecutor exec_;
  StepReport report_;
  std::optional<std::string> deadlock_;
};

ExploreReport explore(const std::vector<Configuration>& initial, const ExploreOptions& opts);

}  // namespace snapfwd

#endif  // SNAPFWD_EXPLORER_HPP_
