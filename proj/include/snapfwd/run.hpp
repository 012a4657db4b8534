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

#ifndef SNAPFWD_RUN_HPP_
#define SNAPFWD_RUN_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "snapfwd/chain.hpp"
#include "snapfwd/daemon.hpp"
#include "snapfwd/dynamics.hpp"
#include "snapfwd/faults.hpp"
#include "snapfwd/monitor.hpp"
#include "snapfwd/options.hpp"

namespace snapfwd {

/// Derives independent sub-seeds from one run seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

struct WorkloadOptions {
  /// Chance per step that an idle node gets a new request.
  double rate = 0.1;
  int payloads = 4;
  /// Allowed destinations; empty means every other node.
  std::vector<NodeId> dests;
  /// First step without new requests; negative: horizon - (L_gen + L_del)
  /// so that the tail of the run drains.
  std::int64_t stop_at = -1;
};

/**
 * Raises Request_p for idle nodes. Never touches a node whose request is
 * still pending, nor a departing node, and never addresses one.
 */
class Workload {
 public:
  Workload(WorkloadOptions opts, std::uint64_t seed);
  void inject(Configuration& cfg, std::int64_t step, std::vector<Injection>& out);
  const WorkloadOptions& options() const { return opts_; }

 private:
  WorkloadOptions opts_;
  std::mt19937_64 rng_;
  std::vector<NodeId> pool_;
};

struct TopologyChange {
  std::int64_t step = 0;
  bool leave = false;  // otherwise a join
  JoinSide side = JoinSide::kRight;
  /// Node asked to leave; -1 names the far end. Anything but the far end is
  /// rejected when the event comes due.
  NodeId node = -1;
};

struct DynamicsOptions {
  std::vector<TopologyChange> events;
  /// Minimum steps between two changes; 0 means 64n.
  int min_gap = 0;
  bool allow_left_join = false;
};

/// What one step of a recorded run consumed, for exact replays.
struct StepInputs {
  std::vector<NodeId> selected;
  std::vector<Injection> injections;
  std::vector<TopologyEvent> topology;
  bool terminal = false;
};

struct RunConfig {
  int n = 3;
  Profile profile = Profile::kClean;
  Strategy strategy = Strategy::kRandomFair;
  std::uint64_t seed = 1;
  std::int64_t horizon = 10000;
  /// Routing repair delay in steps; nullopt: never.
  std::optional<std::int64_t> t_stab = 0;
  int fairness_bound = 0;  // 0: 2n
  WorkloadOptions workload;
  ProtocolOptions protocol;
  FaultOptions faults;
  MonitorOptions monitor;
  DynamicsOptions dynamics;
  bool stop_on_fail = true;
  /// Starts from this configuration instead of sampling one.
  std::optional<Configuration> initial;
  /// Replays these inputs step by step instead of scheduling, injecting
  /// and changing the topology.
  std::optional<std::vector<StepInputs>> script;
};

struct RunResult {
  Verdict verdict;
  MonitorStats stats;
  std::int64_t steps = 0;
  Configuration initial;
  Configuration final_cfg;
};

/// Called after every step with the snapshot, the report and the result.
using StepSink = std::function<void(const Configuration& before, const StepReport& report,
                                    const Configuration& after)>;

/// Validates a run configuration; throws std::invalid_argument.
void validate(const RunConfig& rc);

/**
 * Runs one seeded execution under the monitor. Stops at the horizon, on
 * the first violation when stop_on_fail, or once the workload has stopped
 * and the system is quiescent. Terminal steps still advance time.
 */
RunResult run(const RunConfig& rc, const StepSink& sink = {});

}  // namespace snapfwd

#endif  // SNAPFWD_RUN_HPP_
