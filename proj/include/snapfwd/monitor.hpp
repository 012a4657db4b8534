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

#ifndef SNAPFWD_MONITOR_HPP_
#define SNAPFWD_MONITOR_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "snapfwd/chain.hpp"
#include "snapfwd/daemon.hpp"

namespace snapfwd {

enum class Property : std::uint8_t {
  kDuplication,         // a valid message delivered twice or copied
  kValidDeletion,       // a valid message vanished without delivery
  kInvalidBound,        // more than 4n-3 deliveries of initial messages
  kRouteChange,         // more than one reversal, or a missing one
  kProgress,            // a message parked in one buffer too long
  kExtLiveness,         // EXT occupied too long
  kWavePost,            // R8 wave ends with OUT_0(1) busy
  kSuitability,         // unsuitable buffer after the stabilization window
  kPifRequest,          // PIF-Request raised after suitability, or stuck
  kWaveAlternation,     // B/C_INITIATOR out of order at p0
  kWaveCompletion,      // a wave at p0 not finished in time
  kDynamicLeaf,         // a node turned leaf for the wave it relayed
  kGenerationLiveness,  // request pending too long
  kDeliveryLiveness,    // valid message undelivered too long
  kDeadlock,            // terminal configuration with pending work
  kFairness,            // daemon exceeded its fairness bound
};

inline constexpr int kPropertyCount = 16;

std::string_view to_string(Property p);
std::optional<Property> parse_property(std::string_view s);

enum class Status : std::uint8_t { kPass, kFail, kInconclusive };

std::string_view to_string(Status s);
/// Exit code convention: PASS 0, FAIL 1, INCONCLUSIVE 2.
int exit_code(Status s);

struct Violation {
  Property property = Property::kDuplication;
  std::int64_t step = 0;
  std::string detail;
};

struct Verdict {
  Status status = Status::kPass;
  std::vector<Violation> violations;
  std::vector<std::string> pending;  // why the verdict is inconclusive
};

/**
 * Time bounds, in steps. Zero selects the default multiple of the current
 * chain length: L_gen = L_ext = 32n, L_del = 64n, B_prog = 16n, the
 * suitability window 64n, the wave bound 32n.
 */
struct MonitorBounds {
  int l_gen = 0;
  int l_del = 0;
  int l_ext = 0;
  int b_prog = 0;
  int suitable_window = 0;
  int wave = 0;
};

struct MonitorOptions {
  MonitorBounds bounds;
  bool extension = false;
  /// Stop recording after this many violations (the first ones matter).
  int max_violations = 16;
};

/// Counters kept alongside the verdict, also used to calibrate bounds.
struct MonitorStats {
  std::int64_t generated = 0;
  std::int64_t delivered_valid = 0;
  std::int64_t delivered_invalid = 0;
  std::int64_t deleted_invalid = 0;
  std::int64_t sanctioned_deletions = 0;  // extension: destination gone
  std::int64_t waves = 0;
  std::int64_t route_changes = 0;
  std::int64_t max_generation_wait = 0;  // from max(raise, onset)
  std::int64_t max_delivery_latency = 0;
  std::int64_t max_ext_stretch = 0;
  std::int64_t max_wave_length = 0;
  std::int64_t max_parked = 0;
  std::optional<std::int64_t> suitable_onset;
};

/// Copies of a valid message: one buffer, or an output buffer and the
/// guard-equal input buffer after it. Returns a description of the first
/// ghost breaking this, or nullopt.
std::optional<std::string> check_copies(const Configuration& cfg);

/**
 * Passive observer of a run.
 *
 * Keeps a ledger per ghost id (origin, destination, deliveries, reversals)
 * and checks the delivery specification plus the step-level invariants
 * after each step. It never writes to a configuration.
 */
class Monitor {
 public:
  Monitor(const Configuration& initial, MonitorOptions opts = {});

  /// Feeds one step: the snapshot it was evaluated on, its report, and the
  /// resulting configuration. Reports must come in step order.
  void observe(const Configuration& before, const StepReport& report,
               const Configuration& after);

  /// Records a fairness breach reported by the run loop.
  void fairness_breach(std::int64_t step, int age, int bound);

  /// End-of-run liveness assessment.
  Verdict finish(const Configuration& final_cfg);

  bool failed() const { return !violations_.empty(); }
  const std::vector<Violation>& violations() const { return violations_; }
  const MonitorStats& stats() const { return stats_; }

 private:
  struct Entry {
    bool known = false;
    std::int64_t born = 0;
    NodeId dest = 0;
    std::uint64_t dest_uid = 0;
    int deliveries = 0;
    int reversals = 0;
    std::uint8_t chain = 0;  // last chain bit seen: 1 = C1, 2 = C2
    bool wrong_direction = false;
    bool gone = false;
    bool late = false;  // delivery-liveness already reported
    // Buffers holding the ghost in the scan of step `seen_step`.
    std::int64_t seen_step = -1;
    int seen_slot = -1;
    int seen_count = 0;
    std::uint8_t seen_chains = 0;
  };

  Entry* entry(GhostId g);
  int bound(int configured, int factor, int n) const;
  bool dest_present(std::uint64_t uid) const;
  void fail(Property p, std::int64_t step, std::string detail);
  void apply_topology(const TopologyEvent& ev, std::int64_t step);
  void scan(const Configuration& after, std::int64_t step, bool terminal);

  MonitorOptions opts_;
  std::vector<Violation> violations_;
  MonitorStats stats_;
  std::vector<Entry> valid_;    // index = ghost id
  std::vector<Entry> initial_;  // index = -ghost id
  int initial_n_ = 0;

  // Node identities survive renumbering by left joins.
  std::vector<std::uint64_t> uid_;
  std::uint64_t next_uid_ = 0;
  std::optional<std::uint64_t> leaving_uid_;

  std::vector<std::optional<std::int64_t>> raised_;  // pending request since
  std::vector<GhostId> present_;                     // valid ghosts before
  std::vector<GhostId> scratch_;
  std::vector<std::pair<GhostId, std::int64_t>> parked_;  // per slot
  std::optional<std::int64_t> ext_since_;
  std::optional<std::int64_t> pif_request_since_;
  std::optional<std::int64_t> wave_since_;  // p0 in (B, INIT)
  bool r8_wave_ = false;
  std::vector<NodeId> relayed_from_;  // parent of the last B_INTERNAL
  std::int64_t last_step_ = -1;
  std::int64_t last_topology_ = -1;
};

}  // namespace snapfwd

#endif  // SNAPFWD_MONITOR_HPP_
