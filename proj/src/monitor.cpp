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

#include "snapfwd/monitor.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace snapfwd {

namespace {

constexpr std::array<std::string_view, kPropertyCount> kPropertyNames = {
    "duplication",        "valid-deletion",  "invalid-bound",       "route-change",
    "progress",           "ext-liveness",    "valid-wave-post",     "suitability",
    "pif-request",        "wave-alternation", "wave-completion",    "dynamic-leaf",
    "generation-liveness", "delivery-liveness", "deadlock",          "fairness",
};

constexpr std::array<std::string_view, 3> kStatusNames = {"PASS", "FAIL", "INCONCLUSIVE"};

// Per property, only the first few occurrences are kept.
constexpr int kPerProperty = 4;

std::uint8_t chain_bit(int n, int index) {
  switch (chain_of(n, index)) {
    case ChainDir::kC1: return 1;
    case ChainDir::kC2: return 2;
    default: return 0;
  }
}

std::string ghost_name(GhostId g) { return "ghost " + std::to_string(g); }

// (ghost, slot) pairs of valid messages, sorted.
void collect_valid(const Configuration& cfg, std::vector<std::pair<GhostId, int>>& out) {
  out.clear();
  for (int i = 0; i < slot_count(cfg.n); ++i) {
    const Slot& s = cfg.slots[i];
    if (s && s->ghost > 0) out.emplace_back(s->ghost, i);
  }
  std::sort(out.begin(), out.end());
}

// Index into `where` past the group starting at `i`; sets `bad` when the
// group is neither a single buffer nor one copy in flight.
size_t copy_group(const Configuration& cfg, const std::vector<std::pair<GhostId, int>>& where,
                  size_t i, bool& bad) {
  size_t j = i + 1;
  while (j < where.size() && where[j].first == where[i].first) ++j;
  const size_t k = j - i;
  bad = false;
  if (k == 2) {
    const int a = where[i].second;
    const int b = where[i + 1].second;
    bad = !(b == a + 1 && is_out_slot(cfg.n, a) && guard_equal(cfg.slots[a], cfg.slots[b]));
  } else if (k > 2) {
    bad = true;
  }
  return j;
}

}  // namespace

std::string_view to_string(Property p) { return kPropertyNames[static_cast<size_t>(p)]; }

std::optional<Property> parse_property(std::string_view s) {
  for (size_t i = 0; i < kPropertyNames.size(); ++i) {
    if (kPropertyNames[i] == s) return static_cast<Property>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Status s) { return kStatusNames[static_cast<size_t>(s)]; }

int exit_code(Status s) {
  switch (s) {
    case Status::kPass: return 0;
    case Status::kFail: return 1;
    default: return 2;
  }
}

std::optional<std::string> check_copies(const Configuration& cfg) {
  std::vector<std::pair<GhostId, int>> where;
  collect_valid(cfg, where);
  for (size_t i = 0; i < where.size();) {
    bool bad = false;
    const size_t j = copy_group(cfg, where, i, bad);
    if (bad) {
      return ghost_name(where[i].first) + " held by " + std::to_string(j - i) +
             " buffers that are not one copy in flight";
    }
    i = j;
  }
  return std::nullopt;
}

Monitor::Monitor(const Configuration& initial, MonitorOptions opts)
    : opts_(std::move(opts)), initial_n_(initial.n) {
  const int n = initial.n;
  for (int i = 0; i < slot_count(n); ++i) {
    const Slot& s = initial.slots[i];
    if (!s) continue;
    if (s->ghost >= 0) {
      throw ModelError("initial configuration holds a message with ghost id " +
                       std::to_string(s->ghost) + "; initial messages must be negative");
    }
    const size_t k = static_cast<size_t>(-s->ghost);
    if (initial_.size() <= k) initial_.resize(k + 1);
    initial_[k].known = true;
    initial_[k].dest = s->dest;
  }
  for (NodeId p = 0; p < n; ++p) uid_.push_back(next_uid_++);
  raised_.assign(n, std::nullopt);
  for (NodeId p = 0; p < n; ++p) {
    if (initial.request[p]) raised_[p] = initial.clock;
  }
  relayed_from_.assign(n, -1);
  parked_.assign(slot_count(n), {0, initial.clock});
  if (initial.pif[kP0] == PifState{PifPhase::kB, kPtrInit}) wave_since_ = initial.clock;
  if (initial.slots[ext_slot(n)]) ext_since_ = initial.clock;
}

Monitor::Entry* Monitor::entry(GhostId g) {
  if (g > 0) {
    if (static_cast<size_t>(g) >= valid_.size()) return nullptr;
    Entry& e = valid_[g];
    return e.known ? &e : nullptr;
  }
  const size_t k = static_cast<size_t>(-g);
  if (g == 0 || k >= initial_.size() || !initial_[k].known) return nullptr;
  return &initial_[k];
}

bool Monitor::dest_present(std::uint64_t uid) const {
  if (leaving_uid_ && *leaving_uid_ == uid) return false;
  return std::find(uid_.begin(), uid_.end(), uid) != uid_.end();
}

int Monitor::bound(int configured, int factor, int n) const {
  return configured > 0 ? configured : factor * n;
}

void Monitor::fail(Property p, std::int64_t step, std::string detail) {
  int same = 0;
  for (const Violation& v : violations_) same += v.property == p;
  if (same >= kPerProperty) return;
  if (static_cast<int>(violations_.size()) >= opts_.max_violations) return;
  violations_.push_back({p, step, std::move(detail)});
}

void Monitor::fairness_breach(std::int64_t step, int age, int bound) {
  fail(Property::kFairness, step,
       "node enabled for " + std::to_string(age) + " steps, bound " + std::to_string(bound));
}

void Monitor::apply_topology(const TopologyEvent& ev, std::int64_t step) {
  last_topology_ = step;
  stats_.suitable_onset.reset();
  switch (ev.op) {
    case TopologyOp::kLeaveStart:
      // The leaving node accepts nothing more: messages still addressed
      // to it fall under the relaxed specification from here on.
      leaving_uid_ = uid_[ev.node];
      break;
    case TopologyOp::kDetach:
      leaving_uid_.reset();
      uid_.erase(uid_.begin() + ev.node);
      raised_.erase(raised_.begin() + ev.node);
      relayed_from_.erase(relayed_from_.begin() + ev.node);
      break;
    case TopologyOp::kJoinRight:
      uid_.push_back(next_uid_++);
      raised_.push_back(std::nullopt);
      relayed_from_.push_back(-1);
      break;
    case TopologyOp::kJoinLeft:
      uid_.insert(uid_.begin(), next_uid_++);
      raised_.insert(raised_.begin(), std::nullopt);
      relayed_from_.assign(relayed_from_.size() + 1, -1);
      break;
  }
  for (NodeId& q : relayed_from_) q = -1;
}

void Monitor::observe(const Configuration& before, const StepReport& report,
                      const Configuration& after) {
  const std::int64_t step = report.step;
  if (step <= last_step_) {
    throw ModelError("monitor received step " + std::to_string(step) + " after " +
                     std::to_string(last_step_));
  }
  last_step_ = step;

  for (const TopologyEvent& ev : report.topology) apply_topology(ev, step);
  const int n = before.n;
  if (static_cast<int>(raised_.size()) != n) {
    throw ModelError("monitor topology out of sync with the configuration");
  }
  for (const Injection& inj : report.injections) {
    if (!raised_[inj.node]) raised_[inj.node] = step;
  }

  // Wave actions.
  bool r8 = false;
  for (const FiredAction& f : report.fired) {
    if (!f.is_pif && f.rule == Rule::kR8) r8 = true;
    if (!f.is_pif && f.rule == Rule::kR7 && stats_.suitable_onset) {
      fail(Property::kPifRequest, step, "R7 raised PIF-Request after every message was suitable");
    }
  }
  for (const FiredAction& f : report.fired) {
    if (!f.is_pif) continue;
    const NodeId p = f.node;
    switch (f.pif) {
      case PifAction::kBInitiator:
        if (wave_since_) {
          fail(Property::kWaveAlternation, step, "B_INITIATOR while a wave is still open at p0");
        }
        wave_since_ = step;
        r8_wave_ = r8;
        ++stats_.waves;
        for (NodeId& q : relayed_from_) q = -1;
        break;
      case PifAction::kCInitiator:
        if (!wave_since_) {
          fail(Property::kWaveAlternation, step, "C_INITIATOR without an open wave at p0");
        } else {
          stats_.max_wave_length = std::max(stats_.max_wave_length, step - *wave_since_);
        }
        if (r8_wave_ && !out_free(before, kP0, 1)) {
          fail(Property::kWavePost, step,
               "R8 wave ends with OUT_0(1) busy: " + describe(before));
        }
        wave_since_.reset();
        r8_wave_ = false;
        for (NodeId& q : relayed_from_) q = -1;
        break;
      case PifAction::kBInternal:
        relayed_from_[p] = f.link;
        break;
      case PifAction::kFLeaf:
        if (relayed_from_[p] >= 0 && relayed_from_[p] == f.link) {
          fail(Property::kDynamicLeaf, step,
               "node " + std::to_string(p) + " turned leaf for the wave it relayed from " +
                   std::to_string(f.link));
        }
        break;
      case PifAction::kFInternal:
        break;
      default:
        // C actions and corrections end p's part in the wave and release
        // the nodes p relayed to.
        relayed_from_[p] = -1;
        for (NodeId q : neighbors(n, p)) {
          if (relayed_from_[q] == p) relayed_from_[q] = -1;
        }
        break;
    }
  }

  const RuleEvents& ev = report.events;
  for (const auto& g : ev.generations) {
    if (g.ghost <= 0) throw ModelError("generation with a non-positive ghost id");
    if (valid_.size() <= static_cast<size_t>(g.ghost)) valid_.resize(g.ghost + 1);
    Entry& e = valid_[g.ghost];
    if (e.known) throw ModelError(ghost_name(g.ghost) + " generated twice");
    e.known = true;
    e.born = step;
    e.dest = g.dest;
    e.dest_uid = uid_[g.dest];
    e.wrong_direction = g.wrong_direction;
    ++stats_.generated;
    if (raised_[g.node]) {
      std::int64_t from = *raised_[g.node];
      if (stats_.suitable_onset) from = std::max(from, *stats_.suitable_onset);
      if (stats_.suitable_onset) {
        stats_.max_generation_wait = std::max(stats_.max_generation_wait, step - from);
      }
      raised_[g.node].reset();
    }
  }

  for (const auto& d : ev.deliveries) {
    if (d.ghost < 0) {
      ++stats_.delivered_invalid;
      const int cap = 4 * initial_n_ - 3;
      if (stats_.delivered_invalid > cap) {
        fail(Property::kInvalidBound, step,
             std::to_string(stats_.delivered_invalid) + " initial messages delivered, bound " +
                 std::to_string(cap));
      }
      continue;
    }
    Entry* e = entry(d.ghost);
    if (!e) throw ModelError("delivery of unknown " + ghost_name(d.ghost));
    if (++e->deliveries > 1) {
      fail(Property::kDuplication, step, ghost_name(d.ghost) + " delivered twice");
    }
    if (e->dest_uid == uid_[d.node]) {
      ++stats_.delivered_valid;
      stats_.max_delivery_latency = std::max(stats_.max_delivery_latency, step - e->born);
      if (e->wrong_direction && e->reversals != 1) {
        fail(Property::kRouteChange, step,
             ghost_name(d.ghost) + " generated towards the wrong side delivered after " +
                 std::to_string(e->reversals) + " route changes");
      }
    }
  }

  for (const auto& d : ev.deletions) {
    if (d.ghost < 0) {
      ++stats_.deleted_invalid;
      continue;
    }
    Entry* e = entry(d.ghost);
    if (!e) throw ModelError("deletion of unknown " + ghost_name(d.ghost));
    e->gone = true;
    if (opts_.extension && d.rule == Rule::kFlipDelete && !dest_present(e->dest_uid)) {
      ++stats_.sanctioned_deletions;
    } else {
      fail(Property::kValidDeletion, step,
           ghost_name(d.ghost) + " deleted by " + std::string(to_string(d.rule)) + " at node " +
               std::to_string(d.node));
    }
  }

  scan(after, step, report.terminal);
}

void Monitor::scan(const Configuration& after, std::int64_t step, bool terminal) {
  const int n = after.n;
  const int slots = slot_count(n);
  const int l_gen = bound(opts_.bounds.l_gen, 32, n);
  const int l_del = bound(opts_.bounds.l_del, 64, n);
  const int l_ext = bound(opts_.bounds.l_ext, 32, n);
  const int b_prog = bound(opts_.bounds.b_prog, 16, n);
  const int window = bound(opts_.bounds.suitable_window, 64, n);
  const int wave = bound(opts_.bounds.wave, 32, n);

  // One pass over the buffers: valid ghost copies, invalid ghost
  // reversals, parked messages, suitability.
  scratch_.clear();
  if (static_cast<int>(parked_.size()) != slots) parked_.assign(slots, {0, step});
  bool all_suitable = true;
  for (int i = 0; i < slots; ++i) {
    const Slot& s = after.slots[i];
    const GhostId g = s ? s->ghost : 0;

    auto& [pg, since] = parked_[i];
    if (g != pg || terminal || g == 0) {
      pg = g;
      since = step;
    } else {
      stats_.max_parked = std::max(stats_.max_parked, step - since);
      if (step - since > b_prog) {
        fail(Property::kProgress, step,
             ghost_name(g) + " parked in " + to_string(slot_ref(n, i)) + " for " +
                 std::to_string(step - since) + " steps");
        since = step;
      }
    }
    if (!s) continue;
    if (all_suitable && !is_suitable(n, i, s->dest)) all_suitable = false;
    if (g == 0) continue;

    if (g < 0) {
      Entry* e = entry(g);
      const std::uint8_t bit = chain_bit(n, i);
      if (!e || bit == 0) continue;
      if (e->chain == 0) {
        e->chain = bit;
      } else if (bit != e->chain) {
        ++e->reversals;
        ++stats_.route_changes;
        e->chain = bit;
        if (e->reversals > 1) {
          fail(Property::kRouteChange, step,
               "initial " + ghost_name(g) + " changed route " + std::to_string(e->reversals) +
                   " times");
        }
      }
      continue;
    }
    Entry* e = entry(g);
    if (!e) throw ModelError(ghost_name(g) + " appeared without a generation");
    if (e->seen_step != step) {
      e->seen_step = step;
      e->seen_slot = i;
      e->seen_count = 1;
      e->seen_chains = chain_bit(n, i);
      scratch_.push_back(g);
      continue;
    }
    // A second buffer is fine only as the input copy right after its output.
    const int first = e->seen_slot;
    const bool pair = ++e->seen_count == 2 && i == first + 1 && is_out_slot(n, first) &&
                      guard_equal(after.slots[first], s);
    if (!pair) {
      fail(Property::kDuplication, step,
           ghost_name(g) + " held by buffers that are not one copy in flight: " +
               describe(after));
    }
    e->seen_chains |= chain_bit(n, i);
  }
  for (GhostId g : scratch_) {
    Entry* e = entry(g);
    if (e->deliveries > 0 || e->gone) {
      fail(Property::kDuplication, step, ghost_name(g) + " still in a buffer after leaving");
    }
    const std::uint8_t mask = e->seen_chains;
    if (mask != 0) {
      if (e->chain == 0) {
        e->chain = mask == 3 ? 1 : mask;
      } else if (std::uint8_t fresh = mask & ~e->chain) {
        ++e->reversals;
        ++stats_.route_changes;
        e->chain = fresh;
        if (e->reversals > 1) {
          fail(Property::kRouteChange, step,
               ghost_name(g) + " changed route " + std::to_string(e->reversals) + " times");
        }
      }
    }
    if (!e->late && step - e->born > l_del && dest_present(e->dest_uid)) {
      e->late = true;
      fail(Property::kDeliveryLiveness, step,
           ghost_name(g) + " undelivered " + std::to_string(step - e->born) +
               " steps after generation");
    }
  }
  // Valid ghosts that vanished.
  for (GhostId g : present_) {
    Entry* e = entry(g);
    if (e->seen_step == step) continue;
    if (e->deliveries == 0 && !e->gone) {
      e->gone = true;
      fail(Property::kValidDeletion, step, ghost_name(g) + " vanished without delivery");
    }
  }
  present_.swap(scratch_);

  // EXT occupancy.
  if (after.slots[ext_slot(n)]) {
    if (!ext_since_) ext_since_ = step;
    stats_.max_ext_stretch = std::max(stats_.max_ext_stretch, step - *ext_since_);
    if (step - *ext_since_ > l_ext) {
      fail(Property::kExtLiveness, step,
           "EXT occupied for " + std::to_string(step - *ext_since_) + " steps");
      ext_since_ = step;
    }
  } else {
    ext_since_.reset();
  }

  // Wave length at p0.
  if (wave_since_ && step - *wave_since_ > wave) {
    fail(Property::kWaveCompletion, step,
         "wave open at p0 for " + std::to_string(step - *wave_since_) + " steps");
    wave_since_ = step;
  }

  // Suitability after routing stabilization.
  if (after.t_stab && after.clock >= *after.t_stab) {
    const bool all = all_suitable;
    const std::int64_t since = std::max<std::int64_t>(*after.t_stab, last_topology_);
    if (all && !stats_.suitable_onset) stats_.suitable_onset = step;
    if (!all && after.clock > since + window) {
      fail(Property::kSuitability, step,
           "unsuitable buffer " + std::to_string(after.clock - *after.t_stab) +
               " steps after routing stabilized: " + describe(after));
    }
  }

  // PIF-Request must drop once everything is suitable.
  if (stats_.suitable_onset && after.pif_request) {
    if (!pif_request_since_) pif_request_since_ = step;
    if (step - *pif_request_since_ > l_ext) {
      fail(Property::kPifRequest, step, "PIF-Request still raised long after suitability");
      pif_request_since_ = step;
    }
  } else {
    pif_request_since_.reset();
  }

  // Requests.
  bool pending = false;
  for (NodeId p = 0; p < n; ++p) {
    if (!after.request[p]) {
      raised_[p].reset();
      continue;
    }
    pending = true;
    if (!raised_[p]) raised_[p] = step;
    if (!stats_.suitable_onset) continue;
    const std::int64_t from = std::max(*raised_[p], *stats_.suitable_onset);
    if (step - from > l_gen) {
      fail(Property::kGenerationLiveness, step,
           "request at node " + std::to_string(p) + " pending for " +
               std::to_string(step - from) + " steps");
      raised_[p] = step;
    }
  }

  if (terminal && (pending || !present_.empty())) {
    fail(Property::kDeadlock, step, "no node enabled with pending work: " + describe(after));
  }
}

Verdict Monitor::finish(const Configuration& final_cfg) {
  Verdict v;
  v.violations = violations_;
  if (!violations_.empty()) {
    v.status = Status::kFail;
    return v;
  }
  const int n = final_cfg.n;
  for (NodeId p = 0; p < n; ++p) {
    if (final_cfg.request[p]) v.pending.push_back("request pending at node " + std::to_string(p));
  }
  for (GhostId g : present_) {
    const Entry* e = entry(g);
    if (e && dest_present(e->dest_uid)) {
      v.pending.push_back(ghost_name(g) + " not yet delivered");
    }
  }
  if (final_cfg.slots[ext_slot(n)]) v.pending.push_back("EXT still occupied");
  if (wave_since_) v.pending.push_back("wave still open at p0");
  v.status = v.pending.empty() ? Status::kPass : Status::kInconclusive;
  return v;
}

}  // namespace snapfwd
