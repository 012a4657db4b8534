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

#include "snapfwd/forwarding.hpp"

#include <array>
#include <string>

#include "snapfwd/routing.hpp"

namespace snapfwd {

namespace {

constexpr std::array<std::string_view, 16> kRuleNames = {
    "R1", "R2",  "R3",  "R4",  "R5",  "R5P", "R6",  "R7",
    "R8", "R9",  "R10", "R11", "R12", "R13", "R14", "FLIP_DELETE"};

bool synchro_action(PifAction a) {
  return a == PifAction::kBInternal || a == PifAction::kFLeaf ||
         a == PifAction::kFInternal || a == PifAction::kCorrLeaf;
}

/// Everything a node's guards need besides the snapshot itself.
struct View {
  NodeId p;
  const Configuration& cfg;
  const ProtocolOptions& opts;
  std::optional<PifFiring> fired;  // wave action p takes this step

  const Slot& in(NodeId q) const { return cfg.slots[in_slot(p, q)]; }
  const Slot& out(NodeId q) const { return cfg.slots[out_slot(p, q)]; }
  const Slot& out_of(NodeId q) const { return cfg.slots[out_slot(q, p)]; }
  const Slot& ext() const { return cfg.slots[ext_slot(cfg.n)]; }

  // The wave lets p move messages when it is quiescent, or when it is
  // taking its own broadcast/feedback step next to a broadcasting neighbor.
  bool gate() const {
    if (pred_no_pif(p, cfg)) return true;
    return fired && synchro_action(fired->action) && fired->neighbor >= 0 &&
           is_b(cfg.pif[fired->neighbor]);
  }
  bool initiator_fires(PifAction a) const {
    return p == kP0 && fired && fired->action == a;
  }
  // Message in IN_p(q) still waiting to be taken (its sender has moved on).
  bool fresh_in(NodeId q) const {
    const Slot& m = in(q);
    return m && !guard_equal(out_of(q), m);
  }
  bool reversal_allowed(const Slot& m) const {
    return !opts.extension || !m->flipped;
  }
};

bool departing_link(const Configuration& cfg, NodeId p, NodeId q) {
  return cfg.departing && (*cfg.departing == p || *cfg.departing == q);
}

// p acts as the right end of the chain: the real extremity, or the neighbor
// of a departing extremity, which turns messages around on its own.
bool acts_as_far_end(const Configuration& cfg, NodeId p) {
  if (p == kP0) return false;
  if (p == cfg.n - 1) return true;
  return cfg.departing && *cfg.departing == p + 1;
}

// The link on which a far-end node reverses traffic.
NodeId far_end_link(NodeId p) { return p - 1; }

bool road_change(const View& v) {
  if (v.p != kP0) return false;
  const Slot& m = v.in(1);
  return m && m->dest != kP0 && !v.ext() && v.fresh_in(1);
}

void add_colors(const Slot& s, std::array<bool, 64>& used) {
  if (s && s->color >= 0 && s->color < 64) used[s->color] = true;
}

int target_of(const RuleFiring& r, NodeId p, int n) {
  switch (r.rule) {
    case Rule::kR3: return out_slot(p, other_neighbor(n, p, r.link));
    default: return out_slot(p, r.link);
  }
}

}  // namespace

std::string_view to_string(Rule r) { return kRuleNames[static_cast<size_t>(r)]; }

std::optional<Rule> parse_rule(std::string_view s) {
  for (size_t i = 0; i < kRuleNames.size(); ++i) {
    if (kRuleNames[i] == s) return static_cast<Rule>(i);
  }
  return std::nullopt;
}

bool pred_consumption(NodeId p, NodeId q, const Configuration& cfg,
                      const ProtocolOptions& opts) {
  const Slot& m = cfg.slots[in_slot(p, q)];
  if (!m || m->dest != p) return false;
  if (opts.mutation == Mutation::kR2SkipCopyCheck) return true;
  return !guard_equal(cfg.slots[out_slot(q, p)], m);
}

bool pred_pif_synchro(NodeId q, const Configuration& cfg,
                      const std::optional<PifFiring>& fired) {
  return fired && synchro_action(fired->action) && fired->neighbor == q &&
         is_b(cfg.pif[q]);
}

bool pred_pif_synchro(NodeId p, NodeId q, const Configuration& cfg) {
  if (p == kP0) return false;
  return pred_pif_synchro(q, cfg, firing_pif(enabled_pif(p, cfg)));
}

bool pred_inter_trans(NodeId p, NodeId q, const Configuration& cfg) {
  const NodeId o = other_neighbor(cfg.n, p, q);
  if (o < 0) return false;
  const Slot& m = cfg.slots[in_slot(p, q)];
  return m && m->dest != p && !guard_equal(cfg.slots[out_slot(q, p)], m) &&
         out_free(cfg, p, o);
}

bool pred_road_change(const Configuration& cfg) {
  static const ProtocolOptions kDefault;
  return road_change(View{kP0, cfg, kDefault, std::nullopt});
}

Color choice_color(int target, std::optional<int> moved, const Configuration& cfg,
                   const ProtocolOptions& opts) {
  std::array<bool, 64> used{};
  const BufferRef t = slot_ref(cfg.n, target);
  if (t.kind == BufferKind::kOut) {
    add_colors(cfg.slots[in_slot(t.link, t.owner)], used);
    for (NodeId x : neighbors(cfg.n, t.owner)) add_colors(cfg.slots[in_slot(t.owner, x)], used);
    if (t.owner == kP0) add_colors(cfg.slots[ext_slot(cfg.n)], used);
  }
  if (moved) add_colors(cfg.slots[*moved], used);
  for (Color c = 0; c < opts.color_count && c < 64; ++c) {
    if (!used[c]) return c;
  }
  throw ModelError("no free color around " + to_string(t));
}

RuleSet enabled_rules(NodeId p, const Configuration& cfg, const ProtocolOptions& opts) {
  return enabled_rules(p, cfg, opts, enabled_pif(p, cfg));
}

RuleSet enabled_rules(NodeId p, const Configuration& cfg, const ProtocolOptions& opts,
                      const PifActionSet& pif_enabled) {
  RuleSet out;
  const View v{p, cfg, opts, firing_pif(pif_enabled)};
  const Neighbors nb = neighbors(cfg.n, p);
  const bool gate = v.gate();
  const bool departing_self = cfg.departing && *cfg.departing == p;

  // R1
  if (const auto& req = cfg.request[p]; req && !departing_self) {
    const NodeId q = next_hop(p, req->dest, cfg);
    const bool free = opts.mutation == Mutation::kR1IgnoresFree || out_free(cfg, p, q);
    // p0 does not fill the buffer its starting wave is about to clear.
    const bool starting = p == kP0 && pred_init_pif(cfg);
    if (free && pred_no_pif(p, cfg) && !starting && !departing_link(cfg, p, q)) {
      out.push_back({Rule::kR1, q});
    }
  }
  // R2
  for (NodeId q : nb) {
    if (pred_consumption(p, q, cfg, opts)) out.push_back({Rule::kR2, q});
  }
  if (nb.count == 2) {
    // R3
    for (NodeId q : nb) {
      const NodeId o = other_neighbor(cfg.n, p, q);
      if (departing_link(cfg, p, o)) continue;
      const bool g = gate || opts.mutation == Mutation::kR3NoSynchro;
      if (g && pred_inter_trans(p, q, cfg)) out.push_back({Rule::kR3, q});
    }
  }
  // R4, for every processor: an extremity also has to take what its only
  // neighbor hands over.
  for (NodeId q : nb) {
    if (gate && !v.in(q) && v.out_of(q)) out.push_back({Rule::kR4, q});
  }
  if (nb.count == 2) {
    // R5
    for (NodeId q : nb) {
      const Slot& o = v.out(q);
      const bool copied = guard_equal(o, cfg.slots[in_slot(q, p)]) ||
                          opts.mutation == Mutation::kR5SkipCopyCheck;
      if (!o || !copied || !gate) continue;
      // The other input must hold nothing p could still take: empty, or a
      // copy whose original upstream is not erased yet. Requiring it empty
      // lets copies wait on each other around the chain forever.
      const NodeId other = other_neighbor(cfg.n, p, q);
      const bool drain = cfg.departing && *cfg.departing == q;
      if (drain || !v.fresh_in(other)) out.push_back({Rule::kR5, q});
    }
  } else {
    // R5'
    const NodeId q = nb.ids[0];
    const Slot& o = v.out(q);
    const bool ext_ok = p != kP0 || !v.ext() || opts.mutation == Mutation::kSkipR5pExtGuard;
    if (o && guard_equal(o, cfg.slots[in_slot(q, p)]) && !v.fresh_in(q) && ext_ok && gate) {
      out.push_back({Rule::kR5p, q});
    }
  }

  if (p == kP0) {
    const bool rc = road_change(v);
    const Slot& m = v.in(1);
    const bool rev = rc && v.reversal_allowed(m);
    // R6
    const bool r6_free = out_free(cfg, p, 1) || opts.mutation == Mutation::kR6IgnoresFree;
    if (rev && r6_free) out.push_back({Rule::kR6, 1});
    // R7
    if (rev && v.out(1) && !cfg.pif_request) out.push_back({Rule::kR7, 1});
    // R8
    if (rev && v.out(1) && cfg.pif_request && v.initiator_fires(PifAction::kBInitiator)) {
      out.push_back({Rule::kR8, 1});
    }
    const bool c_init = v.initiator_fires(PifAction::kCInitiator);
    // R9
    if (v.ext() && out_free(cfg, p, 1) && c_init) out.push_back({Rule::kR9, 1});
    // R10
    const bool busy = opts.mutation == Mutation::kR10IgnoresFree ? true : !out_free(cfg, p, 1);
    if (v.ext() && v.out(1) && busy && c_init) out.push_back({Rule::kR10, 1});
    // R12
    const PifState& s = cfg.pif[p];
    const bool in_wave = s.phase == PifPhase::kB && s.ptr == kPtrInit;
    if (v.ext() && (!in_wave || opts.mutation == Mutation::kR12IgnoresWave)) {
      out.push_back({Rule::kR12, 1});
    }
    // R13
    if (is_b(s) && cfg.pif_request) out.push_back({Rule::kR13, 1});
    // R14
    if (is_c(s) && cfg.pif_request && (!m || m->dest == p)) out.push_back({Rule::kR14, 1});
    // Second visit of a wrong extremity.
    if (opts.extension && rc && m->flipped) out.push_back({Rule::kFlipDelete, 1});
  } else if (acts_as_far_end(cfg, p)) {
    const NodeId q = far_end_link(p);
    const Slot& m = v.in(q);
    if (m && m->dest != p && v.fresh_in(q)) {
      // R11. The output buffer only has to be free: an already copied
      // message in it is gone from the sender's point of view.
      if (v.reversal_allowed(m) && out_free(cfg, p, q)) out.push_back({Rule::kR11, q});
      if (opts.extension && m->flipped) out.push_back({Rule::kFlipDelete, q});
    }
  }
  return out;
}

StaticVec<int, 3> write_set(NodeId p, const RuleFiring& r, int n) {
  StaticVec<int, 3> w;
  switch (r.rule) {
    case Rule::kR1:
      w.push_back(out_slot(p, r.link));
      w.push_back(kWriteRequest);
      break;
    case Rule::kR2:
    case Rule::kR4:
    case Rule::kFlipDelete:
      w.push_back(in_slot(p, r.link));
      break;
    case Rule::kR3:
      w.push_back(out_slot(p, other_neighbor(n, p, r.link)));
      w.push_back(in_slot(p, r.link));
      break;
    case Rule::kR5:
      w.push_back(out_slot(p, r.link));
      w.push_back(in_slot(p, other_neighbor(n, p, r.link)));
      break;
    case Rule::kR5p:
    case Rule::kR6:
    case Rule::kR11:
      w.push_back(out_slot(p, r.link));
      w.push_back(in_slot(p, r.link));
      break;
    case Rule::kR7:
    case Rule::kR13:
    case Rule::kR14:
      w.push_back(kWritePifRequest);
      break;
    case Rule::kR8:
      w.push_back(ext_slot(n));
      w.push_back(in_slot(p, r.link));
      break;
    case Rule::kR9:
      w.push_back(out_slot(p, r.link));
      w.push_back(ext_slot(n));
      break;
    case Rule::kR10:
    case Rule::kR12:
      w.push_back(ext_slot(n));
      break;
  }
  return w;
}

RuleSet select_rules(NodeId p, const RuleSet& enabled, const Configuration& cfg,
                     std::vector<FairPointer>& pointers) {
  const int n = cfg.n;
  RuleSet chosen;
  StaticVec<int, 24> used;
  auto conflicts = [&](const RuleFiring& r) {
    for (int w : write_set(p, r, n)) {
      for (int u : used) {
        if (u == w) return true;
      }
    }
    return false;
  };
  auto take = [&](const RuleFiring& r) {
    for (int w : write_set(p, r, n)) used.push_back(w);
    chosen.push_back(r);
  };

  for (const RuleFiring& r : enabled) {
    if (r.rule == Rule::kR2) take(r);
  }

  // Output buffers: generation against transmission, by fair pointer.
  for (NodeId x : neighbors(n, p)) {
    const int slot = out_slot(p, x);
    const RuleFiring* gen = nullptr;
    const RuleFiring* trans = nullptr;
    for (const RuleFiring& r : enabled) {
      const bool writes_out = r.rule == Rule::kR1 || r.rule == Rule::kR3 ||
                              r.rule == Rule::kR6 || r.rule == Rule::kR9 ||
                              r.rule == Rule::kR11;
      if (!writes_out || target_of(r, p, n) != slot || conflicts(r)) continue;
      if (r.rule == Rule::kR1) {
        gen = &r;
      } else if (!trans) {
        trans = &r;
      }
    }
    FairPointer& fp = pointers[slot];
    if (gen && (!trans || fp == FairPointer::kGenerate)) {
      take(*gen);
      if (fp == FairPointer::kGenerate) fp = FairPointer::kTransmit;
    } else if (trans) {
      take(*trans);
      if (fp == FairPointer::kTransmit) fp = FairPointer::kGenerate;
    }
  }

  // R5/R5' before R4: their refill of the shared input buffer writes what
  // R4 would, while R4 first would starve the erasure under steady traffic.
  static constexpr std::array<Rule, 10> kRest = {
      Rule::kFlipDelete, Rule::kR5,  Rule::kR5p, Rule::kR4,  Rule::kR7,
      Rule::kR8,         Rule::kR10, Rule::kR12, Rule::kR13, Rule::kR14};
  std::uint32_t present = 0;
  for (const RuleFiring& r : enabled) present |= 1u << static_cast<int>(r.rule);
  for (Rule rule : kRest) {
    if (!(present & (1u << static_cast<int>(rule)))) continue;
    for (const RuleFiring& r : enabled) {
      if (r.rule == rule && !conflicts(r)) take(r);
    }
  }
  return chosen;
}

void apply_rule_unchecked(NodeId p, const RuleFiring& r, const Configuration& snap,
                          Configuration& next, const ProtocolOptions& opts,
                          RuleEvents& events) {
  const int n = snap.n;
  const NodeId q = r.link;
  const bool recolor = opts.mutation != Mutation::kNoRecolor;
  auto refill = [&](NodeId link) {
    next.slots[in_slot(p, link)] = snap.slots[out_slot(link, p)];
  };
  // Writes `m` into OUT_p(x) with a color chosen around that buffer.
  auto emit = [&](NodeId x, Message m, std::optional<int> moved) {
    const int target = out_slot(p, x);
    if (recolor) m.color = choice_color(target, moved, snap, opts);
    next.slots[target] = m;
  };
  auto reverse = [&](Message m) {
    if (opts.extension) m.flipped = true;
    return m;
  };

  switch (r.rule) {
    case Rule::kR1: {
      const Request req = *snap.request[p];
      Message m{req.payload, req.dest, 0, next.next_ghost++, false};
      emit(q, m, std::nullopt);
      next.request[p].reset();
      events.generations.push_back({p, m.ghost, m.dest, q != chain_direction(p, m.dest)});
      break;
    }
    case Rule::kR2: {
      const Message& m = *snap.slots[in_slot(p, q)];
      events.deliveries.push_back({p, m.ghost, m.dest});
      refill(q);
      break;
    }
    case Rule::kR3: {
      const int src = in_slot(p, q);
      emit(other_neighbor(n, p, q), *snap.slots[src], src);
      refill(q);
      break;
    }
    case Rule::kR4:
      refill(q);
      break;
    case Rule::kR5: {
      next.slots[out_slot(p, q)].reset();
      // Draining towards a departing node may leave a fresh message behind.
      const NodeId other = other_neighbor(n, p, q);
      const Slot& in = snap.slots[in_slot(p, other)];
      if (!in || guard_equal(in, snap.slots[out_slot(other, p)])) refill(other);
      break;
    }
    case Rule::kR5p:
      next.slots[out_slot(p, q)].reset();
      refill(q);
      break;
    case Rule::kR6:
    case Rule::kR11: {
      const int src = in_slot(p, q);
      emit(q, reverse(*snap.slots[src]), src);
      refill(q);
      break;
    }
    case Rule::kR7:
      next.pif_request = true;
      break;
    case Rule::kR8:
      next.slots[ext_slot(n)] = reverse(*snap.slots[in_slot(p, q)]);
      if (opts.mutation != Mutation::kDropR8Refill) refill(q);
      break;
    case Rule::kR9:
      // Recolored like every other write into an output buffer: the stale
      // copy downstream may carry the very same (payload, dest, color).
      emit(q, *snap.slots[ext_slot(n)], ext_slot(n));
      next.slots[ext_slot(n)].reset();
      break;
    case Rule::kR10:
    case Rule::kR12: {
      const Message& m = *snap.slots[ext_slot(n)];
      events.deletions.push_back({p, m.ghost, r.rule});
      next.slots[ext_slot(n)].reset();
      break;
    }
    case Rule::kR13:
    case Rule::kR14:
      next.pif_request = false;
      break;
    case Rule::kFlipDelete: {
      const Message& m = *snap.slots[in_slot(p, q)];
      events.deletions.push_back({p, m.ghost, r.rule});
      refill(q);
      break;
    }
  }
}

void apply_rule(NodeId p, const RuleFiring& r, const Configuration& snapshot,
                Configuration& next, const ProtocolOptions& opts, RuleEvents& events) {
  bool found = false;
  for (const RuleFiring& e : enabled_rules(p, snapshot, opts)) found = found || e == r;
  if (!found) {
    throw ModelError("rule " + std::string(to_string(r.rule)) + " on link " +
                     std::to_string(r.link) + " is not enabled at node " + std::to_string(p));
  }
  apply_rule_unchecked(p, r, snapshot, next, opts, events);
}

}  // namespace snapfwd
