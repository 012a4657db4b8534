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

#include "snapfwd/explorer.hpp"

#include <algorithm>
#include <map>
#include <string_view>

#include "snapfwd/routing.hpp"

namespace snapfwd {

namespace {

constexpr std::uint8_t kEmpty = 0xff;

std::uint64_t fnv(const std::uint8_t* p, size_t len) {
  std::uint64_t h = 1469598103934665603ULL;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

/// Fixed-width byte image of an explorer state for a given n.
class Codec {
 public:
  explicit Codec(int n) : n_(n) {
    width_ = slot_count(n) * 5 + n * 2 + n * n + n * 2 + 1 + slot_count(n) + 2;
  }
  size_t width() const { return width_; }

  void encode(const ExploreState& s, std::uint8_t* out) const {
    const Configuration& c = s.cfg;
    size_t k = 0;
    for (const Slot& sl : c.slots) {
      if (!sl) {
        out[k] = kEmpty;
        std::fill(out + k + 1, out + k + 5, std::uint8_t{0});
        k += 5;
        continue;
      }
      out[k++] = sl->flipped ? 1 : 0;
      out[k++] = static_cast<std::uint8_t>(sl->payload);
      out[k++] = static_cast<std::uint8_t>(sl->dest);
      out[k++] = static_cast<std::uint8_t>(sl->color);
      out[k++] = static_cast<std::uint8_t>(static_cast<std::int8_t>(sl->ghost));
    }
    for (const PifState& p : c.pif) {
      out[k++] = static_cast<std::uint8_t>(p.phase);
      out[k++] = static_cast<std::uint8_t>(static_cast<std::int8_t>(p.ptr));
    }
    for (NodeId e : c.routing) out[k++] = static_cast<std::uint8_t>(static_cast<std::int8_t>(e));
    for (const auto& r : c.request) {
      out[k++] = r ? static_cast<std::uint8_t>(r->payload + 1) : 0;
      out[k++] = r ? static_cast<std::uint8_t>(r->dest) : 0;
    }
    out[k++] = c.pif_request ? 1 : 0;
    for (FairPointer f : c.fair_ptr) out[k++] = static_cast<std::uint8_t>(f);
    out[k++] = s.r8_wave ? 1 : 0;
    out[k++] = static_cast<std::uint8_t>(s.requests_left);
  }

  ExploreState decode(const std::uint8_t* in) const {
    ExploreState s;
    Configuration& c = s.cfg;
    c = new_chain(n_);
    c.t_stab.reset();
    size_t k = 0;
    GhostId max_valid = 0;
    for (Slot& sl : c.slots) {
      if (in[k] == kEmpty) {
        sl.reset();
        k += 5;
        continue;
      }
      Message m;
      m.flipped = in[k] != 0;
      m.payload = in[k + 1];
      m.dest = in[k + 2];
      m.color = in[k + 3];
      m.ghost = static_cast<std::int8_t>(in[k + 4]);
      max_valid = std::max(max_valid, m.ghost);
      sl = m;
      k += 5;
    }
    for (PifState& p : c.pif) {
      p.phase = static_cast<PifPhase>(in[k++]);
      p.ptr = static_cast<std::int8_t>(in[k++]);
    }
    for (NodeId& e : c.routing) e = static_cast<std::int8_t>(in[k++]);
    for (auto& r : c.request) {
      const int pay = in[k++];
      const NodeId d = in[k++];
      if (pay) {
        r = Request{pay - 1, d};
      } else {
        r.reset();
      }
    }
    c.pif_request = in[k++] != 0;
    for (FairPointer& f : c.fair_ptr) f = static_cast<FairPointer>(in[k++]);
    s.r8_wave = in[k++] != 0;
    s.requests_left = in[k++];
    c.next_ghost = max_valid + 1;
    return s;
  }

 private:
  int n_;
  size_t width_;
};

/// Deduplicating store of encoded states with BFS bookkeeping.
class StateStore {
 public:
  explicit StateStore(size_t width) : width_(width), table_(1 << 16, 0) {}

  size_t size() const { return parent_.size(); }
  const std::uint8_t* at(size_t i) const { return arena_.data() + i * width_; }

  // Returns the index of the state, inserting it if new.
  std::pair<size_t, bool> insert(const std::uint8_t* bytes, std::uint32_t parent,
                                 std::uint32_t label, std::uint16_t depth,
                                 std::uint16_t root) {
    if ((size() + 1) * 2 > table_.size()) grow();
    const size_t mask = table_.size() - 1;
    size_t h = fnv(bytes, width_) & mask;
    while (table_[h] != 0) {
      const size_t idx = table_[h] - 1;
      if (std::equal(bytes, bytes + width_, at(idx))) return {idx, false};
      h = (h + 1) & mask;
    }
    const size_t idx = size();
    arena_.insert(arena_.end(), bytes, bytes + width_);
    parent_.push_back(parent);
    label_.push_back(label);
    depth_.push_back(depth);
    root_.push_back(root);
    table_[h] = static_cast<std::uint32_t>(idx + 1);
    return {idx, true};
  }

  std::uint32_t parent(size_t i) const { return parent_[i]; }
  std::uint32_t label(size_t i) const { return label_[i]; }
  std::uint16_t depth(size_t i) const { return depth_[i]; }
  std::uint16_t root(size_t i) const { return root_[i]; }

 private:
  void grow() {
    std::vector<std::uint32_t> t(table_.size() * 2, 0);
    const size_t mask = t.size() - 1;
    for (std::uint32_t v : table_) {
      if (!v) continue;
      size_t h = fnv(at(v - 1), width_) & mask;
      while (t[h] != 0) h = (h + 1) & mask;
      t[h] = v;
    }
    table_.swap(t);
  }

  size_t width_;
  std::vector<std::uint8_t> arena_;
  std::vector<std::uint32_t> table_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> label_;
  std::vector<std::uint16_t> depth_;
  std::vector<std::uint16_t> root_;
};

constexpr std::uint32_t kNoParent = 0xffffffffu;

std::uint32_t pack(const ExploreMove& m) {
  switch (m.kind) {
    case ExploreMove::Kind::kStep: {
      std::uint32_t mask = 0;
      for (NodeId p : m.selected) mask |= 1u << p;
      return mask;
    }
    case ExploreMove::Kind::kStabilize:
      return 1u << 28;
    case ExploreMove::Kind::kRequest:
      return (2u << 28) | (static_cast<std::uint32_t>(m.node) << 16) |
             (static_cast<std::uint32_t>(m.dest) << 8) | static_cast<std::uint32_t>(m.payload);
  }
  return 0;
}

ExploreMove unpack(std::uint32_t v) {
  ExploreMove m;
  switch (v >> 28) {
    case 0:
      m.kind = ExploreMove::Kind::kStep;
      for (NodeId p = 0; p < 28; ++p) {
        if (v & (1u << p)) m.selected.push_back(p);
      }
      break;
    case 1:
      m.kind = ExploreMove::Kind::kStabilize;
      break;
    default:
      m.kind = ExploreMove::Kind::kRequest;
      m.node = (v >> 16) & 0xff;
      m.dest = (v >> 8) & 0xff;
      m.payload = v & 0xff;
      break;
  }
  return m;
}

bool ghost_present(const Configuration& c, GhostId g) {
  for (const Slot& s : c.slots) {
    if (s && s->ghost == g) return true;
  }
  return false;
}

}  // namespace

std::string to_string(const ExploreMove& m) {
  switch (m.kind) {
    case ExploreMove::Kind::kStep: {
      std::string s = "step {";
      for (size_t i = 0; i < m.selected.size(); ++i) {
        s += (i ? "," : "") + std::to_string(m.selected[i]);
      }
      return s + "}";
    }
    case ExploreMove::Kind::kStabilize:
      return "stabilize";
    case ExploreMove::Kind::kRequest:
      return "request " + std::to_string(m.node) + "->" + std::to_string(m.dest) +
             " payload " + std::to_string(m.payload);
  }
  return "?";
}

void canonicalize(Configuration& cfg) {
  std::map<GhostId, GhostId> remap;
  GhostId valid = 1;
  GhostId initial = -1;
  for (Slot& s : cfg.slots) {
    if (!s) continue;
    auto it = remap.find(s->ghost);
    if (it == remap.end()) {
      it = remap.emplace(s->ghost, s->ghost > 0 ? valid++ : initial--).first;
    }
    s->ghost = it->second;
  }
  cfg.next_ghost = valid;
  cfg.clock = 0;
}

ExplorerModel::ExplorerModel(ExploreOptions opts) : opts_(opts), exec_(opts.protocol) {}

std::vector<std::string> ExplorerModel::check_state(const ExploreState& s) const {
  std::vector<std::string> out;
  const Configuration& c = s.cfg;
  const int n = c.n;
  std::map<GhostId, std::vector<int>> where;
  for (int i = 0; i < slot_count(n); ++i) {
    if (c.slots[i] && c.slots[i]->ghost > 0) where[c.slots[i]->ghost].push_back(i);
  }
  for (const auto& [g, idx] : where) {
    if (idx.size() == 1) continue;
    const bool pair = idx.size() == 2 && idx[1] == idx[0] + 1 && is_out_slot(n, idx[0]) &&
                      guard_equal(c.slots[idx[0]], c.slots[idx[1]]);
    if (!pair) {
      out.push_back("no-duplication: valid message held by " + std::to_string(idx.size()) +
                    " buffers that are not one copy in flight");
    }
  }
  return out;
}

void ExplorerModel::step_successor(const ExploreState& s, const std::vector<NodeId>& sel,
                                   std::vector<Successor>& out) {
  Successor succ;
  succ.move.kind = ExploreMove::Kind::kStep;
  succ.move.selected = sel;
  report_.clear();
  exec_.fire(s.cfg, sel, succ.state.cfg, report_);
  succ.state.requests_left = s.requests_left;
  succ.state.r8_wave = s.r8_wave;
  const Configuration& pre = s.cfg;
  const Configuration& post = succ.state.cfg;

  std::map<GhostId, int> delivered;
  for (const auto& d : report_.events.deliveries) {
    if (d.ghost <= 0) continue;
    if (++delivered[d.ghost] > 1) {
      succ.violations.push_back("no-duplication: message delivered twice in one step");
    }
    if (ghost_present(post, d.ghost)) {
      succ.violations.push_back("no-duplication: delivered message still in a buffer at " +
                                std::to_string(d.node));
    }
  }
  for (const Slot& sl : pre.slots) {
    if (sl && sl->ghost > 0 && !delivered.count(sl->ghost) && !ghost_present(post, sl->ghost)) {
      succ.violations.push_back("no-valid-deletion: valid message vanished without delivery");
      break;
    }
  }
  for (const auto& d : report_.events.deletions) {
    if (d.rule == Rule::kR12 && d.ghost > 0) {
      succ.violations.push_back("r12-deletes-only-initial: R12 erased a valid message");
    }
  }
  bool p0_c = false;
  bool p0_wave_end = false;
  bool r8 = false;
  for (const FiredAction& f : report_.fired) {
    if (f.node != kP0) continue;
    if (f.is_pif && f.pif == PifAction::kCInitiator) p0_c = true;
    if (f.is_pif && (f.pif == PifAction::kCInitiator || f.pif == PifAction::kCorrBC ||
                     f.pif == PifAction::kBInitiator)) {
      p0_wave_end = true;
    }
    if (!f.is_pif && f.rule == Rule::kR8) r8 = true;
  }
  if (p0_c && s.r8_wave && !is_free(pre, out_slot(kP0, 1))) {
    succ.violations.push_back("valid-wave-post: OUT_0(1) busy when the R8 wave ends");
  }
  if (p0_wave_end) succ.state.r8_wave = false;
  if (r8) succ.state.r8_wave = true;

  canonicalize(succ.state.cfg);
  for (auto& v : check_state(succ.state)) succ.violations.push_back(std::move(v));
  out.push_back(std::move(succ));
}

std::vector<ExplorerModel::Successor> ExplorerModel::expand(const ExploreState& s) {
  std::vector<Successor> out;
  exec_.evaluate(s.cfg);
  const std::vector<NodeId> en = exec_.enabled_nodes();
  deadlock_.reset();
  if (en.empty() && tables_correct(s.cfg)) {
    bool waiting = false;
    for (const auto& r : s.cfg.request) waiting = waiting || r.has_value();
    for (const Slot& sl : s.cfg.slots) waiting = waiting || (sl && sl->ghost > 0);
    if (waiting) deadlock_ = "deadlock: nothing enabled while work is pending";
  }
  if (opts_.full_subsets) {
    const std::uint32_t k = static_cast<std::uint32_t>(en.size());
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
      std::vector<NodeId> sel;
      for (std::uint32_t i = 0; i < k; ++i) {
        if (mask & (1u << i)) sel.push_back(en[i]);
      }
      step_successor(s, sel, out);
    }
  } else {
    for (NodeId p : en) step_successor(s, {p}, out);
    if (en.size() > 1) step_successor(s, en, out);
  }

  if (opts_.stabilize_move && !tables_correct(s.cfg)) {
    Successor succ;
    succ.move.kind = ExploreMove::Kind::kStabilize;
    succ.state = s;
    repair_tables(succ.state.cfg);
    out.push_back(std::move(succ));
  }
  if (s.requests_left > 0) {
    const int n = s.cfg.n;
    for (NodeId p = 0; p < n; ++p) {
      if (s.cfg.request[p]) continue;
      for (NodeId d = 0; d < n; ++d) {
        if (d == p) continue;
        for (int pay = 0; pay < opts_.payloads; ++pay) {
          Successor succ;
          succ.move = {ExploreMove::Kind::kRequest, {}, p, d, pay};
          succ.state = s;
          succ.state.cfg.request[p] = Request{pay, d};
          succ.state.requests_left--;
          out.push_back(std::move(succ));
        }
      }
    }
  }
  return out;
}

ExploreReport explore(const std::vector<Configuration>& initial, const ExploreOptions& opts) {
  ExploreReport rep;
  rep.mode = opts.full_subsets ? "full-subsets" : "singletons+sync";
  if (initial.empty()) {
    rep.exhausted = true;
    return rep;
  }
  const int n = initial.front().n;
  if (n > 16) throw ModelError("explorer supports at most 16 nodes");
  Codec codec(n);
  StateStore store(codec.width());
  ExplorerModel model(opts);
  std::vector<std::uint8_t> buf(codec.width());

  auto record = [&](size_t from, const ExploreMove* last, const std::string& what) {
    if (static_cast<int>(rep.violations.size()) >= opts.max_violations) return;
    ExploreViolation v;
    const auto colon = what.find(':');
    v.property = what.substr(0, colon);
    v.detail = colon == std::string::npos ? "" : what.substr(colon + 2);
    v.initial_index = store.root(from);
    for (size_t i = from; store.parent(i) != kNoParent; i = store.parent(i)) {
      v.path.push_back(unpack(store.label(i)));
    }
    std::reverse(v.path.begin(), v.path.end());
    if (last) v.path.push_back(*last);
    rep.violations.push_back(std::move(v));
  };

  for (size_t i = 0; i < initial.size(); ++i) {
    if (initial[i].n != n) throw ModelError("initial configurations differ in size");
    ExploreState s;
    s.cfg = initial[i];
    s.cfg.t_stab.reset();
    s.cfg.departing.reset();
    canonicalize(s.cfg);
    s.requests_left = opts.request_budget;
    codec.encode(s, buf.data());
    auto [idx, fresh] = store.insert(buf.data(), kNoParent, 0, 0, static_cast<std::uint16_t>(i));
    if (fresh) {
      for (const auto& v : model.check_state(s)) record(idx, nullptr, v);
    }
  }

  size_t next = 0;
  while (next < store.size()) {
    if (static_cast<int>(rep.violations.size()) >= opts.max_violations) break;
    const std::uint16_t d = store.depth(next);
    rep.depth = std::max<int>(rep.depth, d);
    if (opts.max_depth > 0 && d >= opts.max_depth) {
      ++next;
      continue;
    }
    const ExploreState s = codec.decode(store.at(next));
    auto succs = model.expand(s);
    if (model.deadlock()) record(next, nullptr, *model.deadlock());
    for (auto& succ : succs) {
      ++rep.transitions;
      for (const auto& v : succ.violations) record(next, &succ.move, v);
      codec.encode(succ.state, buf.data());
      if (store.size() >= opts.state_budget) {
        rep.budget_hit = true;
        break;
      }
      store.insert(buf.data(), static_cast<std::uint32_t>(next), pack(succ.move),
                   static_cast<std::uint16_t>(d + 1), store.root(next));
    }
    if (rep.budget_hit) break;
    ++next;
  }
  rep.states = store.size();
  rep.exhausted = !rep.budget_hit && next >= store.size() &&
                  static_cast<int>(rep.violations.size()) < opts.max_violations;
  return rep;
}

}  // namespace snapfwd
