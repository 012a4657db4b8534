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

#include "snapfwd/chain.hpp"

#include "snapfwd/routing.hpp"

namespace snapfwd {

std::string to_string(const BufferRef& ref) {
  switch (ref.kind) {
    case BufferKind::kIn:
      return "IN_" + std::to_string(ref.owner) + "(" + std::to_string(ref.link) + ")";
    case BufferKind::kOut:
      return "OUT_" + std::to_string(ref.owner) + "(" + std::to_string(ref.link) + ")";
    case BufferKind::kExt:
      return "EXT_" + std::to_string(ref.owner);
  }
  return "?";
}

BufferRef slot_ref(int n, int index) {
  if (index < 0 || index >= slot_count(n)) {
    throw ModelError("slot index out of range: " + std::to_string(index));
  }
  if (index == ext_slot(n)) return {kP0, BufferKind::kExt, -1};
  const int k = index / 4;
  switch (index % 4) {
    case 0: return {k, BufferKind::kOut, k + 1};
    case 1: return {k + 1, BufferKind::kIn, k};
    case 2: return {k + 1, BufferKind::kOut, k};
    default: return {k, BufferKind::kIn, k + 1};
  }
}

int slot_index(int n, const BufferRef& ref) {
  if (ref.kind == BufferKind::kExt) {
    if (ref.owner != kP0) throw ModelError("EXT exists only at p0");
    return ext_slot(n);
  }
  if (ref.owner < 0 || ref.owner >= n || !neighbors(n, ref.owner).contains(ref.link)) {
    throw ModelError("no such buffer: " + to_string(ref));
  }
  return ref.kind == BufferKind::kOut ? out_slot(ref.owner, ref.link)
                                      : in_slot(ref.owner, ref.link);
}

Configuration new_chain(int n) {
  if (n < 2) throw ModelError("a chain needs at least two nodes");
  Configuration cfg;
  cfg.n = n;
  cfg.slots.assign(slot_count(n), std::nullopt);
  cfg.pif.assign(n, PifState{});
  cfg.routing.assign(static_cast<size_t>(n) * n, -1);
  cfg.request.assign(n, std::nullopt);
  cfg.fair_ptr.assign(slot_count(n), FairPointer::kGenerate);
  cfg.t_stab = 0;
  repair_tables(cfg);
  return cfg;
}

std::optional<BufferRef> buffer_graph_next(const BufferRef& b, int n) {
  switch (b.kind) {
    case BufferKind::kExt:
      throw ModelError("EXT is outside the buffer graph chains");
    case BufferKind::kOut:
      return BufferRef{b.link, BufferKind::kIn, b.owner};
    case BufferKind::kIn: {
      const NodeId o = other_neighbor(n, b.owner, b.link);
      if (o < 0) return std::nullopt;
      return BufferRef{b.owner, BufferKind::kOut, o};
    }
  }
  return std::nullopt;
}

bool is_free(const Configuration& cfg, int index) {
  const Slot& s = cfg.slots[index];
  if (!s) return true;
  if (!is_out_slot(cfg.n, index)) return false;
  // OUT_p(q) at 4k (C1) is followed by 4k+1; OUT at 4k+2 (C2) by 4k+3.
  return guard_equal(s, cfg.slots[index + 1]);
}

void check_structure(const Configuration& cfg) {
  const int n = cfg.n;
  if (n < 2) throw ModelError("n must be at least 2");
  if (static_cast<int>(cfg.slots.size()) != slot_count(n)) {
    throw ModelError("slot count must be 4n-3");
  }
  if (static_cast<int>(cfg.pif.size()) != n ||
      static_cast<int>(cfg.request.size()) != n ||
      cfg.routing.size() != static_cast<size_t>(n) * n ||
      static_cast<int>(cfg.fair_ptr.size()) != slot_count(n)) {
    throw ModelError("per-node vectors do not match n");
  }
  for (NodeId p = 0; p < n; ++p) {
    const NodeId ptr = cfg.pif[p].ptr;
    if (ptr != kPtrInit && ptr != kPtrNull && !neighbors(n, p).contains(ptr)) {
      throw ModelError("PIF pointer of " + std::to_string(p) + " is not a neighbor");
    }
    for (NodeId d = 0; d < n; ++d) {
      const NodeId e = cfg.routing[p * n + d];
      if (d == p ? e != -1 : !neighbors(n, p).contains(e)) {
        throw ModelError("routing entry of " + std::to_string(p) + " for " +
                         std::to_string(d) + " is not a neighbor");
      }
    }
    if (cfg.request[p] && (cfg.request[p]->dest == p || cfg.request[p]->dest < 0 ||
                           cfg.request[p]->dest >= n)) {
      throw ModelError("request of " + std::to_string(p) + " has a bad destination");
    }
  }
  // A destination past the far end names a node that has left the chain.
  for (const Slot& s : cfg.slots) {
    if (s && (s->dest < 0 || s->color < 0)) {
      throw ModelError("message with out-of-range field");
    }
  }
}

std::string describe(const Configuration& cfg) {
  std::string out;
  auto msg = [](const Slot& s) {
    if (!s) return std::string("-");
    std::string r = "(" + std::to_string(s->payload) + "," + std::to_string(s->dest) + "," +
                     std::to_string(s->color) + (s->flipped ? ",f" : "") + ")#" +
                     std::to_string(s->ghost);
    return r;
  };
  for (NodeId p = 0; p < cfg.n; ++p) {
    const PifState& s = cfg.pif[p];
    const char phase = s.phase == PifPhase::kB ? 'B' : s.phase == PifPhase::kF ? 'F' : 'C';
    const std::string ptr = s.ptr == kPtrInit ? "I" : s.ptr == kPtrNull ? "N" : std::to_string(s.ptr);
    out += "[" + std::to_string(p) + " " + phase + ptr;
    for (NodeId q : neighbors(cfg.n, p)) {
      out += " in" + std::to_string(q) + "=" + msg(cfg.slots[in_slot(p, q)]);
      out += " out" + std::to_string(q) + "=" + msg(cfg.slots[out_slot(p, q)]);
    }
    if (p == kP0) out += " ext=" + msg(cfg.slots[ext_slot(cfg.n)]);
    if (cfg.request[p]) {
      out += " req=" + std::to_string(cfg.request[p]->payload) + ">" +
             std::to_string(cfg.request[p]->dest);
    }
    out += "] ";
  }
  if (cfg.pif_request) out += "pifreq ";
  return out;
}

namespace {

struct Fnv {
  std::uint64_t h = 1469598103934665603ULL;
  void add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  }
};

}  // namespace

std::uint64_t config_hash(const Configuration& cfg) {
  Fnv f;
  f.add(cfg.n);
  for (const Slot& s : cfg.slots) {
    if (!s) {
      f.add(0xe5);
      continue;
    }
    f.add(1);
    f.add(s->payload);
    f.add(s->dest);
    f.add(s->color);
    f.add(static_cast<std::uint64_t>(s->ghost));
    f.add(s->flipped);
  }
  for (const PifState& s : cfg.pif) {
    f.add(static_cast<std::uint64_t>(s.phase));
    f.add(static_cast<std::uint64_t>(s.ptr));
  }
  for (NodeId e : cfg.routing) f.add(static_cast<std::uint64_t>(e));
  for (const auto& r : cfg.request) {
    f.add(r ? 1 : 0);
    if (r) {
      f.add(r->payload);
      f.add(r->dest);
    }
  }
  f.add(cfg.pif_request);
  for (FairPointer fp : cfg.fair_ptr) f.add(static_cast<std::uint64_t>(fp));
  f.add(static_cast<std::uint64_t>(cfg.clock));
  f.add(cfg.t_stab ? static_cast<std::uint64_t>(*cfg.t_stab) : ~0ULL);
  f.add(static_cast<std::uint64_t>(cfg.next_ghost));
  f.add(cfg.departing ? static_cast<std::uint64_t>(*cfg.departing) : ~0ULL);
  return f.h;
}

}  // namespace snapfwd
