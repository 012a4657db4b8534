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

#include "snapfwd/dynamics.hpp"

#include <string>

#include "snapfwd/pif.hpp"
#include "snapfwd/routing.hpp"

namespace snapfwd {

namespace {

// Rebuilds the n'xn' routing matrix, old ids being new ids minus `shift`.
// Entries that did not exist point towards p0.
std::vector<NodeId> remap_routing(const Configuration& cfg, int n2, int shift) {
  std::vector<NodeId> r(static_cast<size_t>(n2) * n2, -1);
  for (NodeId p = 0; p < n2; ++p) {
    for (NodeId d = 0; d < n2; ++d) {
      if (d == p) continue;
      const NodeId op = p - shift;
      const NodeId od = d - shift;
      NodeId e = -1;
      if (op >= 0 && op < cfg.n && od >= 0 && od < cfg.n) e = cfg.routing[op * cfg.n + od] + shift;
      if (e < 0 || e >= n2 || (e != p - 1 && e != p + 1)) e = p > 0 ? p - 1 : p + 1;
      r[p * n2 + d] = e;
    }
  }
  return r;
}

void restart(Configuration& cfg, std::optional<std::int64_t> restab) {
  cfg.t_stab = restab ? std::optional<std::int64_t>(cfg.clock + *restab) : std::nullopt;
  stabilizer_start(cfg);
}

}  // namespace

std::string_view to_string(JoinSide s) { return s == JoinSide::kLeft ? "LEFT" : "RIGHT"; }

std::optional<JoinSide> parse_join_side(std::string_view s) {
  if (s == "LEFT" || s == "left") return JoinSide::kLeft;
  if (s == "RIGHT" || s == "right") return JoinSide::kRight;
  return std::nullopt;
}

void begin_leave(Configuration& cfg, NodeId p) {
  if (cfg.departing) throw ModelError("a leave is already in progress");
  if (p == kP0) throw ModelError("p0 does not leave");
  if (p != cfg.n - 1) {
    throw ModelError("node " + std::to_string(p) + " is not the far extremity; only it may leave");
  }
  if (cfg.n < 3) throw ModelError("a chain keeps at least two nodes");
  cfg.departing = p;
  cfg.request[p].reset();
  for (auto& r : cfg.request) {
    if (r && r->dest == p) r.reset();
  }
}

bool can_detach(const Configuration& cfg) {
  if (!cfg.departing) return false;
  const NodeId d = *cfg.departing;
  for (int k = 0; k < 4; ++k) {
    if (cfg.slots[4 * (d - 1) + k]) return false;
  }
  return is_c(cfg.pif[d]) && is_c(cfg.pif[d - 1]);
}

void detach(Configuration& cfg, std::optional<std::int64_t> restab) {
  if (!can_detach(cfg)) throw ModelError("departing node has not drained yet");
  const NodeId d = *cfg.departing;
  const int n2 = cfg.n - 1;
  Configuration out = cfg;
  out.n = n2;
  out.slots.assign(cfg.slots.begin(), cfg.slots.begin() + 4 * (d - 1));
  out.slots.push_back(cfg.slots[ext_slot(cfg.n)]);
  out.fair_ptr.assign(cfg.fair_ptr.begin(), cfg.fair_ptr.begin() + 4 * (d - 1));
  out.fair_ptr.push_back(cfg.fair_ptr[ext_slot(cfg.n)]);
  out.pif.pop_back();
  if (out.pif[d - 1].ptr == d) out.pif[d - 1].ptr = kPtrNull;
  out.request.pop_back();
  out.routing = remap_routing(cfg, n2, 0);
  out.departing.reset();
  restart(out, restab);
  cfg = std::move(out);
}

bool can_join_left(const Configuration& cfg) {
  return !cfg.departing && !cfg.slots[ext_slot(cfg.n)] && cfg.pif[kP0] == PifState{} &&
         !cfg.pif_request;
}

void join(Configuration& cfg, JoinSide side, std::optional<std::int64_t> restab) {
  if (cfg.departing) throw ModelError("join during a leave");
  const int n2 = cfg.n + 1;
  Configuration out = cfg;
  out.n = n2;
  if (side == JoinSide::kRight) {
    out.slots.assign(cfg.slots.begin(), cfg.slots.begin() + ext_slot(cfg.n));
    out.slots.resize(out.slots.size() + 4);
    out.slots.push_back(cfg.slots[ext_slot(cfg.n)]);
    out.fair_ptr.assign(cfg.fair_ptr.begin(), cfg.fair_ptr.begin() + ext_slot(cfg.n));
    out.fair_ptr.resize(out.fair_ptr.size() + 4, FairPointer::kGenerate);
    out.fair_ptr.push_back(cfg.fair_ptr[ext_slot(cfg.n)]);
    out.pif.push_back(PifState{});
    out.request.push_back(std::nullopt);
    out.routing = remap_routing(cfg, n2, 0);
  } else {
    if (!can_join_left(cfg)) throw ModelError("left join needs an empty EXT and a quiescent p0");
    out.slots.assign(4, std::nullopt);
    out.slots.insert(out.slots.end(), cfg.slots.begin(), cfg.slots.begin() + ext_slot(cfg.n));
    out.slots.push_back(std::nullopt);
    for (Slot& s : out.slots) {
      if (s) ++s->dest;
    }
    out.fair_ptr.assign(4, FairPointer::kGenerate);
    out.fair_ptr.insert(out.fair_ptr.end(), cfg.fair_ptr.begin(),
                        cfg.fair_ptr.begin() + ext_slot(cfg.n));
    out.fair_ptr.push_back(FairPointer::kGenerate);
    out.pif.insert(out.pif.begin(), PifState{});
    for (NodeId p = 1; p < n2; ++p) {
      PifState& s = out.pif[p];
      if (s.ptr >= 0) ++s.ptr;
    }
    out.request.insert(out.request.begin(), std::nullopt);
    for (auto& r : out.request) {
      if (r) ++r->dest;
    }
    out.routing = remap_routing(cfg, n2, 1);
  }
  restart(out, restab);
  cfg = std::move(out);
}

}  // namespace snapfwd
