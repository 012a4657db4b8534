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

#include "snapfwd/pif.hpp"

#include <array>
#include <string>

#include "snapfwd/forwarding.hpp"

namespace snapfwd {

namespace {

constexpr std::array<std::string_view, 10> kPifNames = {
    "B_INITIATOR", "C_INITIATOR", "F_LEAF",  "C_LEAF",    "B_INTERNAL",
    "F_INTERNAL",  "C_INTERNAL",  "CORR_BC", "CORR_LEAF", "CORR_F"};

bool all_neighbors(NodeId p, const Configuration& cfg, bool (*pred)(const PifState&)) {
  for (NodeId q : neighbors(cfg.n, p)) {
    if (!pred(cfg.pif[q])) return false;
  }
  return true;
}

bool f_or_c(const PifState& s) { return !is_b(s); }

// Feedback counts only when it answers p itself.
bool feedback_to(NodeId p, NodeId except, const Configuration& cfg) {
  for (NodeId q : neighbors(cfg.n, p)) {
    if (q != except && !(is_f(cfg.pif[q]) && cfg.pif[q].ptr == p)) return false;
  }
  return true;
}

// No neighbor other than `except` may fill its output buffer towards p in
// the step p broadcasts.
bool no_generation_threat(NodeId p, NodeId except, const Configuration& cfg) {
  for (NodeId c : neighbors(cfg.n, p)) {
    if (c != except && pred_output_threat(p, c, cfg)) return false;
  }
  return true;
}

}  // namespace

bool pred_output_threat(NodeId p, NodeId c, const Configuration& cfg) {
  if (!out_free(cfg, c, p)) return false;
  const int n = cfg.n;
  if (const auto& req = cfg.request[c];
      req && req->dest != c && !(cfg.departing && *cfg.departing == c) &&
      cfg.routing[c * n + req->dest] == p) {
    return true;
  }
  const NodeId cc = other_neighbor(n, c, p);
  if (cc >= 0) {
    // Internal transmission from c's other input buffer.
    const Slot& m = cfg.slots[in_slot(c, cc)];
    if (m && m->dest != c) return true;
  }
  const bool far_end = c != kP0 && (cc < 0 || (cfg.departing && *cfg.departing == cc));
  if (far_end) {
    // Reversal of the message p handed over.
    const Slot& m = cfg.slots[in_slot(c, p)];
    if (m && m->dest != c && !guard_equal(cfg.slots[out_slot(p, c)], m)) return true;
  }
  return false;
}

std::string_view to_string(PifAction a) {
  return kPifNames[static_cast<size_t>(a)];
}

std::optional<PifAction> parse_pif_action(std::string_view s) {
  for (size_t i = 0; i < kPifNames.size(); ++i) {
    if (kPifNames[i] == s) return static_cast<PifAction>(i);
  }
  return std::nullopt;
}

bool pred_leaf(NodeId p, NodeId q, const Configuration& cfg) {
  if (!is_b(cfg.pif[q])) return false;
  const NodeId o = other_neighbor(cfg.n, p, q);
  if (o < 0) return true;
  // Any broadcast on the other side rules p out as a leaf, not only one
  // naming p: otherwise p could answer a stale wave while a real one waits.
  if (is_b(cfg.pif[o])) return false;
  return pred_consumption(p, q, cfg) || out_free(cfg, p, o);
}

bool pred_init_pif(const Configuration& cfg) {
  return cfg.pif_request && is_c(cfg.pif[kP0]) && all_neighbors(kP0, cfg, is_c) &&
         no_generation_threat(kP0, -1, cfg);
}

bool pred_no_pif(NodeId p, const Configuration& cfg) {
  return is_c(cfg.pif[p]) && all_neighbors(p, cfg, f_or_c);
}

PifActionSet enabled_pif(NodeId p, const Configuration& cfg) {
  PifActionSet out;
  const PifState& s = cfg.pif[p];
  const Neighbors nb = neighbors(cfg.n, p);

  if (p == kP0) {
    if (pred_init_pif(cfg)) out.push_back({PifAction::kBInitiator});
    if (s.phase == PifPhase::kB && s.ptr == kPtrInit && feedback_to(p, -1, cfg)) {
      out.push_back({PifAction::kCInitiator});
    }
    // The initiator's only legitimate states are (C,?) and (B,INIT).
    if ((is_b(s) && s.ptr != kPtrInit) || is_f(s)) {
      out.push_back({PifAction::kCorrBC});
    }
    return out;
  }

  bool leaf_role = nb.count == 1;
  for (NodeId q : nb) leaf_role = leaf_role || pred_leaf(p, q, cfg);

  if (leaf_role) {
    if (is_c(s)) {
      for (NodeId q : nb) {
        if (pred_leaf(p, q, cfg)) out.push_back({PifAction::kFLeaf, q});
      }
    }
    if (is_f(s) && all_neighbors(p, cfg, f_or_c)) out.push_back({PifAction::kCLeaf});
  } else {
    if (is_c(s)) {
      NodeId parent = -1;
      int in_b = 0;
      bool others_c = true;
      for (NodeId q : nb) {
        if (is_b(cfg.pif[q])) {
          ++in_b;
          parent = q;
        }
      }
      for (NodeId q : nb) {
        if (q != parent && !is_c(cfg.pif[q])) others_c = false;
      }
      if (in_b == 1 && others_c && no_generation_threat(p, parent, cfg)) out.push_back({PifAction::kBInternal, parent});
    }
    if (is_b(s) && nb.contains(s.ptr) && is_b(cfg.pif[s.ptr]) &&
        feedback_to(p, s.ptr, cfg)) {
      out.push_back({PifAction::kFInternal, s.ptr});
    }
    if (is_f(s) && all_neighbors(p, cfg, f_or_c)) out.push_back({PifAction::kCInternal});
  }

  if (is_b(s)) {
    if (!nb.contains(s.ptr)) {
      out.push_back({PifAction::kCorrBC});
    } else if (!is_b(cfg.pif[s.ptr])) {
      out.push_back({PifAction::kCorrBC, s.ptr});
    } else if (pred_leaf(p, s.ptr, cfg)) {
      out.push_back({PifAction::kCorrLeaf, s.ptr});
    }
  }
  // A node answering q while another neighbor broadcasts took a stale
  // feedback step (e.g. in the very step the wave reached it).
  if (is_f(s)) {
    for (NodeId q : nb) {
      if (q != s.ptr && is_b(cfg.pif[q])) {
        out.push_back({PifAction::kCorrF, q});
        break;
      }
    }
  }
  return out;
}

std::optional<PifFiring> firing_pif(const PifActionSet& enabled) {
  if (enabled.empty()) return std::nullopt;
  return enabled[0];
}

void apply_pif_unchecked(NodeId p, const PifFiring& a, Configuration& next) {
  PifState& s = next.pif[p];
  switch (a.action) {
    case PifAction::kBInitiator:
      s = {PifPhase::kB, kPtrInit};
      next.pif_request = false;
      break;
    case PifAction::kCInitiator:
    case PifAction::kCLeaf:
    case PifAction::kCInternal:
    case PifAction::kCorrBC:
    case PifAction::kCorrF:
      s = {PifPhase::kC, kPtrNull};
      break;
    case PifAction::kFLeaf:
    case PifAction::kFInternal:
    case PifAction::kCorrLeaf:
      s = {PifPhase::kF, a.neighbor};
      break;
    case PifAction::kBInternal:
      s = {PifPhase::kB, a.neighbor};
      break;
  }
}

void apply_pif(NodeId p, const PifFiring& a, const Configuration& snapshot,
               Configuration& next) {
  const PifActionSet en = enabled_pif(p, snapshot);
  bool found = false;
  for (const PifFiring& e : en) found = found || e == a;
  if (!found) {
    throw ModelError("PIF action " + std::string(to_string(a.action)) +
                     " is not enabled at node " + std::to_string(p));
  }
  apply_pif_unchecked(p, a, next);
}

}  // namespace snapfwd
