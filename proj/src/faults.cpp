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

#include "snapfwd/faults.hpp"

#include <array>
#include <random>
#include <string>

#include "snapfwd/routing.hpp"

namespace snapfwd {

namespace {

constexpr std::array<std::string_view, 6> kProfileNames = {
    "CLEAN", "BUFFERS_ONLY", "PIF_ONLY", "ROUTING_ONLY", "FULL", "WORST_CASE_FULL_BUFFERS"};

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  std::uint64_t below(std::uint64_t k) { return rng_() % k; }
  bool chance(int num, int den) { return below(den) < static_cast<std::uint64_t>(num); }

 private:
  std::mt19937_64 rng_;
};

Message random_message(Sampler& s, int n, const FaultOptions& o) {
  Message m;
  m.payload = static_cast<int>(s.below(o.payloads));
  m.dest = static_cast<NodeId>(s.below(n));
  m.color = static_cast<Color>(s.below(o.color_count));
  m.flipped = o.extension && s.chance(1, 2);
  return m;
}

void corrupt_buffers(Configuration& cfg, Sampler& s, const FaultOptions& o) {
  const int n = cfg.n;
  for (int i = 0; i < slot_count(n); ++i) {
    cfg.slots[i] = s.chance(1, 3) ? Slot{} : Slot{random_message(s, n, o)};
  }
  // Some output buffers already copied downstream.
  for (int i = 0; i + 1 < ext_slot(n); i += 2) {
    if (cfg.slots[i] && s.chance(1, 4)) cfg.slots[i + 1] = cfg.slots[i];
  }
  for (int i = 0; i < n; ++i) {
    if (s.chance(1, 2)) {
      NodeId d = static_cast<NodeId>(s.below(n - 1));
      if (d >= i) ++d;
      cfg.request[i] = Request{static_cast<int>(s.below(o.payloads)), d};
    }
  }
  cfg.pif_request = s.chance(1, 2);
  for (auto& fp : cfg.fair_ptr) fp = s.chance(1, 2) ? FairPointer::kGenerate : FairPointer::kTransmit;
}

void corrupt_pif(Configuration& cfg, Sampler& s) {
  for (NodeId p = 0; p < cfg.n; ++p) {
    const Neighbors nb = neighbors(cfg.n, p);
    cfg.pif[p].phase = static_cast<PifPhase>(s.below(3));
    const std::uint64_t k = s.below(nb.count + 2);
    cfg.pif[p].ptr = k < static_cast<std::uint64_t>(nb.count)
                         ? nb.ids[k]
                         : (k == static_cast<std::uint64_t>(nb.count) ? kPtrNull : kPtrInit);
  }
  cfg.pif_request = s.chance(1, 2);
}

void corrupt_routing(Configuration& cfg, Sampler& s) {
  const int n = cfg.n;
  for (NodeId p = 0; p < n; ++p) {
    const Neighbors nb = neighbors(n, p);
    for (NodeId d = 0; d < n; ++d) {
      if (d != p) cfg.routing[p * n + d] = nb.ids[s.below(nb.count)];
    }
  }
}

void fill_worst_case(Configuration& cfg, Sampler& s, const FaultOptions& o) {
  const int n = cfg.n;
  for (int attempt = 0;; ++attempt) {
    if (attempt > 100000) throw ModelError("cannot draw pairwise distinct messages");
    bool ok = true;
    for (int i = 0; i < slot_count(n) && ok; ++i) {
      const BufferRef b = slot_ref(n, i);
      Message m = random_message(s, n, o);
      if (b.kind == BufferKind::kIn) {
        // Never consumable in place.
        NodeId d = static_cast<NodeId>(s.below(n - 1));
        if (d >= b.owner) ++d;
        m.dest = d;
      }
      for (int j = 0; j < i && ok; ++j) ok = !guard_equal(*cfg.slots[j], m);
      cfg.slots[i] = m;
    }
    if (ok) break;
  }
  corrupt_routing(cfg, s);
}

}  // namespace

std::string_view to_string(Profile p) { return kProfileNames[static_cast<size_t>(p)]; }

std::optional<Profile> parse_profile(std::string_view s) {
  for (size_t i = 0; i < kProfileNames.size(); ++i) {
    if (kProfileNames[i] == s) return static_cast<Profile>(i);
  }
  return std::nullopt;
}

void assign_initial_ghosts(Configuration& cfg) {
  GhostId next = -1;
  const int n = cfg.n;
  for (int i = 0; i < slot_count(n); ++i) {
    if (!cfg.slots[i]) continue;
    const bool copy_of_prev = i != ext_slot(n) && i % 2 == 1 && is_out_slot(n, i - 1) &&
                              guard_equal(cfg.slots[i - 1], cfg.slots[i]);
    cfg.slots[i]->ghost = copy_of_prev ? cfg.slots[i - 1]->ghost : next--;
  }
}

Configuration arbitrary_config(int n, std::uint64_t seed, Profile profile,
                               const FaultOptions& opts) {
  if (opts.color_count < 4) throw ModelError("at least 4 colors are needed");
  if (opts.payloads < 1) throw ModelError("payload domain must be non-empty");
  Configuration cfg = new_chain(n);
  Sampler s(seed);
  switch (profile) {
    case Profile::kClean:
      break;
    case Profile::kBuffersOnly:
      corrupt_buffers(cfg, s, opts);
      break;
    case Profile::kPifOnly:
      corrupt_pif(cfg, s);
      break;
    case Profile::kRoutingOnly:
      corrupt_routing(cfg, s);
      break;
    case Profile::kFull:
      corrupt_buffers(cfg, s, opts);
      corrupt_pif(cfg, s);
      corrupt_routing(cfg, s);
      break;
    case Profile::kWorstCaseFullBuffers:
      fill_worst_case(cfg, s, opts);
      break;
  }
  assign_initial_ghosts(cfg);
  return cfg;
}

}  // namespace snapfwd
