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

#ifndef SNAPFWD_CHAIN_HPP_
#define SNAPFWD_CHAIN_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace snapfwd {

using NodeId = int;
using Color = int;
using GhostId = std::int64_t;

/// The designated extremity holding the extra buffer and initiating waves.
inline constexpr NodeId kP0 = 0;
inline constexpr int kDefaultColorCount = 4;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * A message (payload, destination, color).
 *
 * `ghost` is a simulation-only identity used by the monitor; it never takes
 * part in guard evaluation. Valid (generated) messages carry positive ghost
 * ids, messages present in the initial configuration carry negative ones.
 * `flipped` is only meaningful in the dynamic extension mode.
 */
struct Message {
  int payload = 0;
  NodeId dest = 0;
  Color color = 0;
  GhostId ghost = 0;
  bool flipped = false;

  // Full equality, ghost included; guards use guard_equal.
  friend bool operator==(const Message&, const Message&) = default;
};

/// Equality as seen by the protocol: ghost ids are invisible.
inline bool guard_equal(const Message& a, const Message& b) {
  return a.payload == b.payload && a.dest == b.dest && a.color == b.color &&
         a.flipped == b.flipped;
}

using Slot = std::optional<Message>;

inline bool guard_equal(const Slot& a, const Slot& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || guard_equal(*a, *b);
}

enum class BufferKind : std::uint8_t { kIn, kOut, kExt };

/// Names a buffer: IN_owner(link), OUT_owner(link) or EXT_owner.
struct BufferRef {
  NodeId owner = 0;
  BufferKind kind = BufferKind::kIn;
  NodeId link = -1;  // -1 for EXT

  friend bool operator==(const BufferRef&, const BufferRef&) = default;
};

std::string to_string(const BufferRef& ref);

enum class PifPhase : std::uint8_t { kB, kF, kC };

inline constexpr NodeId kPtrInit = -1;  // initiator sentinel
inline constexpr NodeId kPtrNull = -2;

struct PifState {
  PifPhase phase = PifPhase::kC;
  NodeId ptr = kPtrNull;

  friend bool operator==(const PifState&, const PifState&) = default;
};

/// Which of generation / internal transmission an output buffer serves next.
enum class FairPointer : std::uint8_t { kGenerate, kTransmit };

/// A pending application request: Request_p is raised with the message to
/// generate.
struct Request {
  int payload = 0;
  NodeId dest = 0;

  friend bool operator==(const Request&, const Request&) = default;
};

/// The two directed buffer chains. C1 flows away from p0, C2 towards it.
enum class ChainDir : std::uint8_t { kC1, kC2, kNone };

/**
 * Global state of a chain of `n` processors.
 *
 * Slots are laid out per link k = (k, k+1):
 *   4k+0: OUT_k(k+1)   4k+1: IN_{k+1}(k)   (C1)
 *   4k+2: OUT_{k+1}(k) 4k+3: IN_k(k+1)     (C2)
 * followed by EXT_0 at index 4(n-1), for 4n-3 slots in total.
 */
struct Configuration {
  int n = 0;
  std::vector<Slot> slots;
  std::vector<PifState> pif;
  std::vector<NodeId> routing;  // routing[p * n + d]; diagonal unused (-1)
  std::vector<std::optional<Request>> request;
  bool pif_request = false;
  std::vector<FairPointer> fair_ptr;  // indexed by slot; used for OUT slots
  std::int64_t clock = 0;
  std::optional<std::int64_t> t_stab;  // nullopt: never stabilizes
  GhostId next_ghost = 1;
  std::optional<NodeId> departing;  // dynamics: node draining before leave

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

// --- topology -------------------------------------------------------------

struct Neighbors {
  std::array<NodeId, 2> ids{};
  int count = 0;

  const NodeId* begin() const { return ids.data(); }
  const NodeId* end() const { return ids.data() + count; }
  bool contains(NodeId q) const {
    for (NodeId x : *this) {
      if (x == q) return true;
    }
    return false;
  }
};

inline Neighbors neighbors(int n, NodeId p) {
  Neighbors nb;
  if (p > 0) nb.ids[nb.count++] = p - 1;
  if (p + 1 < n) nb.ids[nb.count++] = p + 1;
  return nb;
}

/// The neighbor of p other than q, or -1 when p is an extremity.
inline NodeId other_neighbor(int n, NodeId p, NodeId q) {
  NodeId o = (q == p - 1) ? p + 1 : p - 1;
  return (o >= 0 && o < n) ? o : -1;
}

inline int slot_count(int n) { return 4 * n - 3; }
inline int ext_slot(int n) { return 4 * (n - 1); }

inline int out_slot(NodeId p, NodeId q) {
  return q == p + 1 ? 4 * p : 4 * (p - 1) + 2;
}
inline int in_slot(NodeId p, NodeId q) {
  return q == p + 1 ? 4 * p + 3 : 4 * (p - 1) + 1;
}

BufferRef slot_ref(int n, int index);
int slot_index(int n, const BufferRef& ref);

inline bool is_out_slot(int n, int index) {
  return index != ext_slot(n) && (index % 4 == 0 || index % 4 == 2);
}

inline ChainDir chain_of(int n, int index) {
  if (index == ext_slot(n)) return ChainDir::kNone;
  return (index % 4) < 2 ? ChainDir::kC1 : ChainDir::kC2;
}

/// True iff a message for `dest` sitting in slot `index` is on the directed
/// chain leading to its destination. Both C1 slots of link k lead to nodes
/// above k, both C2 slots to nodes up to k; EXT leads nowhere.
inline bool is_suitable(int n, int index, NodeId dest) {
  if (index == ext_slot(n)) return false;
  const int k = index / 4;
  return (index % 4) < 2 ? dest > k : dest <= k;
}

// --- construction / queries -------------------------------------------------

/// Clean configuration: empty buffers, quiescent wave, correct routing.
Configuration new_chain(int n);

/// Correct next hop on a chain (direction of d).
inline NodeId chain_direction(NodeId p, NodeId d) {
  return d < p ? p - 1 : p + 1;
}

/**
 * Successor of `b` in the buffer graph; nullopt for an input buffer at an
 * extremity (the end of C1 or C2). Throws ModelError for EXT.
 */
std::optional<BufferRef> buffer_graph_next(const BufferRef& b, int n);

/// A buffer is free when empty, or when it is an output buffer whose content
/// has already been copied into the input buffer that follows it.
bool is_free(const Configuration& cfg, int index);

inline bool out_free(const Configuration& cfg, NodeId p, NodeId q) {
  const Slot& out = cfg.slots[out_slot(p, q)];
  return !out || guard_equal(out, cfg.slots[in_slot(q, p)]);
}

/// Checks the structural invariants (slot count, vector sizes, pointer
/// domains, routing entries are neighbors). Throws ModelError on mismatch.
void check_structure(const Configuration& cfg);

/// Compact one-line rendering of buffers and wave states, for diagnostics.
std::string describe(const Configuration& cfg);

/// 64-bit FNV-1a over every field (including ghost ids).
std::uint64_t config_hash(const Configuration& cfg);

}  // namespace snapfwd

#endif  // SNAPFWD_CHAIN_HPP_
