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

#include "snapfwd/routing.hpp"

#include <string>

namespace snapfwd {

NodeId next_hop(NodeId p, NodeId d, const Configuration& cfg) {
  if (d == p) throw ModelError("next_hop: node " + std::to_string(p) + " routing to itself");
  return cfg.routing[p * cfg.n + d];
}

void repair_tables(Configuration& cfg) {
  const int n = cfg.n;
  for (NodeId p = 0; p < n; ++p) {
    for (NodeId d = 0; d < n; ++d) {
      cfg.routing[p * n + d] = d == p ? -1 : chain_direction(p, d);
    }
  }
}

bool tables_correct(const Configuration& cfg) {
  const int n = cfg.n;
  for (NodeId p = 0; p < n; ++p) {
    for (NodeId d = 0; d < n; ++d) {
      if (d != p && cfg.routing[p * n + d] != chain_direction(p, d)) return false;
    }
  }
  return true;
}

void stabilizer_tick(Configuration& cfg) {
  ++cfg.clock;
  if (cfg.t_stab && cfg.clock == *cfg.t_stab) repair_tables(cfg);
}

void stabilizer_start(Configuration& cfg) {
  if (routing_stabilized(cfg)) repair_tables(cfg);
}

}  // namespace snapfwd
