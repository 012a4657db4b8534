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

#ifndef SNAPFWD_ROUTING_HPP_
#define SNAPFWD_ROUTING_HPP_

#include "snapfwd/chain.hpp"

namespace snapfwd {

/// Next_p(d): the table entry of p for destination d. Rejects d == p.
NodeId next_hop(NodeId p, NodeId d, const Configuration& cfg);

/// Overwrites every table with direction-correct chain routing.
void repair_tables(Configuration& cfg);

bool tables_correct(const Configuration& cfg);

/**
 * Stand-in for the concurrent self-stabilizing routing protocol: advances
 * the clock and, when it reaches t_stab, repairs every table. Tables are
 * left untouched before that.
 */
void stabilizer_tick(Configuration& cfg);

/// Repairs the tables right away if t_stab is already due; for callers
/// that (re)set t_stab.
void stabilizer_start(Configuration& cfg);

inline bool routing_stabilized(const Configuration& cfg) {
  return cfg.t_stab.has_value() && cfg.clock >= *cfg.t_stab;
}

}  // namespace snapfwd

#endif  // SNAPFWD_ROUTING_HPP_
