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

#ifndef SNAPFWD_TESTS_UTIL_HPP_
#define SNAPFWD_TESTS_UTIL_HPP_

#include "snapfwd/chain.hpp"

namespace snapfwd::test {

inline Message msg(int payload, NodeId dest, Color color, GhostId ghost = -1) {
  Message m;
  m.payload = payload;
  m.dest = dest;
  m.color = color;
  m.ghost = ghost;
  return m;
}

inline int out_of(NodeId p, NodeId q) { return out_slot(p, q); }
inline int in_of(NodeId p, NodeId q) { return in_slot(p, q); }

}  // namespace snapfwd::test

#endif  // SNAPFWD_TESTS_UTIL_HPP_
