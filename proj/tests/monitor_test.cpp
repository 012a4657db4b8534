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

#include "doctest.h"
#include "snapfwd/monitor.hpp"
#include "util.hpp"

using namespace snapfwd;
using snapfwd::test::msg;

namespace {

// Feeds hand-written steps to a monitor.
struct Harness {
  Configuration cfg;
  Monitor mon;
  std::int64_t step = 0;

  explicit Harness(Configuration c, MonitorOptions o = {}) : cfg(c), mon(cfg, o) {}

  void advance(const Configuration& next, const StepReport& rep_in) {
    StepReport rep = rep_in;
    rep.step = step++;
    mon.observe(cfg, rep, next);
    cfg = next;
  }
  void idle(int k) {
    for (int i = 0; i < k; ++i) advance(cfg, StepReport{});
  }
  bool violated(Property p) const {
    for (const Violation& v : mon.violations()) {
      if (v.property == p) return true;
    }
    return false;
  }
};

StepReport generation(NodeId node, GhostId g, NodeId dest) {
  StepReport r;
  r.events.generations.push_back({node, g, dest, false});
  return r;
}

StepReport delivery(NodeId node, GhostId g, NodeId dest) {
  StepReport r;
  r.events.deliveries.push_back({node, g, dest});
  return r;
}

}  // namespace

TEST_CASE("double delivery is a duplication") {
  Harness h(new_chain(3));
  Configuration c = h.cfg;
  c.slots[in_slot(1, 0)] = msg(0, 1, 0, 7);
  h.advance(c, generation(0, 7, 1));
  c.slots[in_slot(1, 0)].reset();
  h.advance(c, delivery(1, 7, 1));
  CHECK_FALSE(h.mon.failed());
  h.advance(c, delivery(1, 7, 1));
  CHECK(h.violated(Property::kDuplication));
}

TEST_CASE("initial deliveries beyond 4n-3 break the bound") {
  Harness h(new_chain(5));
  for (int i = 1; i <= 17; ++i) h.advance(h.cfg, delivery(1, -i, 1));
  CHECK_FALSE(h.violated(Property::kInvalidBound));
  h.advance(h.cfg, delivery(1, -18, 1));
  CHECK(h.violated(Property::kInvalidBound));
}

TEST_CASE("a valid message vanishing is a deletion") {
  Harness h(new_chain(3));
  Configuration c = h.cfg;
  c.slots[out_slot(0, 1)] = msg(0, 2, 0, 1);
  h.advance(c, generation(0, 1, 2));
  CHECK_FALSE(h.mon.failed());
  c.slots[out_slot(0, 1)].reset();
  h.advance(c, StepReport{});
  CHECK(h.violated(Property::kValidDeletion));
}

TEST_CASE("a valid message held twice is a duplication") {
  Harness h(new_chain(4));
  Configuration c = h.cfg;
  c.slots[out_slot(0, 1)] = msg(0, 3, 0, 1);
  h.advance(c, generation(0, 1, 3));
  c.slots[out_slot(2, 3)] = msg(0, 3, 1, 1);
  h.advance(c, StepReport{});
  CHECK(h.violated(Property::kDuplication));
  CHECK(check_copies(c).has_value());
}

TEST_CASE("a copy in flight is not a duplication") {
  Configuration c = new_chain(3);
  c.slots[out_slot(0, 1)] = msg(0, 2, 0, 1);
  c.slots[in_slot(1, 0)] = msg(0, 2, 0, 1);
  CHECK_FALSE(check_copies(c).has_value());
}

TEST_CASE("a request pending for 33n steps starves") {
  const int n = 5;
  Configuration c = new_chain(n);
  c.request[2] = Request{0, 4};
  Harness h(new_chain(n));
  StepReport inj;
  inj.injections.push_back({2, 0, 4});
  h.advance(c, inj);
  h.idle(32 * n - 2);
  CHECK_FALSE(h.violated(Property::kGenerationLiveness));
  h.idle(n + 2);
  h.mon.finish(h.cfg);
  CHECK(h.violated(Property::kGenerationLiveness));
}

TEST_CASE("EXT occupied for the whole run") {
  Configuration c = new_chain(3);
  c.slots[ext_slot(3)] = msg(0, 1, 0, -1);
  Harness h(c);
  h.idle(10000);
  const Verdict v = h.mon.finish(h.cfg);
  CHECK(v.status == Status::kFail);
  CHECK(h.violated(Property::kExtLiveness));
}

TEST_CASE("a quiet clean run passes") {
  Harness h(new_chain(4));
  h.idle(100);
  const Verdict v = h.mon.finish(h.cfg);
  CHECK(v.status == Status::kPass);
  CHECK(v.violations.empty());
}

TEST_CASE("an undelivered young message is inconclusive") {
  Harness h(new_chain(3));
  Configuration c = h.cfg;
  c.slots[out_slot(0, 1)] = msg(0, 2, 0, 1);
  h.advance(c, generation(0, 1, 2));
  h.idle(5);
  const Verdict v = h.mon.finish(h.cfg);
  CHECK(v.status == Status::kInconclusive);
  CHECK_FALSE(v.pending.empty());
}

TEST_CASE("waves alternate at p0") {
  Harness h(new_chain(3));
  StepReport b;
  FiredAction fa;
  fa.node = 0;
  fa.is_pif = true;
  fa.pif = PifAction::kBInitiator;
  b.fired.push_back(fa);
  Configuration c = h.cfg;
  c.pif[0] = PifState{PifPhase::kB, kPtrInit};
  h.advance(c, b);
  CHECK_FALSE(h.mon.failed());
  h.advance(c, b);
  CHECK(h.violated(Property::kWaveAlternation));
}

TEST_CASE("steps must arrive in order") {
  Configuration c = new_chain(3);
  Monitor m(c);
  StepReport r;
  r.step = 4;
  m.observe(c, r, c);
  CHECK_THROWS_AS(m.observe(c, r, c), ModelError);
}

TEST_CASE("property names round-trip") {
  for (int i = 0; i < kPropertyCount; ++i) {
    const auto p = static_cast<Property>(i);
    CHECK(parse_property(to_string(p)) == p);
  }
  CHECK(exit_code(Status::kPass) == 0);
  CHECK(exit_code(Status::kFail) == 1);
  CHECK(exit_code(Status::kInconclusive) == 2);
}
