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

#include <algorithm>

#include "doctest.h"
#include "snapfwd/dynamics.hpp"
#include "snapfwd/forwarding.hpp"
#include "snapfwd/routing.hpp"
#include "snapfwd/run.hpp"
#include "util.hpp"

using namespace snapfwd;
using snapfwd::test::msg;

TEST_CASE("an empty far end leaves at once") {
  Configuration cfg = new_chain(4);
  begin_leave(cfg, 3);
  CHECK(can_detach(cfg));
  detach(cfg, 0);
  CHECK(cfg.n == 3);
  CHECK_NOTHROW(check_structure(cfg));
  CHECK(tables_correct(cfg));
}

TEST_CASE("a far end holding messages drains first") {
  Configuration cfg = new_chain(4);
  cfg.slots[in_slot(3, 2)] = msg(0, 1, 0);
  begin_leave(cfg, 3);
  CHECK_FALSE(can_detach(cfg));
  CHECK_THROWS_AS(detach(cfg, 0), ModelError);
}

TEST_CASE("interior nodes and p0 cannot leave") {
  Configuration cfg = new_chain(4);
  CHECK_THROWS_AS(begin_leave(cfg, 1), ModelError);
  CHECK_THROWS_AS(begin_leave(cfg, 0), ModelError);
  Configuration two = new_chain(2);
  CHECK_THROWS_AS(begin_leave(two, 1), ModelError);
}

TEST_CASE("a leave cancels requests for the departing node") {
  Configuration cfg = new_chain(4);
  cfg.request[0] = Request{1, 3};
  cfg.request[1] = Request{1, 2};
  begin_leave(cfg, 3);
  CHECK_FALSE(cfg.request[0].has_value());
  CHECK(cfg.request[1].has_value());
}

TEST_CASE("joining on the right adds an empty node") {
  Configuration cfg = new_chain(3);
  join(cfg, JoinSide::kRight, 0);
  CHECK(cfg.n == 4);
  CHECK(cfg.slots.size() == static_cast<size_t>(slot_count(4)));
  for (int k = 8; k < 12; ++k) CHECK_FALSE(cfg.slots[k].has_value());
  CHECK_NOTHROW(check_structure(cfg));
}

TEST_CASE("left joins are off unless enabled") {
  RunConfig rc;
  rc.protocol.extension = true;
  TopologyChange c;
  c.side = JoinSide::kLeft;
  rc.dynamics.events.push_back(c);
  CHECK_THROWS_AS(validate(rc), std::invalid_argument);
  rc.dynamics.allow_left_join = true;
  CHECK_NOTHROW(validate(rc));
}

TEST_CASE("topology changes need extension mode") {
  RunConfig rc;
  TopologyChange c;
  rc.dynamics.events.push_back(c);
  CHECK_THROWS_AS(validate(rc), std::invalid_argument);
}

TEST_CASE("first wrong-extremity visit flips, the second deletes") {
  ProtocolOptions ext;
  ext.extension = true;
  Configuration cfg = new_chain(3);
  cfg.slots[in_slot(2, 1)] = msg(1, 0, 0);
  Configuration next = cfg;
  RuleEvents ev;
  apply_rule(2, RuleFiring{Rule::kR11, 1}, cfg, next, ext, ev);
  REQUIRE(next.slots[out_slot(2, 1)].has_value());
  CHECK(next.slots[out_slot(2, 1)]->flipped);

  Configuration at_p0 = new_chain(3);
  Message m = msg(1, 2, 0, 4);
  m.flipped = true;
  at_p0.slots[in_slot(0, 1)] = m;
  const RuleSet r = enabled_rules(0, at_p0, ext);
  const bool del = std::any_of(r.begin(), r.end(),
                               [](const RuleFiring& f) { return f.rule == Rule::kFlipDelete; });
  CHECK(del);
  next = at_p0;
  ev.clear();
  apply_rule(0, RuleFiring{Rule::kFlipDelete, 1}, at_p0, next, ext, ev);
  CHECK_FALSE(next.slots[in_slot(0, 1)].has_value());
  REQUIRE(ev.deletions.size() == 1);
  CHECK(ev.deletions[0].ghost == 4);
}

TEST_CASE("traffic to a joined node is served") {
  RunConfig rc;
  rc.n = 3;
  rc.strategy = Strategy::kRandomFair;
  rc.protocol.extension = true;
  rc.horizon = 20000;
  rc.t_stab = 30;
  TopologyChange j;
  j.step = 100;
  rc.dynamics.events.push_back(j);
  rc.workload.dests = {3};
  bool joined = false;
  const RunResult r = run(rc, [&](const Configuration&, const StepReport& rep, const Configuration&) {
    for (const TopologyEvent& ev : rep.topology) joined |= ev.op == TopologyOp::kJoinRight;
  });
  CHECK(joined);
  CHECK(r.final_cfg.n == 4);
  CHECK(r.verdict.status == Status::kPass);
  CHECK(r.stats.generated > 100);
  CHECK(r.stats.delivered_valid == r.stats.generated);
}

TEST_CASE("leave and join scenario keeps every message") {
  for (Strategy s : {Strategy::kSync, Strategy::kRandomFair, Strategy::kAdversary}) {
    RunConfig rc;
    rc.n = 5;
    rc.profile = Profile::kFull;
    rc.strategy = s;
    rc.seed = 3;
    rc.protocol.extension = true;
    rc.faults.extension = true;
    rc.horizon = 10000;
    rc.t_stab = 50;
    rc.stop_on_fail = false;
    for (int k = 0; k < 4; ++k) {
      TopologyChange c;
      c.step = 1000 + 1000 * k;
      c.leave = k % 2 == 0;
      rc.dynamics.events.push_back(c);
    }
    const RunResult r = run(rc);
    CAPTURE(to_string(s));
    for (const Violation& v : r.verdict.violations) {
      CHECK(v.property != Property::kDuplication);
      CHECK(v.property != Property::kValidDeletion);
    }
    CHECK(r.final_cfg.n == 5);
  }
}
