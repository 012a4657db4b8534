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
#include "snapfwd/chain.hpp"
#include "snapfwd/daemon.hpp"
#include "snapfwd/forwarding.hpp"
#include "snapfwd/pif.hpp"
#include "util.hpp"

using namespace snapfwd;
using snapfwd::test::msg;

namespace {

bool has_rule(const RuleSet& s, Rule r) {
  return std::any_of(s.begin(), s.end(), [&](const RuleFiring& f) { return f.rule == r; });
}

}  // namespace

TEST_CASE("consumption") {
  Configuration cfg = new_chain(3);
  cfg.slots[in_slot(1, 0)] = msg(7, 1, 2);
  CHECK(pred_consumption(1, 0, cfg));
  cfg.slots[out_slot(0, 1)] = msg(7, 1, 2);  // still the copy of the sender's buffer
  CHECK_FALSE(pred_consumption(1, 0, cfg));
  cfg.slots[out_slot(0, 1)].reset();
  cfg.slots[in_slot(1, 0)] = msg(7, 2, 2);
  CHECK_FALSE(pred_consumption(1, 0, cfg));
}

TEST_CASE("no-pif and synchro") {
  Configuration cfg = new_chain(3);
  for (NodeId p = 0; p < 3; ++p) CHECK(pred_no_pif(p, cfg));

  cfg.pif[1] = PifState{PifPhase::kF, 0};
  CHECK_FALSE(pred_no_pif(1, cfg));
  CHECK_FALSE(pred_pif_synchro(0, cfg, firing_pif(enabled_pif(1, cfg))));

  cfg = new_chain(3);
  cfg.pif[0] = PifState{PifPhase::kB, kPtrInit};
  cfg.slots[out_slot(1, 2)] = msg(0, 2, 0);  // no free way out: 1 relays
  const auto f = firing_pif(enabled_pif(1, cfg));
  REQUIRE(f.has_value());
  CHECK(f->action == PifAction::kBInternal);
  CHECK(pred_pif_synchro(0, cfg, f));
  CHECK_FALSE(pred_no_pif(1, cfg));
}

TEST_CASE("choice picks the smallest color unused around the target") {
  ProtocolOptions opts;
  Configuration cfg = new_chain(4);
  const int target = out_slot(1, 2);
  CHECK(choice_color(target, std::nullopt, cfg, opts) == 0);
  cfg.slots[in_slot(1, 0)] = msg(0, 3, 0);
  cfg.slots[in_slot(1, 2)] = msg(0, 0, 1);
  CHECK(choice_color(target, std::nullopt, cfg, opts) == 2);
  cfg.slots[in_slot(2, 1)] = msg(5, 3, 2);
  CHECK(choice_color(target, std::nullopt, cfg, opts) == 3);
}

TEST_CASE("consumption is enabled at an internal node") {
  Configuration cfg = new_chain(4);
  cfg.slots[in_slot(2, 1)] = msg(1, 2, 0);
  CHECK(has_rule(enabled_rules(2, cfg), Rule::kR2));
}

TEST_CASE("EXT outside a wave is cleared by R12") {
  Configuration cfg = new_chain(3);
  cfg.slots[ext_slot(3)] = msg(1, 2, 1);
  CHECK(has_rule(enabled_rules(0, cfg), Rule::kR12));
  cfg.pif[0] = PifState{PifPhase::kB, kPtrInit};
  CHECK_FALSE(has_rule(enabled_rules(0, cfg), Rule::kR12));
}

TEST_CASE("blocked road change at p0 raises a PIF request") {
  Configuration cfg = new_chain(3);
  cfg.slots[in_slot(0, 1)] = msg(1, 2, 0);          // turning around at p0
  cfg.slots[out_slot(0, 1)] = msg(2, 1, 1);         // busy, not copied yet
  const RuleSet r = enabled_rules(0, cfg);
  REQUIRE(r.size() == 1);
  CHECK(r[0].rule == Rule::kR7);
}

TEST_CASE("R8 moves the blocked message into EXT with B_INITIATOR") {
  Configuration cfg = new_chain(3);
  cfg.slots[in_slot(0, 1)] = msg(1, 2, 0, -1);
  cfg.slots[out_slot(0, 1)] = msg(2, 1, 1, -2);
  cfg.slots[out_slot(1, 0)] = msg(3, 0, 2, -3);  // refills IN_0(1)
  cfg.pif_request = true;
  StepExecutor exec;
  exec.evaluate(cfg);
  REQUIRE(exec.is_enabled(0));
  CHECK(has_rule(exec.rules_enabled(0), Rule::kR8));
  Configuration next;
  StepReport rep;
  exec.fire(cfg, {0}, next, rep);
  CHECK(next.pif[0] == PifState{PifPhase::kB, kPtrInit});
  CHECK_FALSE(next.pif_request);
  REQUIRE(next.slots[ext_slot(3)].has_value());
  CHECK(next.slots[ext_slot(3)]->ghost == -1);
  REQUIRE(next.slots[in_slot(0, 1)].has_value());
  CHECK(guard_equal(*next.slots[in_slot(0, 1)], *cfg.slots[out_slot(1, 0)]));
}

TEST_CASE("generation and transmission share an output buffer by fair pointer") {
  Configuration cfg = new_chain(3);
  std::vector<FairPointer> ptr(slot_count(3), FairPointer::kGenerate);
  RuleSet enabled;
  enabled.push_back({Rule::kR1, 2});
  enabled.push_back({Rule::kR3, 0});  // IN_1(0) into OUT_1(2)
  RuleSet chosen = select_rules(1, enabled, cfg, ptr);
  REQUIRE(chosen.size() == 1);
  CHECK(chosen[0].rule == Rule::kR1);
  CHECK(ptr[out_slot(1, 2)] == FairPointer::kTransmit);
  chosen = select_rules(1, enabled, cfg, ptr);
  REQUIRE(chosen.size() == 1);
  CHECK(chosen[0].rule == Rule::kR3);
  CHECK(ptr[out_slot(1, 2)] == FairPointer::kGenerate);
}

TEST_CASE("consumption wins an input buffer by priority") {
  Configuration cfg = new_chain(3);
  std::vector<FairPointer> ptr(slot_count(3), FairPointer::kGenerate);
  RuleSet enabled;
  enabled.push_back({Rule::kR3, 0});
  enabled.push_back({Rule::kR2, 0});
  const RuleSet chosen = select_rules(1, enabled, cfg, ptr);
  REQUIRE(chosen.size() == 1);
  CHECK(chosen[0].rule == Rule::kR2);
}

TEST_CASE("a lone rule is selected as is") {
  Configuration cfg = new_chain(3);
  std::vector<FairPointer> ptr(slot_count(3), FairPointer::kGenerate);
  RuleSet enabled;
  enabled.push_back({Rule::kR7, 1});
  const RuleSet chosen = select_rules(0, enabled, cfg, ptr);
  REQUIRE(chosen.size() == 1);
  CHECK(chosen[0].rule == Rule::kR7);
}

TEST_CASE("delivery empties the input buffer") {
  Configuration cfg = new_chain(3);
  cfg.slots[in_slot(2, 1)] = msg(1, 2, 0, 5);
  Configuration next = cfg;
  RuleEvents ev;
  apply_rule(2, RuleFiring{Rule::kR2, 1}, cfg, next, {}, ev);
  CHECK_FALSE(next.slots[in_slot(2, 1)].has_value());
  REQUIRE(ev.deliveries.size() == 1);
  CHECK(ev.deliveries[0].ghost == 5);
  CHECK(ev.deliveries[0].node == 2);
}

TEST_CASE("generation writes a fresh valid ghost") {
  Configuration cfg = new_chain(3);
  cfg.request[0] = Request{3, 2};
  const RuleSet r = enabled_rules(0, cfg);
  REQUIRE(has_rule(r, Rule::kR1));
  Configuration next = cfg;
  RuleEvents ev;
  apply_rule(0, RuleFiring{Rule::kR1, 1}, cfg, next, {}, ev);
  REQUIRE(next.slots[out_slot(0, 1)].has_value());
  const Message& m = *next.slots[out_slot(0, 1)];
  CHECK(m.payload == 3);
  CHECK(m.dest == 2);
  CHECK(m.ghost > 0);
  CHECK_FALSE(next.request[0].has_value());
  REQUIRE(ev.generations.size() == 1);
  CHECK(ev.generations[0].ghost == m.ghost);
}

TEST_CASE("the far end turns a message around") {
  Configuration cfg = new_chain(3);
  cfg.slots[in_slot(2, 1)] = msg(1, 0, 0);
  const RuleSet r = enabled_rules(2, cfg);
  REQUIRE(has_rule(r, Rule::kR11));
  Configuration next = cfg;
  RuleEvents ev;
  apply_rule(2, RuleFiring{Rule::kR11, 1}, cfg, next, {}, ev);
  CHECK_FALSE(next.slots[in_slot(2, 1)].has_value());
  REQUIRE(next.slots[out_slot(2, 1)].has_value());
  CHECK(next.slots[out_slot(2, 1)]->dest == 0);
}

TEST_CASE("applying a disabled rule is rejected") {
  Configuration cfg = new_chain(3);
  Configuration next = cfg;
  RuleEvents ev;
  CHECK_THROWS_AS(apply_rule(1, RuleFiring{Rule::kR2, 0}, cfg, next, {}, ev), ModelError);
}

TEST_CASE("write sets") {
  const auto w = write_set(1, RuleFiring{Rule::kR3, 0}, 3);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == out_slot(1, 2));
  CHECK(w[1] == in_slot(1, 0));
  CHECK(write_set(0, RuleFiring{Rule::kR7, 1}, 3)[0] == kWritePifRequest);
}
