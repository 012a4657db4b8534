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

#include <set>

#include "doctest.h"
#include "snapfwd/daemon.hpp"
#include "snapfwd/explorer.hpp"
#include "snapfwd/faults.hpp"
#include "snapfwd/routing.hpp"
#include "snapfwd/run.hpp"

using namespace snapfwd;

TEST_CASE("the clean profile is a fresh chain") {
  for (int n = 2; n <= 6; ++n) CHECK(arbitrary_config(n, 123, Profile::kClean) == new_chain(n));
}

TEST_CASE("worst case fills every buffer with distinct stuck messages") {
  const int n = 4;
  const Configuration cfg = arbitrary_config(n, 5, Profile::kWorstCaseFullBuffers);
  int occupied = 0;
  std::set<GhostId> ghosts;
  for (int i = 0; i < slot_count(n); ++i) {
    REQUIRE(cfg.slots[i].has_value());
    ++occupied;
    ghosts.insert(cfg.slots[i]->ghost);
    CHECK(cfg.slots[i]->ghost < 0);
    for (int j = 0; j < i; ++j) CHECK_FALSE(guard_equal(cfg.slots[i], cfg.slots[j]));
    const BufferRef b = slot_ref(n, i);
    if (b.kind == BufferKind::kIn) CHECK(cfg.slots[i]->dest != b.owner);
  }
  CHECK(occupied == 13);
  CHECK(ghosts.size() == 13);
  CHECK(cfg.slots[ext_slot(n)].has_value());
}

TEST_CASE("worst case leaves only the road-change machinery at p0") {
  const int n = 4;
  Configuration cfg = arbitrary_config(n, 8, Profile::kWorstCaseFullBuffers);
  cfg.t_stab = 0;
  stabilizer_start(cfg);
  StepExecutor exec;
  exec.evaluate(cfg);
  for (NodeId p = 1; p < n; ++p) {
    CAPTURE(p);
    CHECK(exec.rules_enabled(p).empty());
  }
  bool road_change = false;
  for (const RuleFiring& r : exec.rules_enabled(0)) {
    road_change |= r.rule == Rule::kR7 || r.rule == Rule::kR12;
  }
  CHECK(road_change);
}

TEST_CASE("profiles are deterministic and well formed") {
  for (Profile p : {Profile::kClean, Profile::kBuffersOnly, Profile::kPifOnly, Profile::kRoutingOnly,
                    Profile::kFull, Profile::kWorstCaseFullBuffers}) {
    for (int n = 2; n <= 7; ++n) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Configuration a = arbitrary_config(n, seed, p);
        CHECK_NOTHROW(check_structure(a));
        CHECK(a == arbitrary_config(n, seed, p));
      }
    }
    CHECK(parse_profile(to_string(p)) == p);
  }
  CHECK(arbitrary_config(5, 1, Profile::kFull) != arbitrary_config(5, 2, Profile::kFull));
}

TEST_CASE("fewer than 4 colors are rejected") {
  FaultOptions o;
  o.color_count = 3;
  CHECK_THROWS_AS(arbitrary_config(3, 1, Profile::kFull, o), ModelError);
}

TEST_CASE("smallest chain explored exhaustively") {
  ExploreOptions o;
  o.full_subsets = true;
  o.payloads = 2;
  FaultOptions fo;
  fo.payloads = 2;
  const std::vector<Configuration> init = {arbitrary_config(2, 1, Profile::kClean, fo)};
  ExploreReport r = explore(init, o);
  CHECK(r.exhausted);
  CHECK(r.violations.empty());
  CHECK(r.states == 19);

  o.request_budget = 2;
  r = explore(init, o);
  CHECK(r.exhausted);
  CHECK(r.violations.empty());
  CHECK(r.states == 190);
}

TEST_CASE("a tiny budget is reported as such") {
  ExploreOptions o;
  o.state_budget = 50;
  FaultOptions fo;
  fo.payloads = 2;
  std::vector<Configuration> init;
  for (int s = 1; s <= 4; ++s) init.push_back(arbitrary_config(3, s, Profile::kFull, fo));
  const ExploreReport r = explore(init, o);
  CHECK_FALSE(r.exhausted);
  CHECK(r.budget_hit);
}

TEST_CASE("the explorer finds a planted bug") {
  ExploreOptions o;
  o.protocol.mutation = Mutation::kNoRecolor;
  o.request_budget = 2;
  FaultOptions fo;
  fo.payloads = 2;
  std::vector<Configuration> init;
  for (int s = 1; s <= 10; ++s) init.push_back(arbitrary_config(3, s, Profile::kWorstCaseFullBuffers, fo));
  const ExploreReport r = explore(init, o);
  CHECK_FALSE(r.violations.empty());
  if (!r.violations.empty()) CHECK_FALSE(r.violations[0].path.empty());
}

TEST_CASE("explorer steps agree with the simulator") {
  // Replays simulator runs through the explorer model: every step the
  // daemon took must be a successor with the same canonical state.
  for (Profile prof : {Profile::kFull, Profile::kWorstCaseFullBuffers}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      RunConfig rc;
      rc.n = 3;
      rc.profile = prof;
      rc.strategy = Strategy::kRandomFair;
      rc.seed = seed;
      rc.horizon = 300;
      rc.workload.rate = 0;
      rc.faults.payloads = 2;
      ExploreOptions o;
      o.full_subsets = true;
      o.request_budget = 0;
      ExplorerModel model(o);
      int checked = 0;
      run(rc, [&](const Configuration& before, const StepReport& rep, const Configuration& after) {
        if (rep.selected.empty()) return;
        ExploreState s;
        s.cfg = before;
        canonicalize(s.cfg);
        Configuration want = after;
        canonicalize(want);
        bool found = false;
        for (const auto& succ : model.expand(s)) {
          if (succ.move.kind == ExploreMove::Kind::kStep && succ.move.selected == rep.selected) {
            found = succ.state.cfg == want;
            break;
          }
        }
        CHECK(found);
        ++checked;
      });
      CHECK(checked > 0);
    }
  }
}
