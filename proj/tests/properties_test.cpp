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

// Invariants checked on every step of seeded runs.

#include <set>

#include "doctest.h"
#include "snapfwd/monitor.hpp"
#include "snapfwd/run.hpp"

using namespace snapfwd;

namespace {

int valid_messages(const Configuration& cfg) {
  std::set<GhostId> g;
  for (const Slot& s : cfg.slots) {
    if (s && s->ghost > 0) g.insert(s->ghost);
  }
  return static_cast<int>(g.size());
}

void check_run(const RunConfig& rc) {
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t invalid = 0;
  bool ok = true;
  const RunResult r = run(rc, [&](const Configuration& before, const StepReport& rep,
                                  const Configuration& after) {
    if (!ok) return;
    try {
      check_structure(after);
    } catch (const ModelError& e) {
      FAIL_CHECK("structure broken at step " << rep.step << ": " << e.what());
      ok = false;
    }
    if (auto bad = check_copies(after)) {
      FAIL_CHECK("step " << rep.step << ": " << *bad);
      ok = false;
    }
    generated += static_cast<std::int64_t>(rep.events.generations.size());
    for (const auto& d : rep.events.deliveries) (d.ghost > 0 ? delivered : invalid) += 1;
    // Valid messages are conserved: what was generated is delivered or
    // still somewhere in the chain.
    if (generated - delivered != valid_messages(after)) {
      FAIL_CHECK("step " << rep.step << ": " << generated - delivered << " valid expected, "
                         << valid_messages(after) << " held");
      ok = false;
    }
    // A step never touches a node that was not selected.
    for (NodeId p = 0; p < before.n; ++p) {
      bool sel = false;
      for (NodeId s : rep.selected) sel |= s == p;
      if (!sel) CHECK(after.pif[p] == before.pif[p]);
    }
  });
  CHECK(invalid <= 4 * rc.n - 3);
  CHECK(r.verdict.violations.size() == 0);
}

}  // namespace

TEST_CASE("invariants hold along seeded runs") {
  for (int n = 2; n <= 5; ++n) {
    for (Profile p : {Profile::kClean, Profile::kBuffersOnly, Profile::kPifOnly,
                      Profile::kRoutingOnly, Profile::kFull, Profile::kWorstCaseFullBuffers}) {
      for (Strategy s : {Strategy::kSync, Strategy::kRandomFair, Strategy::kAdversary}) {
        RunConfig rc;
        rc.n = n;
        rc.profile = p;
        rc.strategy = s;
        rc.seed = 1000 + static_cast<std::uint64_t>(n);
        rc.horizon = 4000;
        rc.t_stab = 10 * n;
        rc.monitor.bounds.b_prog = 1 << 20;  // progress is covered elsewhere
        CAPTURE(n);
        CAPTURE(to_string(p));
        CAPTURE(to_string(s));
        check_run(rc);
      }
    }
  }
}

TEST_CASE("permanently wrong tables still make progress") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    RunConfig rc;
    rc.n = 4;
    rc.profile = Profile::kRoutingOnly;
    rc.strategy = Strategy::kRandomFair;
    rc.seed = seed;
    rc.horizon = 5000;
    rc.t_stab.reset();
    rc.stop_on_fail = false;
    const RunResult r = run(rc);
    for (const Violation& v : r.verdict.violations) {
      CAPTURE(v.detail);
      CHECK(v.property != Property::kDuplication);
      CHECK(v.property != Property::kValidDeletion);
      CHECK(v.property != Property::kDeadlock);
    }
    CHECK(r.stats.delivered_valid > 0);
  }
}
