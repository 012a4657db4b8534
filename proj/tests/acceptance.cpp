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

// Acceptance gate: one PASS/FAIL line per criterion.
//
//   snapfwd_acceptance            all criteria
//   snapfwd_acceptance 2 6 8      a subset
//
// SNAPFWD_ACCEPT_SCALE (0, 1] shrinks the seed counts for quick local
// checks; the value is printed and a scaled run never counts as the gate.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "snapfwd/campaign.hpp"
#include "snapfwd/explorer.hpp"
#include "snapfwd/faults.hpp"
#include "snapfwd/run.hpp"

using namespace snapfwd;

namespace {

double g_scale = 1.0;
int g_workers = 1;

int scaled(int count) {
  return std::max(1, static_cast<int>(std::lround(count * g_scale)));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::int64_t violating(const CampaignSummary& s, Property p) {
  return s.runs_violating[static_cast<int>(p)];
}

void add_into(CampaignSummary& into, const CampaignSummary& s) {
  into.runs += s.runs;
  into.passed += s.passed;
  into.failed += s.failed;
  into.inconclusive += s.inconclusive;
  into.steps += s.steps;
  for (int p = 0; p < kPropertyCount; ++p) into.runs_violating[p] += s.runs_violating[p];
  MonitorStats& w = into.worst;
  w.generated += s.worst.generated;
  w.delivered_valid += s.worst.delivered_valid;
  w.delivered_invalid += s.worst.delivered_invalid;
  w.deleted_invalid += s.worst.deleted_invalid;
  w.sanctioned_deletions += s.worst.sanctioned_deletions;
  w.waves += s.worst.waves;
  w.route_changes += s.worst.route_changes;
  w.max_generation_wait = std::max(w.max_generation_wait, s.worst.max_generation_wait);
  w.max_delivery_latency = std::max(w.max_delivery_latency, s.worst.max_delivery_latency);
  w.max_ext_stretch = std::max(w.max_ext_stretch, s.worst.max_ext_stretch);
  w.max_wave_length = std::max(w.max_wave_length, s.worst.max_wave_length);
  w.max_parked = std::max(w.max_parked, s.worst.max_parked);
  for (const auto& [n, v] : s.max_invalid_deliveries) {
    into.max_invalid_deliveries[n] = std::max(into.max_invalid_deliveries[n], v);
  }
  for (const RunOutcome& o : s.failures) {
    if (into.failures.size() < 64) into.failures.push_back(o);
  }
}

std::string where(const RunOutcome& o) {
  std::ostringstream os;
  os << "n=" << o.config.n << ' ' << to_string(o.config.profile) << ' '
     << to_string(o.config.strategy) << " seed " << o.config.seed;
  return os.str();
}

/// First failing run that violated one of `props`, for the report line.
std::string first_witness(const CampaignSummary& s, const std::vector<Property>& props) {
  for (const RunOutcome& o : s.failures) {
    for (const Violation& v : o.verdict.violations) {
      if (std::find(props.begin(), props.end(), v.property) != props.end()) {
        return "; first: " + std::string(to_string(v.property)) + " at " + where(o) + " step " +
               std::to_string(v.step) + " (" + v.detail + ")";
      }
    }
  }
  return "";
}

struct Line {
  bool pass = false;
  std::string detail;
};

// --- the main campaign: n = 3..6, FULL and WORST_CASE, three daemons ---------

constexpr std::int64_t kHorizon = 100'000;

CampaignSpec main_spec(int n, int seeds) {
  CampaignSpec spec;
  spec.sizes = {n};
  spec.profiles = {Profile::kFull, Profile::kWorstCaseFullBuffers};
  spec.strategies = {Strategy::kSync, Strategy::kRandomFair, Strategy::kAdversary};
  spec.runs = seeds;
  spec.base_seed = 1;
  spec.base.horizon = kHorizon;
  spec.base.t_stab = 10 * n;
  spec.base.stop_on_fail = false;
  return spec;
}

CampaignSummary g_main;
bool g_main_done = false;

const CampaignSummary& main_campaign() {
  if (g_main_done) return g_main;
  const int seeds = scaled(1000);
  for (int n = 3; n <= 6; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    const CampaignSummary s = run_campaign(main_spec(n, seeds), g_workers);
    std::fprintf(stderr, "  main campaign n=%d: %lld runs, %lld steps, %.0fs\n", n,
                 static_cast<long long>(s.runs), static_cast<long long>(s.steps), seconds_since(t0));
    add_into(g_main, s);
  }
  g_main_done = true;
  return g_main;
}

Line check_props(const CampaignSummary& s, const std::vector<Property>& props) {
  Line l;
  l.pass = true;
  std::ostringstream os;
  os << s.runs << " runs, " << s.steps << " steps;";
  for (Property p : props) {
    const std::int64_t k = violating(s, p);
    if (k != 0) l.pass = false;
    os << ' ' << to_string(p) << ' ' << k;
  }
  l.detail = os.str() + first_witness(s, props);
  return l;
}

Line criterion1() {
  const CampaignSummary& s = main_campaign();
  Line l = check_props(s, {Property::kDuplication, Property::kValidDeletion,
                           Property::kDeliveryLiveness});
  const MonitorStats& w = s.worst;
  if (w.generated != w.delivered_valid) l.pass = false;
  l.detail += "; generated " + std::to_string(w.generated) + ", delivered " +
              std::to_string(w.delivered_valid) + ", worst latency " +
              std::to_string(w.max_delivery_latency) + " (L_del = 64n)";
  return l;
}

Line criterion2() {
  const CampaignSummary& s = main_campaign();
  Line l = check_props(s, {Property::kInvalidBound});
  std::ostringstream os;
  os << "; max initial deliveries per run:";
  for (const auto& [n, v] : s.max_invalid_deliveries) {
    os << " n=" << n << ' ' << v << "/" << 4 * n - 3;
    if (v > 4 * n - 3) l.pass = false;
  }
  l.detail += os.str();
  return l;
}

Line criterion3() {
  const CampaignSummary& s = main_campaign();
  Line l = check_props(s, {Property::kGenerationLiveness});
  l.detail += "; worst wait " + std::to_string(s.worst.max_generation_wait) + " (L_gen = 32n)";
  return l;
}

Line criterion4() {
  const CampaignSummary& s = main_campaign();
  Line l = check_props(s, {Property::kExtLiveness, Property::kWavePost});
  l.detail += "; longest EXT occupancy " + std::to_string(s.worst.max_ext_stretch) +
              " (L_ext = 32n)";
  return l;
}

Line criterion5() {
  const CampaignSummary& s = main_campaign();
  Line l = check_props(s, {Property::kRouteChange, Property::kSuitability});
  l.detail += "; t_stab = 10n, " + std::to_string(s.worst.route_changes) + " route changes";
  return l;
}

// --- explorer ----------------------------------------------------------------

Line criterion6() {
  struct Case {
    const char* name;
    int n;
    Profile profile;
    int seeds;
    int requests;
    bool full;
  };
  const Case cases[] = {
      {"n=2 full CLEAN", 2, Profile::kClean, 1, 2, true},
      {"n=2 full WORST", 2, Profile::kWorstCaseFullBuffers, 200, 2, true},
      {"n=2 full FULL", 2, Profile::kFull, 200, 2, true},
      {"n=3 CLEAN", 3, Profile::kClean, 1, 4, false},
      {"n=3 WORST", 3, Profile::kWorstCaseFullBuffers, 50, 1, false},
  };
  Line l;
  l.pass = true;
  std::ostringstream os;
  for (const Case& c : cases) {
    ExploreOptions o;
    o.full_subsets = c.full;
    o.request_budget = c.requests;
    o.payloads = 2;
    o.protocol.color_count = 4;
    o.state_budget = 20'000'000;
    FaultOptions fo;
    fo.payloads = 2;
    fo.color_count = 4;
    std::vector<Configuration> init;
    for (int s = 0; s < c.seeds; ++s) init.push_back(arbitrary_config(c.n, 1 + s, c.profile, fo));
    const ExploreReport r = explore(init, o);
    if (!r.violations.empty() || !r.exhausted) l.pass = false;
    os << c.name << ": " << r.states << " states " << (r.exhausted ? "exhausted" : "NOT exhausted")
       << ' ' << r.violations.size() << " violations; ";
    if (!r.violations.empty()) {
      os << "first " << r.violations[0].property << " (" << r.violations[0].detail << "); ";
    }
  }
  l.detail = os.str();
  l.detail.resize(l.detail.size() - 2);
  return l;
}

// --- dynamics suite ----------------------------------------------------------

struct Scenario {
  const char* name;
  std::vector<TopologyChange> events;
  bool allow_left_join = false;
};

TopologyChange leave_at(std::int64_t step) {
  TopologyChange c;
  c.step = step;
  c.leave = true;
  return c;
}

TopologyChange join_at(std::int64_t step, JoinSide side = JoinSide::kRight) {
  TopologyChange c;
  c.step = step;
  c.side = side;
  return c;
}

std::vector<Scenario> scenarios() {
  std::vector<Scenario> out;
  out.push_back({"leave-join", {leave_at(2000), join_at(4000), leave_at(6000), join_at(8000)}});
  out.push_back({"shrink", {leave_at(1500), leave_at(3000)}});
  out.push_back({"grow", {join_at(1000), join_at(2500), join_at(4000, JoinSide::kLeft)}, true});
  Scenario churn{"churn", {}};
  for (int i = 0; i < 10; ++i) churn.events.push_back(i % 2 ? join_at(500) : leave_at(500));
  out.push_back(churn);
  return out;
}

CampaignSummary g_dyn;
std::int64_t g_equiv_runs = 0;
std::int64_t g_equiv_diff = 0;
std::string g_equiv_first;
bool g_dyn_done = false;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  return (h ^ v) * 0x100000001b3ULL;
}

// Everything the protocol did, minus the configuration hash (extension mode
// carries the flipped bit, so hashes differ even when behavior does not).
std::uint64_t behavior_digest(const RunConfig& rc, Verdict* verdict) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  RunResult r = run(rc, [&](const Configuration&, const StepReport& rep, const Configuration&) {
    for (NodeId s : rep.selected) h = mix(h, static_cast<std::uint64_t>(s));
    for (const FiredAction& f : rep.fired) {
      h = mix(h, static_cast<std::uint64_t>(f.node));
      h = mix(h, f.is_pif ? 100 + static_cast<int>(f.pif) : static_cast<int>(f.rule));
      h = mix(h, static_cast<std::uint64_t>(f.link + 7));
    }
    for (const auto& d : rep.events.deliveries) h = mix(mix(h, d.node), d.ghost);
    for (const auto& d : rep.events.deletions) h = mix(mix(h, d.node), d.ghost);
    for (const auto& g : rep.events.generations) h = mix(mix(h, g.node), g.ghost);
    h = mix(h, 0xa5);
  });
  if (verdict) *verdict = r.verdict;
  return h;
}

void dynamics_suite() {
  if (g_dyn_done) return;
  const auto t0 = std::chrono::steady_clock::now();
  const int seeds = scaled(25);
  for (const Scenario& sc : scenarios()) {
    CampaignSpec spec;
    spec.sizes = {3, 4, 5, 6};
    spec.profiles = {Profile::kClean, Profile::kFull};
    spec.strategies = {Strategy::kSync, Strategy::kRandomFair, Strategy::kAdversary};
    spec.runs = seeds;
    spec.base.horizon = 20'000;
    spec.base.t_stab = 30;
    spec.base.stop_on_fail = false;
    spec.base.protocol.extension = true;
    spec.base.faults.extension = true;
    spec.base.dynamics.events = sc.events;
    spec.base.dynamics.allow_left_join = sc.allow_left_join;
    add_into(g_dyn, run_campaign(spec, g_workers));
  }

  // Zero events: extension mode must behave exactly like the base protocol
  // from the same initial configuration.
  const int eq_seeds = scaled(10);
  for (int n = 3; n <= 6; ++n) {
    for (Profile p : {Profile::kClean, Profile::kFull, Profile::kWorstCaseFullBuffers}) {
      for (Strategy st : {Strategy::kSync, Strategy::kRandomFair, Strategy::kAdversary}) {
        for (int seed = 1; seed <= eq_seeds; ++seed) {
          RunConfig rc;
          rc.n = n;
          rc.profile = p;
          rc.strategy = st;
          rc.seed = static_cast<std::uint64_t>(seed);
          rc.horizon = 20'000;
          rc.t_stab = 10 * n;
          rc.stop_on_fail = false;
          rc.initial = run(rc).initial;
          Verdict vb;
          Verdict ve;
          const std::uint64_t a = behavior_digest(rc, &vb);
          RunConfig ext = rc;
          ext.protocol.extension = true;
          ext.faults.extension = true;
          const std::uint64_t b = behavior_digest(ext, &ve);
          ++g_equiv_runs;
          if (a != b || vb.status != ve.status) {
            if (g_equiv_diff++ == 0) {
              g_equiv_first = "n=" + std::to_string(n) + ' ' + std::string(to_string(p)) + ' ' +
                              std::string(to_string(st)) + " seed " + std::to_string(seed);
            }
          }
        }
      }
    }
  }
  std::fprintf(stderr, "  dynamics suite: %lld runs + %lld equivalence pairs, %.0fs\n",
               static_cast<long long>(g_dyn.runs), static_cast<long long>(g_equiv_runs),
               seconds_since(t0));
  g_dyn_done = true;
}

Line criterion7() {
  const CampaignSummary& s = main_campaign();
  dynamics_suite();
  CampaignSummary all;
  add_into(all, s);
  add_into(all, g_dyn);
  Line l = check_props(all, {Property::kWaveAlternation, Property::kWaveCompletion});
  l.detail += "; " + std::to_string(all.worst.waves) + " waves, longest " +
              std::to_string(all.worst.max_wave_length) + " steps";
  return l;
}

Line criterion9() {
  dynamics_suite();
  Line l = check_props(g_dyn, {Property::kDuplication, Property::kValidDeletion});
  if (g_equiv_diff != 0) l.pass = false;
  l.detail += "; " + std::to_string(g_dyn.worst.sanctioned_deletions) +
              " deletions for departed destinations; zero-event equivalence " +
              std::to_string(g_equiv_runs - g_equiv_diff) + "/" + std::to_string(g_equiv_runs);
  if (!g_equiv_first.empty()) l.detail += " (first difference " + g_equiv_first + ")";
  return l;
}

// --- mutations ---------------------------------------------------------------

// Progress and fairness are excluded: the unmutated protocol trips the
// parked-message bound now and then, so such a FAIL proves nothing.
bool counts_for_mutation(Property p) {
  return p != Property::kProgress && p != Property::kFairness;
}

Line criterion8() {
  const int seeds = std::min(20, scaled(1000));
  int detected = 0;
  std::ostringstream hit;
  std::ostringstream missed;
  for (Mutation m : all_mutations()) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string witness;
    std::set<std::string> progress_only;
    for (int n = 3; n <= 6 && witness.empty(); ++n) {
      CampaignSpec spec = main_spec(n, seeds);
      spec.base.protocol.mutation = m;
      spec.stop_when = [](const RunOutcome& o) {
        for (const Violation& v : o.verdict.violations) {
          if (counts_for_mutation(v.property)) return true;
        }
        return false;
      };
      const CampaignSummary s = run_campaign(spec, g_workers);
      for (const RunOutcome& o : s.failures) {
        for (const Violation& v : o.verdict.violations) {
          if (counts_for_mutation(v.property)) {
            if (witness.empty()) witness = std::string(to_string(v.property)) + " at " + where(o);
          } else {
            progress_only.insert(std::string(to_string(v.property)));
          }
        }
      }
    }
    std::fprintf(stderr, "  mutation %s: %s (%.0fs)\n", std::string(to_string(m)).c_str(),
                 witness.empty() ? "undetected" : witness.c_str(), seconds_since(t0));
    if (!witness.empty()) {
      ++detected;
      hit << ' ' << to_string(m) << " [" << witness << "]";
    } else {
      missed << ' ' << to_string(m);
      if (!progress_only.empty()) missed << " (" << *progress_only.begin() << " only)";
    }
  }
  Line l;
  l.pass = detected >= 5;
  l.detail = std::to_string(detected) + "/" + std::to_string(all_mutations().size()) +
             " mutations detected:" + hit.str();
  if (!missed.str().empty()) l.detail += "; undetected:" + missed.str();
  return l;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* s = std::getenv("SNAPFWD_ACCEPT_SCALE")) {
    g_scale = std::atof(s);
    if (!(g_scale > 0 && g_scale <= 1)) {
      std::cerr << "SNAPFWD_ACCEPT_SCALE must lie in (0, 1]\n";
      return 3;
    }
  }
  g_workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* w = std::getenv("SNAPFWD_WORKERS")) g_workers = std::max(1, std::atoi(w));

  std::set<int> chosen;
  for (int i = 1; i < argc; ++i) chosen.insert(std::atoi(argv[i]));
  if (chosen.empty()) chosen = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  const std::function<Line()> checks[] = {criterion1, criterion2, criterion3,
                                          criterion4, criterion5, criterion6,
                                          criterion7, criterion8, criterion9};
  std::cout << "acceptance: scale " << g_scale << ", " << g_workers << " worker(s)"
            << (g_scale < 1 ? " (scaled run: not the full gate)" : "") << std::endl;
  int failed = 0;
  for (int c : chosen) {
    if (c < 1 || c > 9) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Line l;
    try {
      l = checks[c - 1]();
    } catch (const std::exception& e) {
      l.pass = false;
      l.detail = std::string("error: ") + e.what();
    }
    if (!l.pass) ++failed;
    std::printf("criterion %d: %s  %s  [%.0fs]\n", c, l.pass ? "PASS" : "FAIL", l.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
