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

// snapfwd: run, fuzz and explore the chain forwarding protocol.
//
// Exit codes: 0 PASS, 1 FAIL, 2 INCONCLUSIVE, 3 usage or input error,
// 4 a replay that diverged from its trace.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "snapfwd/campaign.hpp"
#include "snapfwd/explorer.hpp"
#include "snapfwd/faults.hpp"
#include "snapfwd/io.hpp"
#include "snapfwd/routing.hpp"
#include "snapfwd/run.hpp"

namespace {

using namespace snapfwd;

constexpr int kExitUsage = 3;
constexpr int kExitDiverged = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  if (const char* s = std::getenv("SNAPFWD_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw UsageError("SNAPFWD_SEED is not a number: " + std::string(s));
    }
  }
  return 1;
}

int default_workers() {
  if (const char* s = std::getenv("SNAPFWD_WORKERS")) {
    try {
      const int w = std::stoi(s);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
    throw UsageError("SNAPFWD_WORKERS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

template <typename T, typename F>
T parse_enum(const std::string& s, F parse, const std::string& what) {
  const auto v = parse(s);
  if (!v) throw UsageError("unknown " + what + " \"" + s + "\"");
  return *v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int to_int(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("bad " + what + " \"" + s + "\"");
  }
}

// "3..6", "3,5" or "4".
std::vector<int> parse_sizes(const std::string& s) {
  std::vector<int> out;
  for (const std::string& part : split(s, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(part, "chain length"));
      continue;
    }
    const int lo = to_int(part.substr(0, dots), "chain length");
    const int hi = to_int(part.substr(dots + 2), "chain length");
    if (hi < lo) throw UsageError("empty range " + part);
    for (int n = lo; n <= hi; ++n) out.push_back(n);
  }
  if (out.empty()) throw UsageError("no chain length given");
  for (int n : out) {
    if (n < 2) throw UsageError("n must be at least 2");
  }
  return out;
}

// "12", "5e6", "2000000".
std::uint64_t parse_count(const std::string& s) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || v < 1) throw std::invalid_argument(s);
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw UsageError("bad count \"" + s + "\"");
  }
}

std::optional<std::int64_t> parse_t_stab(const std::string& s) {
  if (s == "never" || s == "inf" || s == "null") return std::nullopt;
  return to_int(s, "t_stab");
}

// Flags shared by run and fuzz; unset ones leave the config file alone.
struct RunFlags {
  std::string config;
  std::string profile;
  std::string strategy;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> horizon;
  std::string t_stab;
  std::optional<double> rate;
  std::string dests;
  std::optional<int> colors;
  bool extension = false;
  std::string mutation;
  std::optional<int> fairness;

  void add(CLI::App* app, bool single) {
    app->add_option("--config", config, "JSON run configuration");
    if (single) {
      app->add_option("--profile", profile, "initial profile (CLEAN, BUFFERS_ONLY, PIF_ONLY, ROUTING_ONLY, FULL, WORST_CASE_FULL_BUFFERS)");
      app->add_option("--strategy", strategy, "daemon (SYNC, RANDOM_FAIR, ADVERSARY)");
      app->add_option("--seed", seed, "run seed (default $SNAPFWD_SEED or 1)");
    }
    app->add_option("--horizon", horizon, "steps");
    app->add_option("--t-stab", t_stab, "routing repair step, or 'never'");
    app->add_option("--rate", rate, "request rate per idle node and step");
    app->add_option("--dests", dests, "allowed destinations, comma separated");
    app->add_option("--colors", colors, "color domain size");
    app->add_option("--fairness", fairness, "fairness bound F (default 2n)");
    app->add_flag("--extension", extension, "dynamic-chain mode (flipped bit, leaves and joins)");
    app->add_option("--mutation", mutation)->group("");  // self-tests only
  }

  RunConfig apply(RunConfig rc) const {
    if (!config.empty()) rc = run_config_from_json(load_json(config), rc);
    if (!profile.empty()) rc.profile = parse_enum<Profile>(profile, parse_profile, "profile");
    if (!strategy.empty()) {
      rc.strategy = parse_enum<Strategy>(strategy, parse_strategy, "strategy");
      if (rc.strategy == Strategy::kReplay) throw UsageError("use --replay to replay a trace");
    }
    if (seed) rc.seed = *seed;
    if (horizon) rc.horizon = *horizon;
    if (!t_stab.empty()) rc.t_stab = parse_t_stab(t_stab);
    if (rate) rc.workload.rate = *rate;
    if (!dests.empty()) {
      rc.workload.dests.clear();
      for (const auto& d : split(dests, ',')) rc.workload.dests.push_back(to_int(d, "destination"));
    }
    if (colors) {
      rc.protocol.color_count = *colors;
      rc.faults.color_count = *colors;
    }
    if (fairness) rc.fairness_bound = *fairness;
    if (extension) {
      rc.protocol.extension = true;
      rc.faults.extension = true;
    }
    if (!mutation.empty()) rc.protocol.mutation = parse_enum<Mutation>(mutation, parse_mutation, "mutation");
    rc.faults.payloads = rc.workload.payloads;
    return rc;
  }
};

void print_verdict(std::ostream& os, const Verdict& v) {
  os << to_string(v.status);
  for (const Violation& x : v.violations) {
    os << "\n  " << to_string(x.property) << " at step " << x.step << ": " << x.detail;
  }
  for (const std::string& p : v.pending) os << "\n  pending: " << p;
  os << '\n';
}

void print_stats(std::ostream& os, const MonitorStats& s) {
  os << "generated " << s.generated << ", delivered " << s.delivered_valid << " valid + "
     << s.delivered_invalid << " initial, waves " << s.waves << ", route changes "
     << s.route_changes << "\nworst: generation wait " << s.max_generation_wait
     << ", delivery latency " << s.max_delivery_latency << ", EXT " << s.max_ext_stretch
     << ", wave " << s.max_wave_length << ", parked " << s.max_parked << '\n';
}

// --- run ---------------------------------------------------------------------

struct RunCommand {
  RunFlags flags;
  std::optional<int> n;
  std::string initial;
  std::string dump_initial;
  std::string trace;
  std::string replay;
  bool json = false;
  bool keep_going = false;

  void add(CLI::App& app) {
    CLI::App* sub = app.add_subcommand("run", "one seeded run under the monitor");
    sub->add_option("--n", n, "chain length");
    flags.add(sub, true);
    sub->add_option("--initial", initial, "start from this configuration (JSON)");
    sub->add_option("--dump-initial", dump_initial, "write the initial configuration (JSON)");
    sub->add_option("--trace", trace, "write a JSONL trace ('-' for stdout)");
    sub->add_option("--replay", replay, "replay a JSONL trace and check it step by step");
    sub->add_flag("--json", json, "print the summary as JSON");
    sub->add_flag("--keep-going", keep_going, "do not stop at the first violation");
    sub->callback([this] { chosen = true; });
  }

  bool chosen = false;

  int execute() {
    if (!replay.empty()) return execute_replay();
    RunConfig rc;
    rc.seed = default_seed();
    rc = flags.apply(rc);
    if (n) rc.n = *n;
    if (keep_going) rc.stop_on_fail = false;
    if (!initial.empty()) {
      rc.initial = configuration_from_json(load_json(initial));
      rc.n = rc.initial->n;
      if (rc.initial->t_stab != rc.t_stab && !flags.t_stab.empty()) rc.initial->t_stab = rc.t_stab;
    }
    try {
      validate(rc);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }

    std::unique_ptr<std::ofstream> file;
    std::ostream* tout = nullptr;
    if (trace == "-") {
      tout = &std::cout;
    } else if (!trace.empty()) {
      file = std::make_unique<std::ofstream>(trace);
      if (!*file) throw UsageError("cannot write " + trace);
      tout = file.get();
    }
    std::optional<TraceWriter> writer;
    if (tout) writer.emplace(*tout);
    StepSink sink;
    if (writer) {
      sink = [&](const Configuration& before, const StepReport& rep, const Configuration&) {
        writer->step(rep, before.n);
      };
    }
    // The header needs the sampled initial configuration: sample it here so
    // the trace starts before the first step.
    if (writer && !rc.initial) {
      Configuration init = arbitrary_config(rc.n, mix_seed(rc.seed, 0), rc.profile, rc.faults);
      init.t_stab = rc.t_stab;
      rc.initial = init;
    }
    if (writer) {
      Configuration shown = *rc.initial;
      stabilizer_start(shown);
      writer->header(rc, shown);
    }
    const RunResult res = run(rc, sink);
    if (writer) writer->summary(res);
    if (!dump_initial.empty()) {
      std::ofstream d(dump_initial);
      d << to_json(res.initial).dump(2) << '\n';
    }
    report(rc, res);
    return exit_code(res.verdict.status);
  }

  void report(const RunConfig& rc, const RunResult& res) const {
    std::ostream& os = trace == "-" ? std::cerr : std::cout;
    if (json) {
      Json j{{"run", to_json(rc)},
             {"verdict", to_json(res.verdict)},
             {"stats", to_json(res.stats)},
             {"steps", res.steps}};
      os << j.dump(2) << '\n';
      return;
    }
    os << "n=" << rc.n << " " << to_string(rc.profile) << " " << to_string(rc.strategy)
       << " seed=" << rc.seed << ": " << res.steps << " steps, ";
    print_verdict(os, res.verdict);
    print_stats(os, res.stats);
  }

  int execute_replay() {
    std::ifstream in(replay);
    if (!in) throw UsageError("cannot open " + replay);
    const Trace t = read_trace(in);
    RunConfig rc = replay_config(t);

    std::unique_ptr<std::ofstream> file;
    std::optional<TraceWriter> writer;
    if (!trace.empty()) {
      if (trace == "-") {
        writer.emplace(std::cout);
      } else {
        file = std::make_unique<std::ofstream>(trace);
        writer.emplace(*file);
      }
      writer->header(t.run, t.initial);
    }
    std::optional<std::int64_t> diverged;
    const StepSink sink = [&](const Configuration& before, const StepReport& rep,
                              const Configuration&) {
      if (writer) writer->step(rep, before.n);
      const auto i = static_cast<size_t>(rep.step);
      if (!diverged && (i >= t.hashes.size() || t.hashes[i] != rep.hash)) diverged = rep.step;
    };
    const RunResult res = run(rc, sink);
    if (writer) writer->summary(res);
    std::ostream& os = trace == "-" ? std::cerr : std::cout;
    if (diverged) {
      os << "replay diverged at step " << *diverged << '\n';
      return kExitDiverged;
    }
    if (res.steps != static_cast<std::int64_t>(t.steps.size())) {
      os << "replay stopped after " << res.steps << " of " << t.steps.size() << " steps\n";
      return kExitDiverged;
    }
    if (t.summary) {
      const std::string recorded = (*t.summary)["final_hash"].get<std::string>();
      if (recorded != hash_hex(config_hash(res.final_cfg))) {
        os << "replay reached a different final configuration\n";
        return kExitDiverged;
      }
    }
    os << "replay identical: " << res.steps << " steps\n";
    report(t.run, res);
    return exit_code(res.verdict.status);
  }
};

// --- fuzz --------------------------------------------------------------------

struct FuzzCommand {
  RunFlags flags;
  std::string sizes = "3..6";
  std::string profiles = "FULL,WORST_CASE_FULL_BUFFERS";
  std::string strategies = "SYNC,RANDOM_FAIR,ADVERSARY";
  int runs = 10;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out;
  bool json = false;
  bool keep_going = false;
  bool first_fail = false;
  bool chosen = false;

  void add(CLI::App& app) {
    CLI::App* sub = app.add_subcommand("fuzz", "seeded campaign over sizes, profiles and daemons");
    sub->add_option("--n", sizes, "chain lengths: 3..6, 3,5 or 4");
    sub->add_option("--profile", profiles, "comma-separated profiles");
    sub->add_option("--strategy", strategies, "comma-separated daemons");
    sub->add_option("--runs", runs, "seeds per combination")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "first seed (default $SNAPFWD_SEED or 1)");
    sub->add_option("--workers", workers, "threads (default $SNAPFWD_WORKERS or all cores)");
    sub->add_option("--out", out, "directory for failing run configurations");
    sub->add_flag("--json", json, "print the summary as JSON");
    sub->add_flag("--keep-going", keep_going, "finish each run after a violation");
    sub->add_flag("--first-fail", first_fail, "stop the campaign at the first failing run");
    flags.add(sub, false);
    sub->callback([this] { chosen = true; });
  }

  int execute() {
    CampaignSpec spec;
    spec.base = flags.apply(RunConfig{});
    spec.base.stop_on_fail = !keep_going;
    spec.sizes = parse_sizes(sizes);
    for (const auto& p : split(profiles, ',')) {
      spec.profiles.push_back(parse_enum<Profile>(p, parse_profile, "profile"));
    }
    for (const auto& s : split(strategies, ',')) {
      const Strategy st = parse_enum<Strategy>(s, parse_strategy, "strategy");
      if (st == Strategy::kReplay) throw UsageError("REPLAY is not a fuzzing daemon");
      spec.strategies.push_back(st);
    }
    if (spec.profiles.empty() || spec.strategies.empty()) throw UsageError("nothing to run");
    spec.runs = runs;
    spec.base_seed = seed ? *seed : default_seed();
    spec.stop_at_first_fail = first_fail;
    for (int n : spec.sizes) {
      RunConfig probe = spec.base;
      probe.n = n;
      try {
        validate(probe);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
    if (!out.empty()) std::filesystem::create_directories(out);

    const auto on_run = [&](const RunOutcome& o) {
      if (o.verdict.status != Status::kFail) return;
      std::cerr << "FAIL n=" << o.config.n << " " << to_string(o.config.profile) << " "
                << to_string(o.config.strategy) << " seed=" << o.config.seed;
      if (!o.verdict.violations.empty()) {
        const Violation& v = o.verdict.violations.front();
        std::cerr << ": " << to_string(v.property) << " at step " << v.step;
      }
      std::cerr << '\n';
      if (!out.empty()) {
        std::ofstream f(out + "/fail-" + std::to_string(o.index) + ".json");
        f << Json{{"run", to_json(o.config)}, {"verdict", to_json(o.verdict)}}.dump(2) << '\n';
      }
    };
    const CampaignSummary sum =
        run_campaign(spec, workers ? *workers : default_workers(), on_run);

    if (json) {
      Json props = Json::object();
      for (int p = 0; p < kPropertyCount; ++p) {
        props[std::string(to_string(static_cast<Property>(p)))] = sum.runs_violating[p];
      }
      Json inv = Json::object();
      for (const auto& [n, v] : sum.max_invalid_deliveries) inv[std::to_string(n)] = v;
      std::cout << Json{{"runs", sum.runs},
                        {"pass", sum.passed},
                        {"fail", sum.failed},
                        {"inconclusive", sum.inconclusive},
                        {"steps", sum.steps},
                        {"runs_violating", props},
                        {"max_invalid_deliveries", inv},
                        {"totals", to_json(sum.worst)}}
                       .dump(2)
                << '\n';
    } else {
      std::cout << sum.runs << " runs, " << sum.steps << " steps: " << sum.passed << " PASS, "
                << sum.failed << " FAIL, " << sum.inconclusive << " INCONCLUSIVE\n";
      for (int p = 0; p < kPropertyCount; ++p) {
        if (sum.runs_violating[p]) {
          std::cout << "  " << to_string(static_cast<Property>(p)) << ": "
                    << sum.runs_violating[p] << " runs\n";
        }
      }
      print_stats(std::cout, sum.worst);
    }
    if (sum.failed) return 1;
    return sum.inconclusive ? 2 : 0;
  }
};

// --- explore -----------------------------------------------------------------

struct ExploreCommand {
  int n = 2;
  std::string profile = "CLEAN";
  int seeds = 0;
  std::uint64_t first_seed = 1;
  std::string initial;
  int requests = 1;
  int payloads = 2;
  int colors = kDefaultColorCount;
  bool full_subsets = false;
  std::string budget = "5e6";
  int depth = 0;
  bool no_stabilize = false;
  bool extension = false;
  std::string mutation;
  bool json = false;
  bool chosen = false;

  void add(CLI::App& app) {
    CLI::App* sub = app.add_subcommand("explore", "exhaustive safety check on small chains");
    sub->add_option("--n", n, "chain length");
    sub->add_option("--profile", profile, "initial profile");
    sub->add_option("--seeds", seeds, "initial configurations sampled (default 1 for CLEAN, else 10)");
    sub->add_option("--first-seed", first_seed, "seed of the first initial configuration");
    sub->add_option("--initial", initial, "explore from this configuration (JSON)");
    sub->add_option("--requests", requests, "requests the environment may raise on a path");
    sub->add_option("--payloads", payloads, "payload domain size");
    sub->add_option("--colors", colors, "color domain size");
    sub->add_flag("--full-subsets", full_subsets, "every non-empty selection, not singletons + all");
    sub->add_option("--budget", budget, "state budget, e.g. 5e6");
    sub->add_option("--depth", depth, "BFS depth limit (0: none)");
    sub->add_flag("--no-stabilize", no_stabilize, "never repair routing tables");
    sub->add_flag("--extension", extension, "dynamic-chain mode");
    sub->add_option("--mutation", mutation)->group("");
    sub->add_flag("--json", json, "print the report as JSON");
    sub->callback([this] { chosen = true; });
  }

  int execute() {
    if (n < 2) throw UsageError("n must be at least 2");
    if (payloads < 1 || requests < 0 || colors < 4) throw UsageError("bad explorer domain sizes");
    ExploreOptions o;
    o.protocol.color_count = colors;
    o.protocol.extension = extension;
    if (!mutation.empty()) o.protocol.mutation = parse_enum<Mutation>(mutation, parse_mutation, "mutation");
    o.full_subsets = full_subsets;
    o.state_budget = parse_count(budget);
    o.max_depth = depth;
    o.request_budget = requests;
    o.payloads = payloads;
    o.stabilize_move = !no_stabilize;

    std::vector<Configuration> init;
    if (!initial.empty()) {
      init.push_back(configuration_from_json(load_json(initial)));
    } else {
      const Profile p = parse_enum<Profile>(profile, parse_profile, "profile");
      FaultOptions fo;
      fo.color_count = colors;
      fo.payloads = payloads;
      fo.extension = extension;
      const int k = seeds > 0 ? seeds : (p == Profile::kClean ? 1 : 10);
      for (int i = 0; i < k; ++i) init.push_back(arbitrary_config(n, first_seed + i, p, fo));
    }
    const ExploreReport r = explore(init, o);
    if (json) {
      std::cout << to_json(r).dump(2) << '\n';
    } else {
      std::cout << r.mode << ": " << r.states << " states, " << r.transitions
                << " transitions, depth " << r.depth << ", "
                << (r.exhausted ? "exhausted" : r.budget_hit ? "budget hit" : "cut off") << ", "
                << r.violations.size() << " violations\n";
      for (const ExploreViolation& v : r.violations) {
        std::cout << "  " << v.property << ": " << v.detail << " (initial " << v.initial_index
                  << ")\n";
        for (const ExploreMove& m : v.path) std::cout << "    " << to_string(m) << '\n';
      }
    }
    if (!r.violations.empty()) return 1;
    return r.exhausted ? 0 : 2;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Snap-stabilizing message forwarding on a chain: simulator, monitor, explorer"};
  app.require_subcommand(1);
  RunCommand run_cmd;
  FuzzCommand fuzz_cmd;
  ExploreCommand explore_cmd;
  run_cmd.add(app);
  fuzz_cmd.add(app);
  explore_cmd.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run_cmd.chosen) return run_cmd.execute();
    if (fuzz_cmd.chosen) return fuzz_cmd.execute();
    if (explore_cmd.chosen) return explore_cmd.execute();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
