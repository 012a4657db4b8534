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

#include "snapfwd/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string_view>

#include "snapfwd/faults.hpp"

namespace snapfwd {

namespace {

constexpr std::string_view kSchema = "snapfwd-trace";

[[noreturn]] void bad(const std::string& what) { throw FormatError(what); }

void only_keys(const Json& j, std::initializer_list<std::string_view> keys,
               std::string_view where) {
  if (!j.is_object()) bad(std::string(where) + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (std::string_view key : keys) ok = ok || key == k;
    if (!ok) bad(std::string(where) + ": unknown key \"" + k + "\"");
  }
}

template <typename T>
T get(const Json& j, std::string_view key, std::string_view where) {
  const auto it = j.find(std::string(key));
  if (it == j.end()) bad(std::string(where) + ": missing \"" + std::string(key) + "\"");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    bad(std::string(where) + ": bad value for \"" + std::string(key) + "\"");
  }
}

template <typename T>
void get_if(const Json& j, std::string_view key, std::string_view where, T& out) {
  if (j.contains(std::string(key))) out = get<T>(j, key, where);
}

std::int64_t as_int(const Json& v, std::string_view what) {
  if (!v.is_number_integer()) bad(std::string(what) + ": expected an integer");
  return v.get<std::int64_t>();
}

std::string_view phase_name(PifPhase p) {
  switch (p) {
    case PifPhase::kB: return "B";
    case PifPhase::kF: return "F";
    case PifPhase::kC: return "C";
  }
  return "?";
}

PifPhase parse_phase(const std::string& s) {
  if (s == "B") return PifPhase::kB;
  if (s == "F") return PifPhase::kF;
  if (s == "C") return PifPhase::kC;
  bad("unknown wave phase \"" + s + "\"");
}

Json ptr_json(NodeId p) {
  if (p == kPtrInit) return "INIT";
  if (p == kPtrNull) return "NULL";
  return p;
}

NodeId parse_ptr(const Json& j) {
  if (j.is_string()) {
    if (j == "INIT") return kPtrInit;
    if (j == "NULL") return kPtrNull;
    bad("unknown wave pointer " + j.dump());
  }
  return static_cast<NodeId>(as_int(j, "wave pointer"));
}

Json message_json(const Message& m) {
  return Json{{"payload", m.payload}, {"dest", m.dest},       {"color", m.color},
              {"ghost", m.ghost},     {"flipped", m.flipped}};
}

Message parse_message(const Json& j) {
  only_keys(j, {"payload", "dest", "color", "ghost", "flipped"}, "message");
  Message m;
  m.payload = get<int>(j, "payload", "message");
  m.dest = get<NodeId>(j, "dest", "message");
  m.color = get<Color>(j, "color", "message");
  m.ghost = get<GhostId>(j, "ghost", "message");
  get_if(j, "flipped", "message", m.flipped);
  return m;
}

std::optional<TopologyOp> parse_topology_op(std::string_view s) {
  for (TopologyOp op : {TopologyOp::kLeaveStart, TopologyOp::kDetach, TopologyOp::kJoinRight,
                        TopologyOp::kJoinLeft}) {
    if (to_string(op) == s) return op;
  }
  return std::nullopt;
}

}  // namespace

std::string hash_hex(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

// --- configuration ----------------------------------------------------------

Json to_json(const Configuration& cfg) {
  Json j;
  j["n"] = cfg.n;
  Json slots = Json::array();
  for (const Slot& s : cfg.slots) slots.push_back(s ? message_json(*s) : Json(nullptr));
  j["slots"] = std::move(slots);
  Json pif = Json::array();
  for (const PifState& s : cfg.pif) {
    pif.push_back({{"phase", phase_name(s.phase)}, {"ptr", ptr_json(s.ptr)}});
  }
  j["pif"] = std::move(pif);
  Json routing = Json::array();
  for (NodeId p = 0; p < cfg.n; ++p) {
    Json row = Json::array();
    for (NodeId d = 0; d < cfg.n; ++d) {
      const NodeId h = cfg.routing[p * cfg.n + d];
      row.push_back(d == p ? Json(nullptr) : Json(h));
    }
    routing.push_back(std::move(row));
  }
  j["routing"] = std::move(routing);
  Json req = Json::array();
  for (const auto& r : cfg.request) {
    req.push_back(r ? Json{{"payload", r->payload}, {"dest", r->dest}} : Json(nullptr));
  }
  j["request"] = std::move(req);
  j["pif_request"] = cfg.pif_request;
  Json fair = Json::array();
  for (FairPointer f : cfg.fair_ptr) {
    fair.push_back(f == FairPointer::kGenerate ? "GENERATE" : "TRANSMIT");
  }
  j["fair_ptr"] = std::move(fair);
  j["clock"] = cfg.clock;
  j["t_stab"] = cfg.t_stab ? Json(*cfg.t_stab) : Json(nullptr);
  j["next_ghost"] = cfg.next_ghost;
  j["departing"] = cfg.departing ? Json(*cfg.departing) : Json(nullptr);
  return j;
}

static Configuration parse_configuration(const Json& j) {
  constexpr std::string_view kWhere = "configuration";
  only_keys(j,
            {"n", "slots", "pif", "routing", "request", "pif_request", "fair_ptr", "clock",
             "t_stab", "next_ghost", "departing"},
            kWhere);
  Configuration cfg;
  cfg.n = get<int>(j, "n", kWhere);
  if (cfg.n < 2 || cfg.n > 4096) bad("configuration: n out of range");
  const int n = cfg.n;
  const Json& slots = j.at("slots");
  if (!slots.is_array() || static_cast<int>(slots.size()) != slot_count(n)) {
    bad("configuration: slots must list 4n-3 buffers");
  }
  for (const Json& s : slots) {
    cfg.slots.push_back(s.is_null() ? Slot{} : Slot{parse_message(s)});
  }
  const Json& pif = j.at("pif");
  if (!pif.is_array() || static_cast<int>(pif.size()) != n) bad("configuration: pif needs n entries");
  for (const Json& s : pif) {
    only_keys(s, {"phase", "ptr"}, "wave state");
    cfg.pif.push_back({parse_phase(get<std::string>(s, "phase", "wave state")), parse_ptr(s.at("ptr"))});
  }
  const Json& routing = j.at("routing");
  if (!routing.is_array() || static_cast<int>(routing.size()) != n) {
    bad("configuration: routing needs n rows");
  }
  cfg.routing.assign(static_cast<size_t>(n) * n, -1);
  for (NodeId p = 0; p < n; ++p) {
    const Json& row = routing[p];
    if (!row.is_array() || static_cast<int>(row.size()) != n) bad("configuration: routing row size");
    for (NodeId d = 0; d < n; ++d) {
      if (d == p) continue;
      cfg.routing[p * n + d] = static_cast<NodeId>(as_int(row[d], "routing entry"));
    }
  }
  const Json& req = j.at("request");
  if (!req.is_array() || static_cast<int>(req.size()) != n) bad("configuration: request needs n entries");
  for (const Json& r : req) {
    if (r.is_null()) {
      cfg.request.emplace_back();
    } else {
      only_keys(r, {"payload", "dest"}, "request");
      cfg.request.emplace_back(Request{get<int>(r, "payload", "request"), get<NodeId>(r, "dest", "request")});
    }
  }
  cfg.pif_request = get<bool>(j, "pif_request", kWhere);
  const Json& fair = j.at("fair_ptr");
  if (!fair.is_array() || static_cast<int>(fair.size()) != slot_count(n)) {
    bad("configuration: fair_ptr needs one entry per buffer");
  }
  for (const Json& f : fair) {
    if (f == "GENERATE") {
      cfg.fair_ptr.push_back(FairPointer::kGenerate);
    } else if (f == "TRANSMIT") {
      cfg.fair_ptr.push_back(FairPointer::kTransmit);
    } else {
      bad("configuration: bad fair pointer " + f.dump());
    }
  }
  get_if(j, "clock", kWhere, cfg.clock);
  if (j.contains("t_stab") && !j.at("t_stab").is_null()) cfg.t_stab = as_int(j.at("t_stab"), "t_stab");
  get_if(j, "next_ghost", kWhere, cfg.next_ghost);
  if (j.contains("departing") && !j.at("departing").is_null()) {
    cfg.departing = static_cast<NodeId>(as_int(j.at("departing"), "departing"));
  }
  try {
    check_structure(cfg);
  } catch (const ModelError& e) {
    bad(std::string("configuration: ") + e.what());
  }
  return cfg;
}

Configuration configuration_from_json(const Json& j) {
  try {
    return parse_configuration(j);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("configuration: ") + e.what());
  }
}

// --- run configuration -------------------------------------------------------

static RunConfig parse_run_config(const Json& j, RunConfig rc) {
  constexpr std::string_view kWhere = "run config";
  only_keys(j,
            {"n", "profile", "strategy", "seed", "horizon", "t_stab", "colors", "mutation",
             "stop_on_fail", "workload", "dynamics", "bounds"},
            kWhere);
  get_if(j, "n", kWhere, rc.n);
  if (j.contains("profile")) {
    const auto p = parse_profile(get<std::string>(j, "profile", kWhere));
    if (!p) bad("run config: unknown profile " + j.at("profile").dump());
    rc.profile = *p;
  }
  if (j.contains("strategy")) {
    const auto s = parse_strategy(get<std::string>(j, "strategy", kWhere));
    if (!s || *s == Strategy::kReplay) bad("run config: unknown strategy " + j.at("strategy").dump());
    rc.strategy = *s;
  }
  get_if(j, "seed", kWhere, rc.seed);
  get_if(j, "horizon", kWhere, rc.horizon);
  if (j.contains("t_stab")) {
    const Json& t = j.at("t_stab");
    rc.t_stab = t.is_null() ? std::nullopt : std::optional<std::int64_t>(as_int(t, "t_stab"));
  }
  if (j.contains("colors")) {
    rc.protocol.color_count = get<int>(j, "colors", kWhere);
    rc.faults.color_count = rc.protocol.color_count;
  }
  if (j.contains("mutation")) {
    const auto m = parse_mutation(get<std::string>(j, "mutation", kWhere));
    if (!m) bad("run config: unknown mutation " + j.at("mutation").dump());
    rc.protocol.mutation = *m;
  }
  get_if(j, "stop_on_fail", kWhere, rc.stop_on_fail);

  if (j.contains("workload")) {
    const Json& w = j.at("workload");
    only_keys(w, {"rate", "dests", "payloads", "stop_at"}, "workload");
    get_if(w, "rate", "workload", rc.workload.rate);
    get_if(w, "dests", "workload", rc.workload.dests);
    get_if(w, "payloads", "workload", rc.workload.payloads);
    get_if(w, "stop_at", "workload", rc.workload.stop_at);
    rc.faults.payloads = rc.workload.payloads;
  }
  if (j.contains("dynamics")) {
    const Json& d = j.at("dynamics");
    only_keys(d, {"enabled", "events", "min_gap", "allow_left_join"}, "dynamics");
    if (d.contains("enabled")) {
      rc.protocol.extension = get<bool>(d, "enabled", "dynamics");
      rc.faults.extension = rc.protocol.extension;
    }
    get_if(d, "min_gap", "dynamics", rc.dynamics.min_gap);
    get_if(d, "allow_left_join", "dynamics", rc.dynamics.allow_left_join);
    if (d.contains("events")) {
      rc.dynamics.events.clear();
      for (const Json& e : d.at("events")) {
        only_keys(e, {"step", "op", "side", "node"}, "topology event");
        TopologyChange c;
        c.step = get<std::int64_t>(e, "step", "topology event");
        const auto op = get<std::string>(e, "op", "topology event");
        if (op == "leave") {
          c.leave = true;
          get_if(e, "node", "topology event", c.node);
        } else if (op == "join") {
          if (e.contains("side")) {
            const auto side = parse_join_side(get<std::string>(e, "side", "topology event"));
            if (!side) bad("topology event: unknown side " + e.at("side").dump());
            c.side = *side;
          }
        } else {
          bad("topology event: op must be join or leave");
        }
        rc.dynamics.events.push_back(c);
      }
    }
  }
  if (j.contains("bounds")) {
    const Json& b = j.at("bounds");
    only_keys(b, {"L_gen", "L_del", "L_ext", "B_prog", "F", "suitable_window", "wave"}, "bounds");
    get_if(b, "L_gen", "bounds", rc.monitor.bounds.l_gen);
    get_if(b, "L_del", "bounds", rc.monitor.bounds.l_del);
    get_if(b, "L_ext", "bounds", rc.monitor.bounds.l_ext);
    get_if(b, "B_prog", "bounds", rc.monitor.bounds.b_prog);
    get_if(b, "suitable_window", "bounds", rc.monitor.bounds.suitable_window);
    get_if(b, "wave", "bounds", rc.monitor.bounds.wave);
    get_if(b, "F", "bounds", rc.fairness_bound);
  }
  return rc;
}

RunConfig run_config_from_json(const Json& j, RunConfig base) {
  try {
    return parse_run_config(j, std::move(base));
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("run config: ") + e.what());
  }
}

Json to_json(const RunConfig& rc) {
  Json j;
  j["n"] = rc.n;
  j["profile"] = to_string(rc.profile);
  j["strategy"] = to_string(rc.strategy == Strategy::kReplay ? Strategy::kSync : rc.strategy);
  j["seed"] = rc.seed;
  j["horizon"] = rc.horizon;
  j["t_stab"] = rc.t_stab ? Json(*rc.t_stab) : Json(nullptr);
  j["colors"] = rc.protocol.color_count;
  j["mutation"] = to_string(rc.protocol.mutation);
  j["stop_on_fail"] = rc.stop_on_fail;
  j["workload"] = {{"rate", rc.workload.rate},
                   {"dests", rc.workload.dests},
                   {"payloads", rc.workload.payloads},
                   {"stop_at", rc.workload.stop_at}};
  Json events = Json::array();
  for (const TopologyChange& c : rc.dynamics.events) {
    Json e{{"step", c.step}, {"op", c.leave ? "leave" : "join"}};
    if (c.leave) {
      if (c.node >= 0) e["node"] = c.node;
    } else {
      e["side"] = to_string(c.side);
    }
    events.push_back(std::move(e));
  }
  j["dynamics"] = {{"enabled", rc.protocol.extension},
                   {"events", std::move(events)},
                   {"min_gap", rc.dynamics.min_gap},
                   {"allow_left_join", rc.dynamics.allow_left_join}};
  const MonitorBounds& b = rc.monitor.bounds;
  j["bounds"] = {{"L_gen", b.l_gen},   {"L_del", b.l_del},
                 {"L_ext", b.l_ext},   {"B_prog", b.b_prog},
                 {"F", rc.fairness_bound}, {"suitable_window", b.suitable_window},
                 {"wave", b.wave}};
  return j;
}

// --- steps -------------------------------------------------------------------

Json to_json(const StepReport& rep, int n) {
  Json j;
  j["kind"] = "step";
  j["step"] = rep.step;
  j["enabled"] = rep.enabled;
  j["selected"] = rep.selected;
  Json fired = Json::array();
  for (const FiredAction& f : rep.fired) {
    if (f.is_pif) {
      Json a{{"node", f.node}, {"protocol", "pif"}, {"action", to_string(f.pif)}};
      if (f.link >= 0) a["neighbor"] = f.link;
      fired.push_back(std::move(a));
    } else {
      Json written = Json::array();
      for (int w : write_set(f.node, RuleFiring{f.rule, f.link}, n)) {
        if (w == kWriteRequest) {
          written.push_back("request");
        } else if (w == kWritePifRequest) {
          written.push_back("pif_request");
        } else {
          written.push_back(to_string(slot_ref(n, w)));
        }
      }
      fired.push_back({{"node", f.node},
                       {"protocol", "fwd"},
                       {"rule", to_string(f.rule)},
                       {"link", f.link},
                       {"slots_written", std::move(written)}});
    }
  }
  j["fired"] = std::move(fired);
  Json gens = Json::array();
  for (const auto& g : rep.events.generations) {
    gens.push_back({{"node", g.node},
                    {"ghost", g.ghost},
                    {"dest", g.dest},
                    {"wrong_direction", g.wrong_direction}});
  }
  j["generations"] = std::move(gens);
  Json dels = Json::array();
  for (const auto& d : rep.events.deliveries) {
    dels.push_back({{"node", d.node}, {"ghost", d.ghost}, {"dest", d.dest}});
  }
  j["deliveries"] = std::move(dels);
  Json erased = Json::array();
  for (const auto& d : rep.events.deletions) {
    erased.push_back({{"node", d.node}, {"ghost", d.ghost}, {"rule", to_string(d.rule)}});
  }
  j["deletions"] = std::move(erased);
  Json inj = Json::array();
  for (const Injection& i : rep.injections) {
    inj.push_back({{"node", i.node}, {"payload", i.payload}, {"dest", i.dest}});
  }
  j["injections"] = std::move(inj);
  Json topo = Json::array();
  for (const TopologyEvent& t : rep.topology) {
    topo.push_back({{"op", to_string(t.op)}, {"node", t.node}});
  }
  j["topology"] = std::move(topo);
  j["hash"] = hash_hex(rep.hash);
  j["terminal"] = rep.terminal;
  return j;
}

static StepInputs parse_step_inputs(const Json& j) {
  constexpr std::string_view kWhere = "trace step";
  StepInputs in;
  in.selected = get<std::vector<NodeId>>(j, "selected", kWhere);
  for (const Json& i : j.at("injections")) {
    in.injections.push_back({get<NodeId>(i, "node", "injection"), get<int>(i, "payload", "injection"),
                             get<NodeId>(i, "dest", "injection")});
  }
  for (const Json& t : j.at("topology")) {
    const auto op = parse_topology_op(get<std::string>(t, "op", "topology"));
    if (!op) bad("trace step: unknown topology op " + t.at("op").dump());
    in.topology.push_back({*op, get<NodeId>(t, "node", "topology")});
  }
  in.terminal = get<bool>(j, "terminal", kWhere);
  return in;
}

StepInputs step_inputs_from_json(const Json& j) {
  try {
    return parse_step_inputs(j);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("trace step: ") + e.what());
  }
}

// --- verdicts and reports ----------------------------------------------------

Json to_json(const Verdict& v) {
  Json viol = Json::array();
  for (const Violation& x : v.violations) {
    viol.push_back({{"property", to_string(x.property)}, {"step", x.step}, {"detail", x.detail}});
  }
  return {{"status", to_string(v.status)}, {"violations", std::move(viol)}, {"pending", v.pending}};
}

Json to_json(const MonitorStats& s) {
  return {{"generated", s.generated},
          {"delivered_valid", s.delivered_valid},
          {"delivered_invalid", s.delivered_invalid},
          {"deleted_invalid", s.deleted_invalid},
          {"sanctioned_deletions", s.sanctioned_deletions},
          {"waves", s.waves},
          {"route_changes", s.route_changes},
          {"max_generation_wait", s.max_generation_wait},
          {"max_delivery_latency", s.max_delivery_latency},
          {"max_ext_stretch", s.max_ext_stretch},
          {"max_wave_length", s.max_wave_length},
          {"max_parked", s.max_parked},
          {"suitable_onset", s.suitable_onset ? Json(*s.suitable_onset) : Json(nullptr)}};
}

Json to_json(const ExploreReport& r) {
  Json viol = Json::array();
  for (const ExploreViolation& v : r.violations) {
    Json path = Json::array();
    for (const ExploreMove& m : v.path) path.push_back(to_string(m));
    viol.push_back({{"property", v.property},
                    {"detail", v.detail},
                    {"initial", v.initial_index},
                    {"path", std::move(path)}});
  }
  return {{"states", r.states},         {"transitions", r.transitions},
          {"depth", r.depth},           {"exhausted", r.exhausted},
          {"budget", r.budget_hit},     {"mode", r.mode},
          {"violations", std::move(viol)}};
}

// --- traces ------------------------------------------------------------------

void TraceWriter::header(const RunConfig& rc, const Configuration& initial) {
  const Json j{{"kind", "initial"},
               {"schema", kSchema},
               {"version", kTraceVersion},
               {"run", to_json(rc)},
               {"config", to_json(initial)}};
  out_ << j.dump() << '\n';
}

void TraceWriter::step(const StepReport& rep, int n) { out_ << to_json(rep, n).dump() << '\n'; }

void TraceWriter::summary(const RunResult& res) {
  const Json j{{"kind", "summary"},
               {"verdict", to_json(res.verdict)},
               {"stats", to_json(res.stats)},
               {"steps", res.steps},
               {"final_hash", hash_hex(config_hash(res.final_cfg))}};
  out_ << j.dump() << '\n';
}

static Trace parse_trace(std::istream& in) {
  Trace t;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      bad("trace line " + std::to_string(lineno) + ": " + e.what());
    }
    const std::string kind = get<std::string>(j, "kind", "trace line");
    if (!have_header) {
      if (kind != "initial") bad("trace must start with the initial configuration");
      if (get<std::string>(j, "schema", "trace header") != kSchema) bad("not a snapfwd trace");
      const int version = get<int>(j, "version", "trace header");
      if (version != kTraceVersion) {
        bad("trace schema version " + std::to_string(version) + " is not supported");
      }
      t.run = run_config_from_json(j.at("run"));
      t.initial = configuration_from_json(j.at("config"));
      have_header = true;
    } else if (kind == "step") {
      if (t.summary) bad("trace has steps after its summary");
      if (get<std::int64_t>(j, "step", "trace step") != static_cast<std::int64_t>(t.steps.size())) {
        bad("trace line " + std::to_string(lineno) + ": steps out of order");
      }
      t.steps.push_back(step_inputs_from_json(j));
      t.hashes.push_back(std::stoull(get<std::string>(j, "hash", "trace step"), nullptr, 16));
    } else if (kind == "summary") {
      t.summary = j;
    } else {
      bad("trace line " + std::to_string(lineno) + ": unknown kind \"" + kind + "\"");
    }
  }
  if (!have_header) bad("empty trace");
  return t;
}

Trace read_trace(std::istream& in) {
  try {
    return parse_trace(in);
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("trace: ") + e.what());
  } catch (const std::logic_error& e) {  // stoull on a bad hash
    bad(std::string("trace: ") + e.what());
  }
}

RunConfig replay_config(const Trace& t) {
  RunConfig rc = t.run;
  rc.n = t.initial.n;
  rc.initial = t.initial;
  rc.script = t.steps;
  rc.horizon = std::max<std::int64_t>(1, static_cast<std::int64_t>(t.steps.size()));
  // The recorded run already stopped where it stopped.
  rc.stop_on_fail = false;
  return rc;
}

}  // namespace snapfwd
