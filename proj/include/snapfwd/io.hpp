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

#ifndef SNAPFWD_IO_HPP_
#define SNAPFWD_IO_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "snapfwd/chain.hpp"
#include "snapfwd/daemon.hpp"
#include "snapfwd/explorer.hpp"
#include "snapfwd/monitor.hpp"
#include "snapfwd/run.hpp"

namespace snapfwd {

using Json = nlohmann::json;

/// Malformed JSON input: wrong type, unknown key, value out of range.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kTraceVersion = 1;

// Objects are written with sorted keys, so equal values serialize to the
// same bytes.

Json to_json(const Configuration& cfg);
/// Also checks the structural invariants.
Configuration configuration_from_json(const Json& j);

/**
 * Run configuration document:
 *
 *   {n, profile, strategy, seed, horizon, t_stab (null: never), colors,
 *    mutation, stop_on_fail,
 *    workload: {rate, dests, payloads, stop_at},
 *    dynamics: {enabled, events: [{step, op: join|leave, side|node}],
 *               min_gap, allow_left_join},
 *    bounds: {L_gen, L_del, L_ext, B_prog, F, suitable_window, wave}}
 *
 * Every key is optional; missing ones keep the value from `base`. Unknown
 * keys are rejected.
 */
RunConfig run_config_from_json(const Json& j, RunConfig base = {});
/// The same document, complete. The initial configuration and script are
/// not part of it.
Json to_json(const RunConfig& rc);

Json to_json(const StepReport& rep, int n);
/// What a replay needs from a recorded step line.
StepInputs step_inputs_from_json(const Json& j);

Json to_json(const Verdict& v);
Json to_json(const MonitorStats& s);
Json to_json(const ExploreReport& r);

std::string hash_hex(std::uint64_t h);

/**
 * JSONL trace: a header line {kind: "initial", schema, version, run, config},
 * one {kind: "step"} line per step, and a closing {kind: "summary"} line.
 */
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out) : out_(out) {}
  void header(const RunConfig& rc, const Configuration& initial);
  void step(const StepReport& rep, int n);
  void summary(const RunResult& res);

 private:
  std::ostream& out_;
};

struct Trace {
  RunConfig run;
  Configuration initial;
  std::vector<StepInputs> steps;
  std::vector<std::uint64_t> hashes;  // recorded per step
  std::optional<Json> summary;
};

/// Throws FormatError on a malformed trace or an unknown schema version.
Trace read_trace(std::istream& in);

/// A run configuration that replays `t` exactly.
RunConfig replay_config(const Trace& t);

}  // namespace snapfwd

#endif  // SNAPFWD_IO_HPP_
