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

#include "snapfwd/run.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "snapfwd/routing.hpp"

namespace snapfwd {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over (seed, stream)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Workload::Workload(WorkloadOptions opts, std::uint64_t seed)
    : opts_(std::move(opts)), rng_(seed) {}

void Workload::inject(Configuration& cfg, std::int64_t step, std::vector<Injection>& out) {
  (void)step;
  const int n = cfg.n;
  for (NodeId p = 0; p < n; ++p) {
    if (cfg.request[p] || (cfg.departing && *cfg.departing == p)) continue;
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    if (u >= opts_.rate) continue;
    pool_.clear();
    auto allowed = [&](NodeId d) {
      return d != p && d >= 0 && d < n && !(cfg.departing && *cfg.departing == d);
    };
    if (opts_.dests.empty()) {
      for (NodeId d = 0; d < n; ++d) {
        if (allowed(d)) pool_.push_back(d);
      }
    } else {
      for (NodeId d : opts_.dests) {
        if (allowed(d)) pool_.push_back(d);
      }
    }
    if (pool_.empty()) continue;
    const NodeId dest = pool_[rng_() % pool_.size()];
    const int payload = static_cast<int>(rng_() % static_cast<std::uint64_t>(opts_.payloads));
    cfg.request[p] = Request{payload, dest};
    out.push_back({p, payload, dest});
  }
}

void validate(const RunConfig& rc) {
  if (rc.n < 2) throw std::invalid_argument("n must be at least 2");
  if (rc.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (rc.workload.rate < 0 || rc.workload.rate > 1) {
    throw std::invalid_argument("workload rate must lie in [0, 1]");
  }
  if (rc.workload.payloads < 1) throw std::invalid_argument("payload domain must be non-empty");
  if (rc.protocol.color_count < 4) throw std::invalid_argument("at least 4 colors are needed");
  if (rc.fairness_bound < 0) throw std::invalid_argument("fairness bound must be positive");
  if (rc.t_stab && *rc.t_stab < 0) throw std::invalid_argument("t_stab must be non-negative");
  if (rc.strategy == Strategy::kReplay && !rc.script) {
    throw std::invalid_argument("REPLAY needs a recorded trace");
  }
  if (!rc.dynamics.events.empty() && !rc.protocol.extension) {
    throw std::invalid_argument("topology changes need extension mode");
  }
  for (const TopologyChange& c : rc.dynamics.events) {
    if (!c.leave && c.side == JoinSide::kLeft && !rc.dynamics.allow_left_join) {
      throw std::invalid_argument("left joins are disabled (p0 stays the left extremity)");
    }
  }
  if (rc.initial) check_structure(*rc.initial);
}

namespace {

void apply_recorded(Configuration& cfg, const TopologyEvent& ev,
                    std::optional<std::int64_t> restab) {
  switch (ev.op) {
    case TopologyOp::kLeaveStart: begin_leave(cfg, ev.node); break;
    case TopologyOp::kDetach: detach(cfg, restab); break;
    case TopologyOp::kJoinRight: join(cfg, JoinSide::kRight, restab); break;
    case TopologyOp::kJoinLeft: join(cfg, JoinSide::kLeft, restab); break;
  }
}

}  // namespace

RunResult run(const RunConfig& rc, const StepSink& sink) {
  validate(rc);
  RunResult res;
  Configuration cfg;
  if (rc.initial) {
    cfg = *rc.initial;
  } else {
    cfg = arbitrary_config(rc.n, mix_seed(rc.seed, 0), rc.profile, rc.faults);
    cfg.t_stab = rc.t_stab;
  }
  stabilizer_start(cfg);
  res.initial = cfg;

  MonitorOptions mo = rc.monitor;
  mo.extension = rc.protocol.extension;
  Monitor monitor(cfg, mo);
  StepExecutor exec(rc.protocol);
  Schedule sched;
  sched.strategy = rc.strategy;
  sched.seed = mix_seed(rc.seed, 1);
  sched.fairness_bound = rc.fairness_bound;
  Daemon daemon(sched, cfg.n);
  Workload workload(rc.workload, mix_seed(rc.seed, 2));

  std::int64_t stop_at = rc.workload.stop_at;
  if (stop_at < 0) {
    const int n = cfg.n;
    const int l_gen = rc.monitor.bounds.l_gen > 0 ? rc.monitor.bounds.l_gen : 32 * n;
    const int l_del = rc.monitor.bounds.l_del > 0 ? rc.monitor.bounds.l_del : 64 * n;
    stop_at = std::max<std::int64_t>(0, rc.horizon - l_gen - l_del);
  }

  size_t next_change = 0;
  std::int64_t last_change = -(std::int64_t{1} << 40);
  Configuration next;
  StepReport rep;
  for (std::int64_t step = 0; step < rc.horizon; ++step) {
    rep.clear();
    rep.step = step;
    const int n_before = cfg.n;
    const StepInputs* in = nullptr;
    if (rc.script) {
      if (step >= static_cast<std::int64_t>(rc.script->size())) break;
      in = &(*rc.script)[step];
      for (const TopologyEvent& ev : in->topology) {
        apply_recorded(cfg, ev, rc.t_stab);
        rep.topology.push_back(ev);
      }
      for (const Injection& inj : in->injections) {
        if (inj.node < 0 || inj.node >= cfg.n) throw ModelError("replayed request at unknown node");
        cfg.request[inj.node] = Request{inj.payload, inj.dest};
        rep.injections.push_back(inj);
      }
    } else {
      if (cfg.departing && can_detach(cfg)) {
        const NodeId d = *cfg.departing;
        detach(cfg, rc.t_stab);
        rep.topology.push_back({TopologyOp::kDetach, d});
      } else if (next_change < rc.dynamics.events.size() && !cfg.departing) {
        const TopologyChange& c = rc.dynamics.events[next_change];
        const int gap = rc.dynamics.min_gap > 0 ? rc.dynamics.min_gap : 64 * cfg.n;
        if (step >= c.step && step - last_change >= gap) {
          if (c.leave) {
            if (cfg.n >= 3 || c.node >= 0) {
              const NodeId d = c.node >= 0 ? c.node : cfg.n - 1;
              begin_leave(cfg, d);
              rep.topology.push_back({TopologyOp::kLeaveStart, d});
            }
            ++next_change;
            last_change = step;
          } else if (c.side == JoinSide::kRight) {
            join(cfg, JoinSide::kRight, rc.t_stab);
            rep.topology.push_back({TopologyOp::kJoinRight, cfg.n - 1});
            ++next_change;
            last_change = step;
          } else if (can_join_left(cfg)) {
            join(cfg, JoinSide::kLeft, rc.t_stab);
            rep.topology.push_back({TopologyOp::kJoinLeft, 0});
            ++next_change;
            last_change = step;
          }
        }
      }
      if (step < stop_at) workload.inject(cfg, step, rep.injections);
    }
    if (cfg.n != n_before) daemon.resize(cfg.n);

    exec.evaluate(cfg);
    if (exec.enabled_nodes().empty()) {
      if (in && !in->selected.empty()) {
        throw ModelError("replay diverged at step " + std::to_string(step) + ": nothing enabled");
      }
      exec.fire(cfg, {}, next, rep);
      stabilizer_tick(next);
      daemon.idle();
    } else {
      const std::vector<NodeId>& sel = in ? in->selected : daemon.select(exec.enabled_nodes(), step);
      exec.fire(cfg, sel, next, rep);
      if (!in && daemon.max_age() > daemon.fairness_bound()) {
        monitor.fairness_breach(step, daemon.max_age(), daemon.fairness_bound());
      }
    }
    if (sink) rep.hash = config_hash(next);
    monitor.observe(cfg, rep, next);
    if (sink) sink(cfg, rep, next);
    std::swap(cfg, next);
    res.steps = step + 1;

    if (monitor.failed() && rc.stop_on_fail) break;
    const bool changes_left = next_change < rc.dynamics.events.size() || cfg.departing;
    if (!in && rep.terminal && step + 1 >= stop_at && !changes_left) break;
  }

  res.verdict = monitor.finish(cfg);
  res.stats = monitor.stats();
  res.final_cfg = std::move(cfg);
  return res;
}

}  // namespace snapfwd
