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

#include "snapfwd/daemon.hpp"

#include <algorithm>
#include <array>

#include "snapfwd/routing.hpp"

namespace snapfwd {

namespace {

constexpr std::array<std::string_view, 4> kStrategyNames = {"SYNC", "RANDOM_FAIR",
                                                            "ADVERSARY", "REPLAY"};
constexpr std::array<std::string_view, 4> kTopologyNames = {"leave", "detach", "join_right",
                                                            "join_left"};

}  // namespace

std::string_view to_string(Strategy s) { return kStrategyNames[static_cast<size_t>(s)]; }

std::optional<Strategy> parse_strategy(std::string_view s) {
  for (size_t i = 0; i < kStrategyNames.size(); ++i) {
    if (kStrategyNames[i] == s) return static_cast<Strategy>(i);
  }
  return std::nullopt;
}

std::string_view to_string(TopologyOp op) { return kTopologyNames[static_cast<size_t>(op)]; }

void StepReport::clear() {
  step = 0;
  enabled.clear();
  selected.clear();
  fired.clear();
  events.clear();
  injections.clear();
  topology.clear();
  hash = 0;
  terminal = false;
}

void StepExecutor::evaluate(const Configuration& cfg) {
  const int n = cfg.n;
  pif_.resize(n);
  rules_.resize(n);
  enabled_.assign(n, 0);
  enabled_nodes_.clear();
  for (NodeId p = 0; p < n; ++p) {
    pif_[p] = enabled_pif(p, cfg);
    rules_[p] = enabled_rules(p, cfg, opts_, pif_[p]);
    if (!pif_[p].empty() || !rules_[p].empty()) {
      enabled_[p] = 1;
      enabled_nodes_.push_back(p);
    }
  }
}

void StepExecutor::fire(const Configuration& snap, const std::vector<NodeId>& selected,
                        Configuration& next, StepReport& report) {
  next = snap;
  report.enabled = enabled_nodes_;
  report.selected = selected;
  report.terminal = selected.empty();
  for (NodeId p : selected) {
    if (p < 0 || p >= snap.n || !enabled_[p]) {
      throw ModelError("selected node " + std::to_string(p) + " is not enabled");
    }
    if (auto a = firing_pif(pif_[p])) {
      apply_pif_unchecked(p, *a, next);
      report.fired.push_back({p, true, a->action, Rule::kR1, a->neighbor});
    }
    const RuleSet chosen = select_rules(p, rules_[p], snap, next.fair_ptr);
    for (const RuleFiring& r : chosen) {
      apply_rule_unchecked(p, r, snap, next, opts_, report.events);
      report.fired.push_back({p, false, PifAction::kBInitiator, r.rule, r.link});
    }
  }
  if (!report.terminal) stabilizer_tick(next);
}

Daemon::Daemon(Schedule sched, int n)
    : sched_(std::move(sched)),
      n_(n),
      bound_(sched_.fairness_bound > 0 ? sched_.fairness_bound : 2 * n),
      rng_(sched_.seed),
      age_(n, 0) {}

void Daemon::resize(int n) {
  n_ = n;
  if (sched_.fairness_bound <= 0) bound_ = 2 * n;
  age_.assign(n, 0);
  victims_.clear();
  victims_since_ = -1;
}

void Daemon::idle() { std::fill(age_.begin(), age_.end(), 0); }

bool Daemon::replay_exhausted(std::int64_t step) const {
  return sched_.strategy == Strategy::kReplay &&
         step >= static_cast<std::int64_t>(sched_.replay.size());
}

int Daemon::max_age() const {
  int m = 0;
  for (int a : age_) m = std::max(m, a);
  return m;
}

const std::vector<NodeId>& Daemon::select(const std::vector<NodeId>& enabled,
                                          std::int64_t step) {
  out_.clear();
  std::vector<char>& pick = pick_;
  pick.assign(n_, 0);
  for (NodeId p : enabled) {
    if (age_[p] >= bound_ - 1) pick[p] = 1;
  }

  switch (sched_.strategy) {
    case Strategy::kSync:
      for (NodeId p : enabled) pick[p] = 1;
      break;
    case Strategy::kRandomFair: {
      bool any = false;
      for (NodeId p : enabled) {
        if (coin()) pick[p] = 1;
        any = any || pick[p];
      }
      if (!any) pick[enabled[below(enabled.size())]] = 1;
      break;
    }
    case Strategy::kAdversary: {
      if (victims_since_ < 0 || step - victims_since_ >= 4 * n_) {
        victims_ = {kP0};
        if (n_ > 1) victims_.push_back(1 + static_cast<NodeId>(below(n_ - 1)));
        victims_since_ = step;
      }
      others_.clear();
      for (NodeId p : enabled) {
        if (std::find(victims_.begin(), victims_.end(), p) == victims_.end()) {
          others_.push_back(p);
        }
      }
      if (!others_.empty()) {
        if (below(4) != 0) {
          pick[others_[below(others_.size())]] = 1;
        } else {
          bool any = false;
          for (NodeId p : others_) {
            if (coin()) pick[p] = 1;
            any = any || pick[p];
          }
          if (!any) pick[others_[below(others_.size())]] = 1;
        }
      } else {
        NodeId oldest = enabled.front();
        for (NodeId p : enabled) {
          if (age_[p] > age_[oldest]) oldest = p;
        }
        pick[oldest] = 1;
      }
      break;
    }
    case Strategy::kReplay: {
      if (step < 0 || step >= static_cast<std::int64_t>(sched_.replay.size())) {
        throw ModelError("replay schedule exhausted at step " + std::to_string(step));
      }
      std::fill(pick.begin(), pick.end(), 0);
      for (NodeId p : sched_.replay[step]) {
        if (p < 0 || p >= n_) throw ModelError("replay selects an unknown node");
        pick[p] = 1;
      }
      break;
    }
  }

  enabled_.assign(n_, 0);
  for (NodeId p : enabled) enabled_[p] = 1;
  for (NodeId p = 0; p < n_; ++p) {
    if (pick[p]) out_.push_back(p);
    age_[p] = (enabled_[p] && !pick[p]) ? age_[p] + 1 : 0;
  }
  return out_;
}

}  // namespace snapfwd
