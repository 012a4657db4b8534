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

#include "snapfwd/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace snapfwd {

std::int64_t campaign_size(const CampaignSpec& spec) {
  return static_cast<std::int64_t>(spec.sizes.size()) *
         static_cast<std::int64_t>(spec.profiles.size()) *
         static_cast<std::int64_t>(spec.strategies.size()) * spec.runs;
}

RunConfig campaign_run_config(const CampaignSpec& spec, std::int64_t index) {
  RunConfig rc = spec.base;
  std::int64_t i = index;
  const std::int64_t seed_index = i % spec.runs;
  i /= spec.runs;
  rc.strategy = spec.strategies[i % spec.strategies.size()];
  i /= static_cast<std::int64_t>(spec.strategies.size());
  rc.profile = spec.profiles[i % spec.profiles.size()];
  i /= static_cast<std::int64_t>(spec.profiles.size());
  rc.n = spec.sizes[i];
  rc.seed = spec.base_seed + static_cast<std::uint64_t>(seed_index);
  return rc;
}

namespace {

void merge(CampaignSummary& sum, const RunOutcome& o, int keep) {
  ++sum.runs;
  sum.steps += o.steps;
  switch (o.verdict.status) {
    case Status::kPass: ++sum.passed; break;
    case Status::kFail: ++sum.failed; break;
    case Status::kInconclusive: ++sum.inconclusive; break;
  }
  std::array<bool, kPropertyCount> hit{};
  for (const Violation& v : o.verdict.violations) hit[static_cast<int>(v.property)] = true;
  for (int p = 0; p < kPropertyCount; ++p) sum.runs_violating[p] += hit[p];

  MonitorStats& w = sum.worst;
  const MonitorStats& s = o.stats;
  w.generated += s.generated;
  w.delivered_valid += s.delivered_valid;
  w.delivered_invalid += s.delivered_invalid;
  w.deleted_invalid += s.deleted_invalid;
  w.sanctioned_deletions += s.sanctioned_deletions;
  w.waves += s.waves;
  w.route_changes += s.route_changes;
  w.max_generation_wait = std::max(w.max_generation_wait, s.max_generation_wait);
  w.max_delivery_latency = std::max(w.max_delivery_latency, s.max_delivery_latency);
  w.max_ext_stretch = std::max(w.max_ext_stretch, s.max_ext_stretch);
  w.max_wave_length = std::max(w.max_wave_length, s.max_wave_length);
  w.max_parked = std::max(w.max_parked, s.max_parked);
  if (s.suitable_onset) {
    w.suitable_onset = std::max(w.suitable_onset.value_or(0), *s.suitable_onset);
  }
  auto& inv = sum.max_invalid_deliveries[o.config.n];
  inv = std::max(inv, s.delivered_invalid);

  if (o.verdict.status == Status::kFail && static_cast<int>(sum.failures.size()) < keep) {
    sum.failures.push_back(o);
  }
}

}  // namespace

CampaignSummary run_campaign(const CampaignSpec& spec, int workers,
                             const std::function<void(const RunOutcome&)>& on_run,
                             int max_failures_kept) {
  CampaignSummary sum;
  const std::int64_t total = campaign_size(spec);
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      if (stop.load()) return;
      const std::int64_t i = next.fetch_add(1);
      if (i >= total) return;
      RunOutcome o;
      o.index = i;
      o.config = campaign_run_config(spec, i);
      try {
        RunResult r = run(o.config);
        o.verdict = std::move(r.verdict);
        o.stats = r.stats;
        o.steps = r.steps;
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
        stop = true;
        return;
      }
      std::lock_guard<std::mutex> lock(mu);
      merge(sum, o, max_failures_kept);
      if (on_run) on_run(o);
      if (spec.stop_at_first_fail && o.verdict.status == Status::kFail) stop = true;
      if (spec.stop_when && spec.stop_when(o)) stop = true;
    }
  };

  const int k = std::max(1, workers);
  if (k == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  std::sort(sum.failures.begin(), sum.failures.end(),
            [](const RunOutcome& a, const RunOutcome& b) { return a.index < b.index; });
  return sum;
}

}  // namespace snapfwd
