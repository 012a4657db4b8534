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

#ifndef SNAPFWD_CAMPAIGN_HPP_
#define SNAPFWD_CAMPAIGN_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "snapfwd/faults.hpp"
#include "snapfwd/monitor.hpp"
#include "snapfwd/run.hpp"

namespace snapfwd {

struct RunOutcome {
  std::int64_t index = 0;  // position in the enumeration
  RunConfig config;
  Verdict verdict;
  MonitorStats stats;
  std::int64_t steps = 0;
};

/// Independent seeded runs over sizes x profiles x strategies.
struct CampaignSpec {
  std::vector<int> sizes;
  std::vector<Profile> profiles;
  std::vector<Strategy> strategies;
  int runs = 1;  // seeds per combination: base_seed, base_seed + 1, ...
  std::uint64_t base_seed = 1;
  RunConfig base;  // everything else; n, profile, strategy, seed overridden
  /// Stop handing out runs after the first failure.
  bool stop_at_first_fail = false;
  /// Same, for any run it returns true on.
  std::function<bool(const RunOutcome&)> stop_when;
};

struct CampaignSummary {
  std::int64_t runs = 0;
  std::int64_t passed = 0;
  std::int64_t failed = 0;
  std::int64_t inconclusive = 0;
  std::int64_t steps = 0;
  /// Runs with at least one violation of each property.
  std::array<std::int64_t, kPropertyCount> runs_violating{};
  /// Maxima over all runs (sums for the counters).
  MonitorStats worst;
  std::map<int, std::int64_t> max_invalid_deliveries;  // by chain length
  std::vector<RunOutcome> failures;  // ordered by index, capped
};

std::int64_t campaign_size(const CampaignSpec& spec);
RunConfig campaign_run_config(const CampaignSpec& spec, std::int64_t index);

/**
 * Runs the campaign on `workers` threads (at least one). `on_run` sees
 * every outcome, one call at a time, in completion order.
 */
CampaignSummary run_campaign(const CampaignSpec& spec, int workers,
                             const std::function<void(const RunOutcome&)>& on_run = {},
                             int max_failures_kept = 64);

}  // namespace snapfwd

#endif  // SNAPFWD_CAMPAIGN_HPP_
