#pragma once

#include "uitrust/harness/config.hpp"
#include "uitrust/harness/metrics.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace uitrust::harness {

struct SweepPlan {
    ScenarioConfig base;
    std::uint32_t seeds = 1;  // seeds base.seed .. base.seed + seeds - 1
    std::vector<double> ratios;
    std::vector<Defense> defenses;
};

// Every (ratio, defense, seed) run, sorted by sort_reports. The callback,
// if set, is told about each finished run.
std::vector<MetricsReport> run_sweep(const SweepPlan& plan,
                                     const std::function<void(const MetricsReport&)>& on_run = {});

}  // namespace uitrust::harness
