#include "uitrust/harness/sweep.hpp"

#include "uitrust/harness/simulation.hpp"

namespace uitrust::harness {

std::vector<MetricsReport> run_sweep(const SweepPlan& plan, const std::function<void(const MetricsReport&)>& on_run) {
    if (plan.seeds == 0 || plan.ratios.empty() || plan.defenses.empty()) {
        throw ConfigError("sweep needs at least one seed, ratio and defense");
    }
    std::vector<MetricsReport> out;
    out.reserve(plan.seeds * plan.ratios.size() * plan.defenses.size());
    for (double ratio : plan.ratios) {
        for (Defense d : plan.defenses) {
            for (std::uint32_t s = 0; s < plan.seeds; ++s) {
                ScenarioConfig cfg = plan.base;
                cfg.sybil_ratio = ratio;
                cfg.defense = d;
                cfg.seed = plan.base.seed + s;
                cfg.validate();
                out.push_back(run_scenario(cfg));
                if (on_run) {
                    on_run(out.back());
                }
            }
        }
    }
    sort_reports(out);
    return out;
}

}  // namespace uitrust::harness
