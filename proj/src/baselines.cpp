#include "uavcov/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace uavcov::baselines {

RunConfig bo_configure(const RunConfig& base) {
    RunConfig out = base;
    out.variant.include_shared_coverage = false;
    out.variant.reward = env::RewardKind::BitRate;
    return out;
}

radio::PowerAllocation hu_allocate(const radio::PathGainTable& gains,
                                   const std::vector<std::size_t>& assoc,
                                   const std::vector<double>& levels, double power_min,
                                   double power_max, std::size_t channels) {
    const std::size_t n = gains.num_uavs();
    double smallest_nonzero = std::numeric_limits<double>::infinity();
    for (double lv : levels)
        if (lv > 0.0) smallest_nonzero = std::min(smallest_nonzero, lv);

    radio::PowerAllocation alloc;
    alloc.powers.assign(n, std::vector<double>(channels, 0.0));
    std::vector<double> budget(n, power_max);
    for (std::size_t c = 0; c < channels; ++c) {
        std::size_t winner = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (budget[i] < smallest_nonzero) continue;
            if (winner == n || gains.gains[i][assoc[i]] > gains.gains[winner][assoc[winner]])
                winner = i;
        }
        if (winner == n) continue; // every budget exhausted
        double level = 0.0;
        for (double lv : levels)
            if (lv <= budget[winner]) level = std::max(level, lv);
        alloc.powers[winner][c] = level;
        budget[winner] -= level;
    }
    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (double p : alloc.powers[i]) total += p;
        if (total < power_min) throw std::runtime_error("heuristic infeasible under P_min");
    }
    return alloc;
}

OracleResult oracle_allocate(const env::SlotSnapshot& snap, const env::ActionSet& actions) {
    const std::size_t n = snap.gains.num_uavs();
    const std::size_t a_count = actions.size();
    double space = 1.0;
    for (std::size_t i = 0; i < n; ++i) space *= static_cast<double>(a_count);
    if (space > 1e6) {
        std::ostringstream oss;
        oss << "oracle search space too large: " << space << " joint actions";
        throw std::runtime_error(oss.str());
    }

    OracleResult best;
    best.actions.assign(n, 0);
    best.reward = -1.0;
    std::vector<std::size_t> idx(n, 0);
    radio::PowerAllocation alloc;
    alloc.powers.resize(n);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) alloc.powers[i] = actions.tuples[idx[i]];
        const radio::RateVector rates = env::slot_rates(snap, alloc);
        const double reward = env::semantic_slot_reward(snap, rates);
        // Strict improvement keeps the lexicographically smallest argmax.
        if (reward > best.reward) {
            best.reward = reward;
            best.actions = idx;
        }
        std::size_t k = n;
        bool carry_out = true;
        while (k > 0) {
            --k;
            if (++idx[k] < a_count) {
                carry_out = false;
                break;
            }
            idx[k] = 0;
        }
        if (carry_out) break;
    }
    return best;
}

std::vector<std::size_t> indices_for_allocation(const env::ActionSet& actions,
                                                const radio::PowerAllocation& alloc) {
    std::vector<std::size_t> out(alloc.num_uavs());
    for (std::size_t i = 0; i < alloc.num_uavs(); ++i) {
        bool found = false;
        for (std::size_t a = 0; a < actions.size(); ++a) {
            if (actions.tuples[a] == alloc.powers[i]) {
                out[i] = a;
                found = true;
                break;
            }
        }
        if (!found) throw std::logic_error("allocation not present in the action set");
    }
    return out;
}

std::vector<double> hu_episode_objectives(const ScenarioConfig& scenario, std::size_t episodes) {
    env::Environment environment(scenario, env::EnvVariant{});
    std::vector<double> objectives;
    objectives.reserve(episodes);
    for (std::size_t e = 0; e < episodes; ++e) {
        environment.reset();
        double semantic_sum = 0.0;
        for (std::size_t t = 0; t < scenario.steps_per_episode; ++t) {
            const env::SlotSnapshot snap = environment.snapshot();
            const radio::PowerAllocation alloc =
                hu_allocate(snap.gains, snap.assoc, scenario.power_levels, scenario.power_min,
                            scenario.power_max, scenario.num_channels);
            const auto idx = indices_for_allocation(environment.actions(), alloc);
            semantic_sum += environment.step(idx).semantic_reward;
        }
        objectives.push_back(semantic_sum / static_cast<double>(scenario.steps_per_episode));
    }
    return objectives;
}

} // namespace uavcov::baselines
