#ifndef UAVCOV_BASELINES_HPP
#define UAVCOV_BASELINES_HPP

#include "uavcov/env.hpp"
#include "uavcov/radio.hpp"
#include "uavcov/scenario.hpp"

#include <cstddef>
#include <vector>

namespace uavcov::baselines {

struct RunConfig {
    ScenarioConfig scenario;
    env::EnvVariant variant;
};

// The bit-oriented learner variant: identical dynamics, reward switched to
// the normalized rate sum, shared-coverage element dropped from observations.
RunConfig bo_configure(const RunConfig& base);

// Centralized greedy heuristic: channels in index order; each channel goes to
// the UAV with the highest gain to its own BS among those whose remaining
// budget admits the smallest nonzero level (ties to the lowest index), at the
// largest level within the remaining budget.
radio::PowerAllocation hu_allocate(const radio::PathGainTable& gains,
                                   const std::vector<std::size_t>& assoc,
                                   const std::vector<double>& levels, double power_min,
                                   double power_max, std::size_t channels);

struct OracleResult {
    std::vector<std::size_t> actions; // per-UAV action indices
    double reward = 0.0;
};

// Exhaustive search over all joint actions for the best per-slot semantic
// reward; ties break to the lexicographically smallest joint index vector.
// Throws if |actions|^N exceeds 1e6.
OracleResult oracle_allocate(const env::SlotSnapshot& snap, const env::ActionSet& actions);

// Exact action indices of a feasible allocation (every per-UAV tuple must be
// a member of the action set).
std::vector<std::size_t> indices_for_allocation(const env::ActionSet& actions,
                                                const radio::PowerAllocation& alloc);

// Runs the heuristic through complete episodes; returns per-episode semantic
// objectives.
std::vector<double> hu_episode_objectives(const ScenarioConfig& scenario, std::size_t episodes);

} // namespace uavcov::baselines

#endif
