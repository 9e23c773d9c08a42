#ifndef UAVCOV_ENV_HPP
#define UAVCOV_ENV_HPP

#include "uavcov/geometry.hpp"
#include "uavcov/quality.hpp"
#include "uavcov/radio.hpp"
#include "uavcov/scenario.hpp"
#include "uavcov/trajectory.hpp"

#include <cstddef>
#include <vector>

namespace uavcov::env {

// All per-UAV power tuples over the discrete level set satisfying
// P_min <= sum <= P_max, in lexicographic order of level indices.
struct ActionSet {
    std::vector<std::vector<double>> tuples;

    std::size_t size() const { return tuples.size(); }
};

ActionSet enumerate_actions(const std::vector<double>& levels, std::size_t channels,
                            double power_min, double power_max);

enum class RewardKind { Semantic, BitRate };

struct EnvVariant {
    bool include_shared_coverage = true;
    RewardKind reward = RewardKind::Semantic;
};

// Everything needed to score any joint action at one time slot without
// advancing the environment.  Self-contained by value.
struct SlotSnapshot {
    std::vector<radio::Position3D> uav_positions;
    std::vector<double> sides;
    radio::PathGainTable gains;
    std::vector<std::size_t> assoc;
    geometry::SegmentDecomposition decomposition;
    double noise = 0.0;
    quality::QualityModel model;
};

radio::PowerAllocation allocation_from_actions(const ActionSet& actions,
                                               const std::vector<std::size_t>& action_indices);

radio::RateVector slot_rates(const SlotSnapshot& snap, const radio::PowerAllocation& alloc);

// Area-weighted best-member quality over the segment decomposition,
// normalized by the union area; lies in [0,1].
double semantic_slot_reward(const SlotSnapshot& snap, const radio::RateVector& rates);

// Mean of per-UAV rate / rate_upper_bound; lies in [0,1].
double bitrate_slot_reward(const radio::RateVector& rates, double rate_upper_bound);

struct StepResult {
    std::vector<std::vector<double>> next_obs; // per UAV, flattened H x frame_width
    double reward = 0.0;                       // the variant's training reward
    double semantic_reward = 0.0;              // always the semantic per-slot term
    radio::RateVector rates;
    bool done = false;
};

// Discrete-time environment over circular trajectories.  Kinematics are
// frozen for the lifetime of the instance; every episode replays the same
// deterministic motion.
class Environment {
public:
    Environment(ScenarioConfig config, EnvVariant variant);

    const ScenarioConfig& config() const { return config_; }
    const EnvVariant& variant() const { return variant_; }
    const ActionSet& actions() const { return actions_; }
    const Kinematics& kinematics() const { return kinematics_; }
    const quality::QualityModel& quality_model() const { return model_; }

    std::size_t frame_width() const { return frame_width_; }
    std::size_t obs_size() const { return frame_width_ * config_.history; }

    // Max feasible path gain (altitude gap)^(-alpha); the gain normalizer.
    double max_gain() const { return max_gain_; }
    // C * log2(1 + P_max * max_gain / noise); the BO reward normalizer.
    double rate_upper_bound() const { return rate_upper_bound_; }

    std::vector<std::vector<double>> reset();
    StepResult step(const std::vector<std::size_t>& action_indices);

    std::size_t current_step() const { return step_index_; }
    SlotSnapshot snapshot() const;

private:
    void compute_slot_state();
    void append_frames();
    std::vector<std::vector<double>> observations() const;

    ScenarioConfig config_;
    EnvVariant variant_;
    ActionSet actions_;
    Kinematics kinematics_;
    quality::QualityModel model_;
    std::size_t frame_width_ = 0;
    double max_gain_ = 0.0;
    double rate_upper_bound_ = 0.0;
    std::vector<radio::Position3D> bs_positions_;

    std::size_t step_index_ = 0;
    std::vector<radio::Position3D> positions_;
    radio::PathGainTable gains_;
    std::vector<std::size_t> assoc_;
    geometry::SegmentDecomposition decomposition_;
    std::vector<double> shared_degree_;
    std::vector<std::vector<double>> history_; // per UAV, H*frame_width, oldest first
};

// Mean per-slot semantic reward over an episode trace.
double semantic_objective(const std::vector<double>& slot_rewards);

} // namespace uavcov::env

#endif
