#include "uavcov/env.hpp"

#include "uavcov/pgm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace uavcov::env {

ActionSet enumerate_actions(const std::vector<double>& levels, std::size_t channels,
                            double power_min, double power_max) {
    if (levels.empty()) throw std::invalid_argument("enumerate_actions: empty level set");
    ActionSet set;
    std::vector<std::size_t> idx(channels, 0);
    while (true) {
        double total = 0.0;
        for (std::size_t c = 0; c < channels; ++c) total += levels[idx[c]];
        if (total >= power_min && total <= power_max) {
            std::vector<double> tuple(channels);
            for (std::size_t c = 0; c < channels; ++c) tuple[c] = levels[idx[c]];
            set.tuples.push_back(std::move(tuple));
        }
        // Odometer over level indices, last channel fastest: lexicographic order.
        std::size_t c = channels;
        while (c > 0) {
            --c;
            if (++idx[c] < levels.size()) break;
            idx[c] = 0;
            if (c == 0) {
                if (set.tuples.empty()) throw std::invalid_argument("infeasible power constraints");
                return set;
            }
        }
    }
}

radio::PowerAllocation allocation_from_actions(const ActionSet& actions,
                                               const std::vector<std::size_t>& action_indices) {
    radio::PowerAllocation alloc;
    alloc.powers.resize(action_indices.size());
    for (std::size_t i = 0; i < action_indices.size(); ++i) {
        if (action_indices[i] >= actions.size())
            throw std::out_of_range("invalid action index");
        alloc.powers[i] = actions.tuples[action_indices[i]];
    }
    return alloc;
}

radio::RateVector slot_rates(const SlotSnapshot& snap, const radio::PowerAllocation& alloc) {
    return radio::rates(alloc, snap.gains, snap.assoc, snap.noise);
}

double semantic_slot_reward(const SlotSnapshot& snap, const radio::RateVector& rates) {
    std::vector<double> qualities(rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i)
        qualities[i] = quality::map_rate_to_quality(snap.model, rates[i], snap.sides[i]);
    double weighted = 0.0;
    double total_area = 0.0;
    for (const auto& seg : snap.decomposition.segments) {
        double best = 0.0;
        std::uint64_t members = seg.members;
        while (members) {
            const int i = std::countr_zero(members);
            members &= members - 1;
            best = std::max(best, qualities[static_cast<std::size_t>(i)]);
        }
        weighted += seg.area * best;
        total_area += seg.area;
    }
    return weighted / total_area;
}

double bitrate_slot_reward(const radio::RateVector& rates, double rate_upper_bound) {
    double total = 0.0;
    for (double r : rates) total += r;
    return total / (static_cast<double>(rates.size()) * rate_upper_bound);
}

double semantic_objective(const std::vector<double>& slot_rewards) {
    if (slot_rewards.empty()) throw std::invalid_argument("semantic_objective: empty trace");
    double total = 0.0;
    for (double r : slot_rewards) total += r;
    return total / static_cast<double>(slot_rewards.size());
}

Environment::Environment(ScenarioConfig config, EnvVariant variant)
    : config_(std::move(config)), variant_(variant) {
    config_.validate();
    actions_ = enumerate_actions(config_.power_levels, config_.num_channels, config_.power_min,
                                 config_.power_max);
    kinematics_ = build_kinematics(config_);
    model_ = quality::build_quality_model(img::load_image_ref(config_.image), config_.metric,
                                          config_.psnr_cap, config_.effective_rate_thresholds());
    frame_width_ = config_.num_bs + (variant_.include_shared_coverage ? 3 : 2);
    max_gain_ = std::pow(config_.uav_altitude - config_.bs_altitude, -config_.alpha);
    rate_upper_bound_ = static_cast<double>(config_.num_channels) *
                        std::log2(1.0 + config_.power_max * max_gain_ / config_.noise);
    for (const auto& [x, y] : config_.effective_bs_positions())
        bs_positions_.push_back({x, y, config_.bs_altitude});
    reset();
}

void Environment::compute_slot_state() {
    const double time = static_cast<double>(step_index_) * config_.slot_duration;
    positions_.resize(config_.num_uavs);
    std::vector<geometry::ObservationSquare> squares(config_.num_uavs);
    for (std::size_t i = 0; i < config_.num_uavs; ++i) {
        const auto& circ = kinematics_.circles[i];
        positions_[i] = {circ.x_at(time), circ.y_at(time), config_.uav_altitude};
        squares[i] = {i, positions_[i].x, positions_[i].y, kinematics_.sides[i]};
    }
    gains_ = radio::build_gain_table(positions_, bs_positions_, config_.alpha);
    assoc_ = radio::associate_all(gains_);
    decomposition_ = geometry::decompose(squares);
    shared_degree_.resize(config_.num_uavs);
    for (std::size_t i = 0; i < config_.num_uavs; ++i)
        shared_degree_[i] = geometry::shared_coverage_degree(i, decomposition_, kinematics_.sides[i]);
}

void Environment::append_frames() {
    for (std::size_t i = 0; i < config_.num_uavs; ++i) {
        auto& h = history_[i];
        // Drop the oldest frame, then stamp the current one at the end.
        std::copy(h.begin() + static_cast<std::ptrdiff_t>(frame_width_), h.end(), h.begin());
        double* frame = h.data() + (config_.history - 1) * frame_width_;
        std::size_t k = 0;
        for (std::size_t b = 0; b < config_.num_bs; ++b) frame[k++] = gains_.gains[i][b] / max_gain_;
        if (variant_.include_shared_coverage)
            frame[k++] = shared_degree_[i] / static_cast<double>(config_.num_uavs);
        frame[k++] = positions_[i].x / config_.area_side;
        frame[k++] = positions_[i].y / config_.area_side;
    }
}

std::vector<std::vector<double>> Environment::observations() const {
    return history_;
}

std::vector<std::vector<double>> Environment::reset() {
    step_index_ = 0;
    compute_slot_state();
    history_.assign(config_.num_uavs, std::vector<double>(obs_size(), 0.0));
    append_frames();
    return observations();
}

StepResult Environment::step(const std::vector<std::size_t>& action_indices) {
    if (action_indices.size() != config_.num_uavs)
        throw std::invalid_argument("step: one action index per UAV required");
    const radio::PowerAllocation alloc = allocation_from_actions(actions_, action_indices);

    StepResult result;
    result.rates = radio::rates(alloc, gains_, assoc_, config_.noise);
    const SlotSnapshot snap = snapshot();
    result.semantic_reward = semantic_slot_reward(snap, result.rates);
    result.reward = variant_.reward == RewardKind::Semantic
                        ? result.semantic_reward
                        : bitrate_slot_reward(result.rates, rate_upper_bound_);

    ++step_index_;
    compute_slot_state();
    append_frames();
    result.next_obs = observations();
    result.done = step_index_ >= config_.steps_per_episode;
    return result;
}

SlotSnapshot Environment::snapshot() const {
    SlotSnapshot snap;
    snap.uav_positions = positions_;
    snap.sides = kinematics_.sides;
    snap.gains = gains_;
    snap.assoc = assoc_;
    snap.decomposition = decomposition_;
    snap.noise = config_.noise;
    snap.model = model_;
    return snap;
}

} // namespace uavcov::env
