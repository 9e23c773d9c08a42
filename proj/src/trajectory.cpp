#include "uavcov/trajectory.hpp"

#include "uavcov/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace uavcov {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double CircleTrajectory::x_at(double time) const {
    return center_x + radius * std::cos(phase0 + omega * time);
}

double CircleTrajectory::y_at(double time) const {
    return center_y + radius * std::sin(phase0 + omega * time);
}

Kinematics build_kinematics(const ScenarioConfig& config) {
    const double episode_seconds =
        static_cast<double>(config.steps_per_episode) * config.slot_duration;
    Kinematics kin;
    kin.sides.resize(config.num_uavs);
    kin.speeds.resize(config.num_uavs);
    kin.circles.resize(config.num_uavs);

    for (std::size_t i = 0; i < config.num_uavs; ++i) {
        RngStream rng(config.master_seed, "uav/" + std::to_string(i));
        // Raw draws happen unconditionally and in a fixed order so explicit
        // overrides never shift another field's randomness.
        const double u_side = rng.next_double();
        const double u_speed = rng.next_double();
        const double u_phase = rng.next_double();
        const std::uint64_t u_dir = rng.next_below(2);
        const double u_cx = rng.next_double();
        const double u_cy = rng.next_double();

        const double side = config.uav_sides.empty()
                                ? config.obs_side_min + (config.obs_side_max - config.obs_side_min) * u_side
                                : config.uav_sides[i];
        const double speed = (config.uav_speeds.empty()
                                  ? config.speed_min + (config.speed_max - config.speed_min) * u_speed
                                  : config.uav_speeds[i]) *
                             config.speed_scale;

        CircleTrajectory circ;
        circ.radius = std::min(speed * episode_seconds / kTwoPi,
                               std::max(config.area_side / 2.0 - 1.0, 0.0));
        const int dir = config.uav_directions.empty() ? (u_dir == 0 ? 1 : -1) : config.uav_directions[i];
        circ.omega = dir * kTwoPi / episode_seconds;
        circ.phase0 = config.uav_phases.empty() ? u_phase * kTwoPi : config.uav_phases[i];
        if (config.uav_centers.empty()) {
            const double span = std::max(config.area_side - 2.0 * circ.radius, 0.0);
            circ.center_x = circ.radius + u_cx * span;
            circ.center_y = circ.radius + u_cy * span;
        } else {
            circ.center_x = config.uav_centers[i].first;
            circ.center_y = config.uav_centers[i].second;
        }

        kin.sides[i] = side;
        kin.speeds[i] = speed;
        kin.circles[i] = circ;
    }
    return kin;
}

} // namespace uavcov
