#ifndef UAVCOV_TRAJECTORY_HPP
#define UAVCOV_TRAJECTORY_HPP

#include "uavcov/scenario.hpp"

#include <vector>

namespace uavcov {

// One full circle per episode: radius = speed * T * dt / (2*pi) and
// |omega| = 2*pi / (T * dt); omega carries the direction sign.
struct CircleTrajectory {
    double center_x = 0.0;
    double center_y = 0.0;
    double radius = 0.0;
    double phase0 = 0.0;
    double omega = 0.0;

    double x_at(double time) const;
    double y_at(double time) const;
};

// Per-run frozen kinematics: observation square sides, speeds, and circular
// trajectories, sampled once from the master seed (one substream per UAV so
// changing the fleet size leaves other UAVs' draws intact), then overridden
// by any explicit per-UAV config entries.
struct Kinematics {
    std::vector<double> sides;
    std::vector<double> speeds;
    std::vector<CircleTrajectory> circles;
};

Kinematics build_kinematics(const ScenarioConfig& config);

} // namespace uavcov

#endif
