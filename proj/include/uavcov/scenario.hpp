#ifndef UAVCOV_SCENARIO_HPP
#define UAVCOV_SCENARIO_HPP

#include "uavcov/quality.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace uavcov {

// Full description of one simulated system.  Optional per-UAV overrides pin
// the kinematics for constructed test scenarios; empty vectors mean "sample
// from the configured ranges".
struct ScenarioConfig {
    double area_side = 100.0;
    std::size_t num_uavs = 8;
    std::size_t num_bs = 2;
    std::size_t num_channels = 3;
    std::vector<double> power_levels = {0.0, 5.0, 10.0}; // watts
    double power_min = 0.0;
    double power_max = 10.0;
    double noise = 1e-9; // watts
    double alpha = 2.0;
    double uav_altitude = 20.0;
    double bs_altitude = 0.0;
    std::vector<std::pair<double, double>> bs_positions; // empty -> evenly spaced defaults

    double obs_side_min = 20.0;
    double obs_side_max = 40.0;
    double speed_min = 10.0;
    double speed_max = 20.0;
    double speed_scale = 1.0;
    double slot_duration = 0.1; // seconds
    std::size_t steps_per_episode = 100;
    std::size_t history = 4;
    std::uint64_t master_seed = 1;

    std::vector<double> uav_sides;
    std::vector<double> uav_speeds;
    std::vector<std::pair<double, double>> uav_centers;
    std::vector<double> uav_phases;
    std::vector<int> uav_directions; // +1 / -1

    quality::Metric metric = quality::Metric::Psnr;
    double psnr_cap = quality::kDefaultPsnrCap;
    std::vector<double> rate_thresholds; // empty -> defaults
    std::string image = "gradient";      // builtin name or PGM path

    // Throws std::invalid_argument with the offending field on violation.
    void validate() const;

    // BS positions, substituting the evenly spaced defaults when unset:
    // x = (2k+1)/(2B) * side, y = side/2.
    std::vector<std::pair<double, double>> effective_bs_positions() const;

    std::vector<double> effective_rate_thresholds() const;

    // Stable textual form of every field, one key=value per line; the basis
    // of the checkpoint compatibility hash.
    std::string canonical_string() const;
    std::uint64_t config_hash() const;
};

} // namespace uavcov

#endif
