#include "uavcov/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace uavcov {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void append_list(std::ostringstream& oss, const char* key, const std::vector<double>& values) {
    oss << key << "=";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) oss << ",";
        oss << fmt_double(values[i]);
    }
    oss << "\n";
}

void append_pairs(std::ostringstream& oss, const char* key,
                  const std::vector<std::pair<double, double>>& values) {
    oss << key << "=";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) oss << ",";
        oss << fmt_double(values[i].first) << ":" << fmt_double(values[i].second);
    }
    oss << "\n";
}

} // namespace

void ScenarioConfig::validate() const {
    if (!(area_side > 0.0)) throw std::invalid_argument("area_side must be positive");
    if (num_uavs < 1 || num_uavs > 64) throw std::invalid_argument("num_uavs must be in [1,64]");
    if (num_bs < 1) throw std::invalid_argument("num_bs must be at least 1");
    if (num_channels < 1) throw std::invalid_argument("num_channels must be at least 1");
    if (power_levels.empty()) throw std::invalid_argument("power_levels must be nonempty");
    for (double p : power_levels)
        if (p < 0.0) throw std::invalid_argument("power_levels must be nonnegative");
    if (power_min > power_max) throw std::invalid_argument("power_min exceeds power_max");
    if (!(noise > 0.0)) throw std::invalid_argument("noise must be positive");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!(uav_altitude > bs_altitude)) throw std::invalid_argument("uav_altitude must exceed bs_altitude");
    if (!(obs_side_min > 0.0) || obs_side_max < obs_side_min)
        throw std::invalid_argument("observation side range invalid");
    if (!(speed_min > 0.0) || speed_max < speed_min) throw std::invalid_argument("speed range invalid");
    if (!(speed_scale > 0.0)) throw std::invalid_argument("speed_scale must be positive");
    if (!(slot_duration > 0.0)) throw std::invalid_argument("slot_duration must be positive");
    if (steps_per_episode < 1) throw std::invalid_argument("steps_per_episode must be at least 1");
    if (history < 1) throw std::invalid_argument("history must be at least 1");
    auto check_n = [&](std::size_t n, const char* what) {
        if (n != 0 && n != num_uavs)
            throw std::invalid_argument(std::string(what) + " override must list one entry per UAV");
    };
    check_n(uav_sides.size(), "uav_sides");
    check_n(uav_speeds.size(), "uav_speeds");
    check_n(uav_centers.size(), "uav_centers");
    check_n(uav_phases.size(), "uav_phases");
    check_n(uav_directions.size(), "uav_directions");
    for (int d : uav_directions)
        if (d != 1 && d != -1) throw std::invalid_argument("uav_directions entries must be +1 or -1");
    if (!bs_positions.empty() && bs_positions.size() != num_bs)
        throw std::invalid_argument("bs_positions must list one entry per BS");
    if (!rate_thresholds.empty() && rate_thresholds.size() != 8)
        throw std::invalid_argument("rate_thresholds must list exactly 8 values");
}

std::vector<std::pair<double, double>> ScenarioConfig::effective_bs_positions() const {
    if (!bs_positions.empty()) return bs_positions;
    std::vector<std::pair<double, double>> out(num_bs);
    for (std::size_t k = 0; k < num_bs; ++k) {
        out[k] = {(2.0 * k + 1.0) / (2.0 * num_bs) * area_side, area_side / 2.0};
    }
    return out;
}

std::vector<double> ScenarioConfig::effective_rate_thresholds() const {
    return rate_thresholds.empty() ? quality::default_rate_thresholds() : rate_thresholds;
}

std::string ScenarioConfig::canonical_string() const {
    std::ostringstream oss;
    oss << "area_side=" << fmt_double(area_side) << "\n";
    oss << "num_uavs=" << num_uavs << "\n";
    oss << "num_bs=" << num_bs << "\n";
    oss << "num_channels=" << num_channels << "\n";
    append_list(oss, "power_levels", power_levels);
    oss << "power_min=" << fmt_double(power_min) << "\n";
    oss << "power_max=" << fmt_double(power_max) << "\n";
    oss << "noise=" << fmt_double(noise) << "\n";
    oss << "alpha=" << fmt_double(alpha) << "\n";
    oss << "uav_altitude=" << fmt_double(uav_altitude) << "\n";
    oss << "bs_altitude=" << fmt_double(bs_altitude) << "\n";
    append_pairs(oss, "bs_positions", bs_positions);
    oss << "obs_side_min=" << fmt_double(obs_side_min) << "\n";
    oss << "obs_side_max=" << fmt_double(obs_side_max) << "\n";
    oss << "speed_min=" << fmt_double(speed_min) << "\n";
    oss << "speed_max=" << fmt_double(speed_max) << "\n";
    oss << "speed_scale=" << fmt_double(speed_scale) << "\n";
    oss << "slot_duration=" << fmt_double(slot_duration) << "\n";
    oss << "steps_per_episode=" << steps_per_episode << "\n";
    oss << "history=" << history << "\n";
    oss << "master_seed=" << master_seed << "\n";
    append_list(oss, "uav_sides", uav_sides);
    append_list(oss, "uav_speeds", uav_speeds);
    append_pairs(oss, "uav_centers", uav_centers);
    append_list(oss, "uav_phases", uav_phases);
    oss << "uav_directions=";
    for (std::size_t i = 0; i < uav_directions.size(); ++i) {
        if (i) oss << ",";
        oss << uav_directions[i];
    }
    oss << "\n";
    oss << "metric=" << quality::metric_name(metric) << "\n";
    oss << "psnr_cap=" << fmt_double(psnr_cap) << "\n";
    append_list(oss, "rate_thresholds", rate_thresholds);
    oss << "image=" << image << "\n";
    return oss.str();
}

std::uint64_t ScenarioConfig::config_hash() const {
    const std::string text = canonical_string();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace uavcov
