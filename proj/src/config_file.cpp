#include "uavcov/config_file.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace uavcov::cfg {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw std::invalid_argument("config key " + key + ": not a number: " + value);
    return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        throw std::invalid_argument("config key " + key + ": not an integer: " + value);
    return v;
}

std::vector<std::string> split(const std::string& value, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream iss(value);
    while (std::getline(iss, item, sep)) out.push_back(trim(item));
    if (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

std::vector<double> to_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split(value, ',')) out.push_back(to_double(key, item));
    return out;
}

std::vector<std::uint64_t> to_u64_list(const std::string& key, const std::string& value) {
    std::vector<std::uint64_t> out;
    for (const auto& item : split(value, ',')) out.push_back(to_u64(key, item));
    return out;
}

std::vector<std::size_t> to_size_list(const std::string& key, const std::string& value) {
    std::vector<std::size_t> out;
    for (const auto& item : split(value, ',')) out.push_back(to_u64(key, item));
    return out;
}

std::vector<int> to_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    for (const auto& item : split(value, ',')) {
        char* end = nullptr;
        const long v = std::strtol(item.c_str(), &end, 10);
        if (end == item.c_str() || *end != '\0')
            throw std::invalid_argument("config key " + key + ": not an integer: " + item);
        out.push_back(static_cast<int>(v));
    }
    return out;
}

// "x:y,x:y" pairs.
std::vector<std::pair<double, double>> to_pair_list(const std::string& key,
                                                    const std::string& value) {
    std::vector<std::pair<double, double>> out;
    for (const auto& item : split(value, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("config key " + key + ": expected x:y pair, got " + item);
        out.push_back({to_double(key, trim(item.substr(0, colon))),
                       to_double(key, trim(item.substr(colon + 1)))});
    }
    return out;
}

} // namespace

RunSettings parse_run_settings(const std::string& text) {
    RunSettings rs;
    ScenarioConfig& sc = rs.scenario;
    marl::TrainingConfig& tc = rs.training;

    using Handler = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Handler> handlers = {
        {"area_side", [&](const std::string& k, const std::string& v) { sc.area_side = to_double(k, v); }},
        {"num_uavs", [&](const std::string& k, const std::string& v) { sc.num_uavs = to_u64(k, v); }},
        {"num_bs", [&](const std::string& k, const std::string& v) { sc.num_bs = to_u64(k, v); }},
        {"num_channels", [&](const std::string& k, const std::string& v) { sc.num_channels = to_u64(k, v); }},
        {"power_levels", [&](const std::string& k, const std::string& v) { sc.power_levels = to_double_list(k, v); }},
        {"power_min", [&](const std::string& k, const std::string& v) { sc.power_min = to_double(k, v); }},
        {"power_max", [&](const std::string& k, const std::string& v) { sc.power_max = to_double(k, v); }},
        {"noise", [&](const std::string& k, const std::string& v) { sc.noise = to_double(k, v); }},
        {"alpha", [&](const std::string& k, const std::string& v) { sc.alpha = to_double(k, v); }},
        {"uav_altitude", [&](const std::string& k, const std::string& v) { sc.uav_altitude = to_double(k, v); }},
        {"bs_altitude", [&](const std::string& k, const std::string& v) { sc.bs_altitude = to_double(k, v); }},
        {"bs_positions", [&](const std::string& k, const std::string& v) { sc.bs_positions = to_pair_list(k, v); }},
        {"obs_side_min", [&](const std::string& k, const std::string& v) { sc.obs_side_min = to_double(k, v); }},
        {"obs_side_max", [&](const std::string& k, const std::string& v) { sc.obs_side_max = to_double(k, v); }},
        {"speed_min", [&](const std::string& k, const std::string& v) { sc.speed_min = to_double(k, v); }},
        {"speed_max", [&](const std::string& k, const std::string& v) { sc.speed_max = to_double(k, v); }},
        {"speed_scale", [&](const std::string& k, const std::string& v) { sc.speed_scale = to_double(k, v); }},
        {"slot_duration", [&](const std::string& k, const std::string& v) { sc.slot_duration = to_double(k, v); }},
        {"steps_per_episode", [&](const std::string& k, const std::string& v) { sc.steps_per_episode = to_u64(k, v); }},
        {"history", [&](const std::string& k, const std::string& v) { sc.history = to_u64(k, v); }},
        {"seed", [&](const std::string& k, const std::string& v) { sc.master_seed = to_u64(k, v); }},
        {"uav_sides", [&](const std::string& k, const std::string& v) { sc.uav_sides = to_double_list(k, v); }},
        {"uav_speeds", [&](const std::string& k, const std::string& v) { sc.uav_speeds = to_double_list(k, v); }},
        {"uav_centers", [&](const std::string& k, const std::string& v) { sc.uav_centers = to_pair_list(k, v); }},
        {"uav_phases", [&](const std::string& k, const std::string& v) { sc.uav_phases = to_double_list(k, v); }},
        {"uav_directions", [&](const std::string& k, const std::string& v) { sc.uav_directions = to_int_list(k, v); }},
        {"metric", [&](const std::string&, const std::string& v) { sc.metric = quality::parse_metric(v); }},
        {"psnr_cap", [&](const std::string& k, const std::string& v) { sc.psnr_cap = to_double(k, v); }},
        {"rate_thresholds", [&](const std::string& k, const std::string& v) { sc.rate_thresholds = to_double_list(k, v); }},
        {"image", [&](const std::string&, const std::string& v) { sc.image = v; }},
        {"train_episodes", [&](const std::string& k, const std::string& v) { tc.train_episodes = to_u64(k, v); }},
        {"test_episodes", [&](const std::string& k, const std::string& v) { tc.test_episodes = to_u64(k, v); }},
        {"replay_capacity", [&](const std::string& k, const std::string& v) { tc.replay_capacity = to_u64(k, v); }},
        {"batch_size", [&](const std::string& k, const std::string& v) { tc.batch_size = to_u64(k, v); }},
        {"gamma", [&](const std::string& k, const std::string& v) { tc.gamma = to_double(k, v); }},
        {"learning_rate", [&](const std::string& k, const std::string& v) { tc.learning_rate = to_double(k, v); }},
        {"epsilon_start", [&](const std::string& k, const std::string& v) { tc.epsilon_start = to_double(k, v); }},
        {"epsilon_floor", [&](const std::string& k, const std::string& v) { tc.epsilon_floor = to_double(k, v); }},
        {"epsilon_decay", [&](const std::string& k, const std::string& v) { tc.epsilon_decay = to_double(k, v); }},
        {"target_sync_period", [&](const std::string& k, const std::string& v) { tc.target_sync_period = to_u64(k, v); }},
        {"lstm_units", [&](const std::string& k, const std::string& v) { tc.lstm_units = to_u64(k, v); }},
        {"dense_units", [&](const std::string& k, const std::string& v) { tc.dense_widths = to_size_list(k, v); }},
        {"method", [&](const std::string&, const std::string& v) { rs.method = v; }},
        {"sweep_variable", [&](const std::string&, const std::string& v) { rs.sweep_variable = v; }},
        {"sweep_values", [&](const std::string&, const std::string& v) { rs.sweep_values = split(v, ','); }},
        {"sweep_seeds", [&](const std::string& k, const std::string& v) { rs.sweep_seeds = to_u64_list(k, v); }},
        {"sweep_methods", [&](const std::string&, const std::string& v) { rs.sweep_methods = split(v, ','); }},
        {"sweep_images", [&](const std::string&, const std::string& v) { rs.sweep_images = split(v, ','); }},
        {"workers", [&](const std::string& k, const std::string& v) { rs.workers = to_u64(k, v); }},
    };

    std::istringstream iss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(iss, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value, got: " + t);
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const auto it = handlers.find(key);
        if (it == handlers.end()) throw std::invalid_argument("unknown config key: " + key);
        it->second(key, value);
    }
    return rs;
}

RunSettings load_run_settings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream oss;
    oss << in.rdbuf();
    return parse_run_settings(oss.str());
}

} // namespace uavcov::cfg
