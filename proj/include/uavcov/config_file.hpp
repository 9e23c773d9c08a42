#ifndef UAVCOV_CONFIG_FILE_HPP
#define UAVCOV_CONFIG_FILE_HPP

#include "uavcov/scenario.hpp"
#include "uavcov/trainer.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace uavcov::cfg {

// Everything a run or sweep needs, read from one flat key=value file.
struct RunSettings {
    ScenarioConfig scenario;
    marl::TrainingConfig training;
    std::string method = "sama"; // sama | bo | hu

    std::string sweep_variable; // channels | uavs | velocity-scale | reward-metric
    std::vector<std::string> sweep_values;
    std::vector<std::uint64_t> sweep_seeds;
    std::vector<std::string> sweep_methods;
    std::vector<std::string> sweep_images;
    std::size_t workers = 1;
};

// Parses flat key=value text: '#' lines are comments, blank lines ignored,
// later duplicates win, unknown keys are errors.
RunSettings parse_run_settings(const std::string& text);

RunSettings load_run_settings(const std::string& path);

} // namespace uavcov::cfg

#endif
