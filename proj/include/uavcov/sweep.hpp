#ifndef UAVCOV_SWEEP_HPP
#define UAVCOV_SWEEP_HPP

#include "uavcov/config_file.hpp"
#include "uavcov/scenario.hpp"
#include "uavcov/trainer.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace uavcov::sweep {

struct SweepSpec {
    std::string variable; // channels | uavs | velocity-scale | reward-metric
    std::vector<std::string> values;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> methods; // sama | bo | hu
    std::vector<std::string> images;  // empty -> the base scenario's image
    std::size_t workers = 1;
};

SweepSpec sweep_spec_from_settings(const cfg::RunSettings& settings);

struct ResultRow {
    std::string method;
    std::string sweep_var;
    std::string sweep_value;
    std::uint64_t seed = 0;
    std::string image;
    double objective_mean = 0.0;
    double objective_std = 0.0;
    bool failed = false;
    std::string error;
};

// Runs every (method, value, image, seed) combination; independent runs may
// execute on worker threads, but rows always come back in generation order.
// A failed run produces a row flagged with its error instead of aborting the
// sweep.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, const ScenarioConfig& base,
                                 const marl::TrainingConfig& training);

// Fixed header: method,sweep_var,sweep_value,seed,image,objective_mean,objective_std
std::string results_to_csv(const std::vector<ResultRow>& rows);
void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows);

} // namespace uavcov::sweep

#endif
