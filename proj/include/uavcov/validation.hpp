#ifndef UAVCOV_VALIDATION_HPP
#define UAVCOV_VALIDATION_HPP

#include "uavcov/scenario.hpp"
#include "uavcov/sweep.hpp"
#include "uavcov/trainer.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace uavcov::validation {

// Mean over test slots of achieved per-slot reward divided by the exhaustive
// oracle's best reward; slots with a zero oracle reward are skipped.
double oracle_gap(const ScenarioConfig& scenario, const env::EnvVariant& variant,
                  const marl::TrainingConfig& training, const std::vector<marl::Agent>& agents,
                  std::size_t episodes);

struct TrendResult {
    bool pass = false;
    std::vector<std::string> notes; // one margin report per sweep value
};

// Checks mean(method_hi) >= mean(method_lo) - slack at every sweep value;
// a negative slack demands a strict margin.  Requires >= 3 seeds per
// (method, value) point and both methods present.
TrendResult trend_check(const std::vector<sweep::ResultRow>& rows, const std::string& method_hi,
                        const std::string& method_lo, double slack);

// Central-difference gradient audit over randomized small networks; returns
// the max relative error across all probed coordinates.
double gradcheck_max_rel_error(std::size_t cases, std::uint64_t seed);

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

// Runs the full acceptance suite, printing one [PASS]/[FAIL] line per
// criterion to `out`; returns the results.  assets_dir may be empty (built-in
// images are used directly); when set, the shipped image files are verified
// against the built-in generators.
std::vector<CheckResult> run_acceptance(std::ostream& out, const std::string& assets_dir);

void write_acceptance_csv(const std::string& path, const std::vector<CheckResult>& results);

} // namespace uavcov::validation

#endif
