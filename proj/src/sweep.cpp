#include "uavcov/sweep.hpp"

#include "uavcov/baselines.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace uavcov::sweep {

SweepSpec sweep_spec_from_settings(const cfg::RunSettings& settings) {
    SweepSpec spec;
    spec.variable = settings.sweep_variable;
    spec.values = settings.sweep_values;
    spec.seeds = settings.sweep_seeds;
    spec.methods = settings.sweep_methods;
    spec.images = settings.sweep_images;
    spec.workers = settings.workers;
    return spec;
}

namespace {

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, const std::string& variable,
                                 const std::string& value) {
    ScenarioConfig sc = base;
    if (variable == "channels") {
        sc.num_channels = std::stoull(value);
    } else if (variable == "uavs") {
        sc.num_uavs = std::stoull(value);
    } else if (variable == "velocity-scale") {
        sc.speed_scale = std::stod(value);
    } else if (variable == "reward-metric") {
        sc.metric = quality::parse_metric(value);
    } else {
        throw std::invalid_argument("unknown sweep variable: " + variable);
    }
    return sc;
}

struct RunPoint {
    std::string method;
    std::string value;
    std::string image;
    std::uint64_t seed = 0;
};

std::pair<double, double> mean_std(const std::vector<double>& values) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    return {mean, std::sqrt(var)};
}

std::vector<double> run_point_objectives(const RunPoint& point, const SweepSpec& spec,
                                         const ScenarioConfig& base,
                                         const marl::TrainingConfig& training) {
    ScenarioConfig scenario = apply_sweep_value(base, spec.variable, point.value);
    scenario.master_seed = point.seed;
    if (!point.image.empty()) scenario.image = point.image;
    scenario.validate();

    // Trained models are always scored on the semantic objective; a
    // reward-metric sweep scores every variant under the PSNR objective so
    // the training metrics stay comparable.
    ScenarioConfig eval_scenario = scenario;
    if (spec.variable == "reward-metric") eval_scenario.metric = quality::Metric::Psnr;

    if (point.method == "hu") return baselines::hu_episode_objectives(eval_scenario, training.test_episodes);

    env::EnvVariant variant;
    if (point.method == "bo") {
        variant = baselines::bo_configure({scenario, env::EnvVariant{}}).variant;
    } else if (point.method != "sama") {
        throw std::invalid_argument("unknown sweep method: " + point.method);
    }
    marl::Trainer trainer(scenario, variant, training);
    for (std::size_t e = 0; e < training.train_episodes; ++e) trainer.run_train_episode();
    return marl::evaluate_greedy(eval_scenario, variant, training, trainer.agents(),
                                 training.test_episodes);
}

} // namespace

std::vector<ResultRow> run_sweep(const SweepSpec& spec, const ScenarioConfig& base,
                                 const marl::TrainingConfig& training) {
    if (spec.variable.empty() || spec.values.empty() || spec.seeds.empty() || spec.methods.empty())
        throw std::invalid_argument("sweep spec: variable, values, seeds and methods are required");

    std::vector<std::string> images = spec.images;
    if (images.empty()) images.push_back(base.image);

    std::vector<RunPoint> points;
    for (const auto& method : spec.methods)
        for (const auto& value : spec.values)
            for (const auto& image : images)
                for (std::uint64_t seed : spec.seeds) points.push_back({method, value, image, seed});

    std::vector<ResultRow> rows(points.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t k = cursor.fetch_add(1);
            if (k >= points.size()) return;
            const RunPoint& p = points[k];
            ResultRow& row = rows[k];
            row.method = p.method;
            row.sweep_var = spec.variable;
            row.sweep_value = p.value;
            row.seed = p.seed;
            row.image = p.image;
            try {
                const auto objectives = run_point_objectives(p, spec, base, training);
                if (objectives.empty()) throw std::runtime_error("run produced no test episodes");
                const auto [mean, sd] = mean_std(objectives);
                row.objective_mean = mean;
                row.objective_std = sd;
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
            }
        }
    };

    const std::size_t nthreads = std::max<std::size_t>(1, std::min(spec.workers, points.size()));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (std::size_t k = 0; k < nthreads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& row : rows) {
        if (row.failed)
            std::fprintf(stderr, "sweep run failed: method=%s %s=%s seed=%llu image=%s: %s\n",
                         row.method.c_str(), row.sweep_var.c_str(), row.sweep_value.c_str(),
                         static_cast<unsigned long long>(row.seed), row.image.c_str(),
                         row.error.c_str());
    }
    return rows;
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
    std::string out = "method,sweep_var,sweep_value,seed,image,objective_mean,objective_std\n";
    char buf[96];
    for (const auto& r : rows) {
        out += r.method + "," + r.sweep_var + "," + r.sweep_value + ",";
        std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(r.seed));
        out += buf;
        out += "," + r.image + ",";
        if (r.failed) {
            out += "ERROR,ERROR";
        } else {
            std::snprintf(buf, sizeof buf, "%.10g,%.10g", r.objective_mean, r.objective_std);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for write: " + path);
    const std::string text = results_to_csv(rows);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write failure: " + path);
}

} // namespace uavcov::sweep
