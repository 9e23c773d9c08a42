#include "uavcov/baselines.hpp"
#include "uavcov/config_file.hpp"
#include "uavcov/pgm.hpp"
#include "uavcov/sweep.hpp"
#include "uavcov/trainer.hpp"
#include "uavcov/validation.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace uavcov;
namespace fs = std::filesystem;

env::EnvVariant variant_for_method(const ScenarioConfig& scenario, const std::string& method) {
    if (method == "bo") return baselines::bo_configure({scenario, env::EnvVariant{}}).variant;
    if (method == "sama" || method == "hu") return env::EnvVariant{};
    throw std::runtime_error("unknown method: " + method);
}

struct MeanStd {
    double mean = 0.0;
    double stdev = 0.0;
};

MeanStd mean_std(const std::vector<double>& values) {
    MeanStd ms;
    if (values.empty()) return ms;
    for (double v : values) ms.mean += v;
    ms.mean /= static_cast<double>(values.size());
    for (double v : values) ms.stdev += (v - ms.mean) * (v - ms.mean);
    ms.stdev = std::sqrt(ms.stdev / static_cast<double>(values.size()));
    return ms;
}

void print_objectives(const char* label, const std::vector<double>& objectives) {
    for (std::size_t i = 0; i < objectives.size(); ++i)
        std::printf("%s episode %zu: objective %.6f\n", label, i + 1, objectives[i]);
    const MeanStd ms = mean_std(objectives);
    std::printf("%s mean %.6f std %.6f over %zu episodes\n", label, ms.mean, ms.stdev,
                objectives.size());
}

int cmd_train(cfg::RunSettings settings, std::uint64_t seed_override, bool seed_given,
              const std::string& out_dir, bool trace) {
    if (seed_given) settings.scenario.master_seed = seed_override;
    settings.scenario.validate();

    if (settings.method == "hu") {
        const auto objectives =
            baselines::hu_episode_objectives(settings.scenario, settings.training.test_episodes);
        print_objectives("test", objectives);
        return 0;
    }

    const env::EnvVariant variant = variant_for_method(settings.scenario, settings.method);
    marl::Trainer trainer(settings.scenario, variant, settings.training);
    std::vector<marl::TraceRow> trace_rows;
    if (trace) trainer.set_trace_sink(&trace_rows);
    const std::vector<marl::EpisodeRow> rows = trainer.run();
    print_objectives("test", trainer.test_objectives());

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        marl::write_episode_csv((fs::path(out_dir) / "episodes.csv").string(), rows);
        if (trace)
            marl::write_trace_csv((fs::path(out_dir) / "trace.csv").string(), trace_rows,
                                  settings.scenario.num_uavs);
        trainer.save_checkpoint((fs::path(out_dir) / "checkpoint").string());
        std::printf("wrote %s/{episodes.csv%s,checkpoint}\n", out_dir.c_str(),
                    trace ? ",trace.csv" : "");
    }
    return 0;
}

int cmd_eval(cfg::RunSettings settings, const std::string& checkpoint_dir,
             std::uint64_t seed_override, bool seed_given, std::size_t episodes) {
    settings.scenario.validate();
    const env::EnvVariant variant = variant_for_method(settings.scenario, settings.method);
    marl::Trainer trainer(settings.scenario, variant, settings.training);
    trainer.load_checkpoint(checkpoint_dir);

    ScenarioConfig eval_scenario = settings.scenario;
    if (seed_given) eval_scenario.master_seed = seed_override;
    if (episodes == 0) episodes = settings.training.test_episodes;
    const auto objectives =
        marl::evaluate_greedy(eval_scenario, variant, settings.training, trainer.agents(), episodes);
    print_objectives("eval", objectives);
    return 0;
}

int cmd_sweep(const cfg::RunSettings& settings, const std::string& out_dir,
              std::size_t workers_override) {
    sweep::SweepSpec spec = sweep::sweep_spec_from_settings(settings);
    if (workers_override > 0) spec.workers = workers_override;
    const auto rows = sweep::run_sweep(spec, settings.scenario, settings.training);
    fs::create_directories(out_dir);
    const std::string path = (fs::path(out_dir) / "results.csv").string();
    sweep::write_results_csv(path, rows);
    std::size_t failed = 0;
    for (const auto& row : rows)
        if (row.failed) ++failed;
    std::printf("wrote %zu rows to %s (%zu failed)\n", rows.size(), path.c_str(), failed);
    return 0;
}

int cmd_oracle(cfg::RunSettings settings, std::uint64_t seed_override, bool seed_given,
               std::size_t episodes, const std::string& out_dir) {
    if (seed_given) settings.scenario.master_seed = seed_override;
    settings.scenario.validate();
    env::Environment environment(settings.scenario, env::EnvVariant{});
    std::vector<double> objectives;
    for (std::size_t e = 0; e < episodes; ++e) {
        environment.reset();
        double total = 0.0;
        for (std::size_t t = 0; t < settings.scenario.steps_per_episode; ++t) {
            const auto best = baselines::oracle_allocate(environment.snapshot(),
                                                         environment.actions());
            environment.step(best.actions);
            total += best.reward;
        }
        objectives.push_back(total / static_cast<double>(settings.scenario.steps_per_episode));
    }
    print_objectives("oracle", objectives);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream out((fs::path(out_dir) / "oracle.csv").string());
        out << "episode,objective\n";
        for (std::size_t i = 0; i < objectives.size(); ++i) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.10g", objectives[i]);
            out << (i + 1) << "," << buf << "\n";
        }
    }
    return 0;
}

int cmd_quality_table(const cfg::RunSettings& settings) {
    const ScenarioConfig& sc = settings.scenario;
    const img::GrayImage image = img::load_image_ref(sc.image);
    const quality::QualityModel model = quality::build_quality_model(
        image, sc.metric, sc.psnr_cap, sc.effective_rate_thresholds());
    std::printf("image %s  metric %s  cap %.2f dB\n", sc.image.c_str(),
                quality::metric_name(sc.metric).c_str(), model.cap);
    std::printf("%4s %12s %10s %8s %8s\n", "bits", "threshold", "psnr", "ssim", "quality");
    for (int b = 1; b <= 8; ++b) {
        const img::GrayImage quantized = img::quantize(image, b);
        const double p = img::psnr(quantized, image);
        const double s = img::ssim(quantized, image);
        std::printf("%4d %12.6g %10.4f %8.4f %8.4f\n", b, model.thresholds[b - 1], p, s,
                    model.qualities[b - 1]);
    }
    return 0;
}

int cmd_gradcheck(std::size_t cases, std::uint64_t seed) {
    const double worst = validation::gradcheck_max_rel_error(cases, seed);
    std::printf("max relative error %.3e over %zu cases (tolerance 1e-04)\n", worst, cases);
    return worst <= 1e-4 ? 0 : 1;
}

int cmd_accept(const std::string& assets_dir, const std::string& out_dir) {
    const auto results = validation::run_acceptance(std::cout, assets_dir);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        validation::write_acceptance_csv((fs::path(out_dir) / "acceptance.csv").string(), results);
    }
    std::size_t passed = 0;
    for (const auto& r : results)
        if (r.pass) ++passed;
    std::printf("%zu of %zu criteria passed\n", passed, results.size());
    return passed == results.size() ? 0 : 1;
}

int cmd_gen_images(const std::string& out_dir) {
    fs::create_directories(out_dir);
    for (const auto& name : img::builtin_image_names()) {
        const std::string path = (fs::path(out_dir) / (name + ".pgm")).string();
        img::save_pgm(img::make_builtin_image(name), path);
        std::printf("wrote %s\n", path.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-UAV coverage simulator and semantic-aware multi-agent Q-learner"};
    app.require_subcommand(1);

    std::string config_path, checkpoint_dir, assets_dir;
    std::string train_out, sweep_out, oracle_out, accept_out;
    std::string gen_out = "assets/images";
    std::uint64_t seed = 0;
    std::size_t eval_episodes = 0, oracle_episodes = 1, workers = 0, cases = 100;
    std::uint64_t gradcheck_seed = 97531;
    bool trace = false;

    auto* train = app.add_subcommand("train", "train a model and report test objectives");
    train->add_option("--config", config_path, "run configuration file")->required();
    auto* train_seed = train->add_option("--seed", seed, "master seed override");
    train->add_option("--out", train_out, "output directory for CSVs and the checkpoint");
    train->add_flag("--trace", trace, "record per-step actions and rates");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint greedily");
    eval->add_option("--config", config_path, "run configuration file")->required();
    eval->add_option("--checkpoint", checkpoint_dir, "checkpoint directory")->required();
    auto* eval_seed = eval->add_option("--seed", seed, "evaluation seed override");
    eval->add_option("--episodes", eval_episodes, "episode count (default: config test episodes)");

    auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep and write results.csv");
    sweep_cmd->add_option("--config", config_path, "run configuration file")->required();
    sweep_cmd->add_option("--out", sweep_out, "output directory")->required();
    sweep_cmd->add_option("--workers", workers, "worker thread override");

    auto* oracle = app.add_subcommand("oracle", "exhaustive per-slot optimum on a scenario");
    oracle->add_option("--config", config_path, "run configuration file")->required();
    auto* oracle_seed = oracle->add_option("--seed", seed, "master seed override");
    oracle->add_option("--episodes", oracle_episodes, "episode count");
    oracle->add_option("--out", oracle_out, "output directory for oracle.csv");

    auto* qtable = app.add_subcommand("quality-table", "print the configured quality model");
    qtable->add_option("--config", config_path, "run configuration file")->required();

    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient audit");
    gradcheck->add_option("--cases", cases, "number of randomized networks");
    gradcheck->add_option("--seed", gradcheck_seed, "audit seed");

    auto* accept = app.add_subcommand("accept", "run the acceptance suite");
    accept->add_option("--assets", assets_dir, "shipped image directory to verify");
    accept->add_option("--out", accept_out, "output directory for acceptance.csv");

    auto* gen_images = app.add_subcommand("gen-images", "write the built-in test images as PGM");
    gen_images->add_option("--out", gen_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (train->parsed())
            return cmd_train(cfg::load_run_settings(config_path), seed, train_seed->count() > 0,
                             train_out, trace);
        if (eval->parsed())
            return cmd_eval(cfg::load_run_settings(config_path), checkpoint_dir, seed,
                            eval_seed->count() > 0, eval_episodes);
        if (sweep_cmd->parsed())
            return cmd_sweep(cfg::load_run_settings(config_path), sweep_out, workers);
        if (oracle->parsed())
            return cmd_oracle(cfg::load_run_settings(config_path), seed, oracle_seed->count() > 0,
                              oracle_episodes, oracle_out);
        if (qtable->parsed()) return cmd_quality_table(cfg::load_run_settings(config_path));
        if (gradcheck->parsed()) return cmd_gradcheck(cases, gradcheck_seed);
        if (accept->parsed()) return cmd_accept(assets_dir, accept_out);
        if (gen_images->parsed()) return cmd_gen_images(gen_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
