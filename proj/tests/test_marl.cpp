#include "uavcov/trainer.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace uavcov;
using marl::Agent;
using marl::ReplayMemory;
using marl::Trainer;
using marl::TrainingConfig;
using marl::Transition;
using net::Network;
using net::NetworkSpec;
using net::ParamVector;

namespace {

Transition make_transition(double reward) {
    Transition t;
    t.obs = {{0.0}, {0.0}};
    t.actions = {0, 0};
    t.next_obs = {{0.0}, {0.0}};
    t.reward = reward;
    return t;
}

NetworkSpec tiny_spec() {
    NetworkSpec spec;
    spec.input_width = 1;
    spec.history = 1;
    spec.lstm_units = 1;
    spec.dense_widths = {1};
    spec.num_actions = 2;
    return spec;
}

// Zero recurrent core; the heads pin Q = {4.5, -0.5} for any input.
ParamVector fixed_q_params(const Network& net) {
    ParamVector p(net.param_count(), 0.0);
    p[net.offset_dense_b(0)] = 2.5;
    p[net.offset_wv()] = 1.0;
    p[net.offset_bv()] = -0.5;
    p[net.offset_wa()] = 1.0;
    p[net.offset_wa() + 1] = -1.0;
    p[net.offset_ba()] = 0.5;
    p[net.offset_ba() + 1] = 0.5;
    return p;
}

ParamVector bias_only_params(const Network& net, double bv, double ba0, double ba1) {
    ParamVector p(net.param_count(), 0.0);
    p[net.offset_bv()] = bv;
    p[net.offset_ba()] = ba0;
    p[net.offset_ba() + 1] = ba1;
    return p;
}

ScenarioConfig tiny_scenario() {
    ScenarioConfig cfg;
    cfg.num_uavs = 2;
    cfg.num_bs = 1;
    cfg.num_channels = 1;
    cfg.power_levels = {0.0, 10.0};
    cfg.steps_per_episode = 4;
    cfg.history = 2;
    cfg.master_seed = 3;
    cfg.uav_sides = {12.0, 12.0};
    cfg.uav_speeds = {5.0, 5.0};
    cfg.uav_centers = {{40.0, 50.0}, {60.0, 50.0}};
    cfg.uav_phases = {0.0, 3.141592653589793};
    cfg.uav_directions = {1, -1};
    return cfg;
}

TrainingConfig tiny_training() {
    TrainingConfig tc;
    tc.train_episodes = 3;
    tc.test_episodes = 2;
    tc.replay_capacity = 32;
    tc.batch_size = 8;
    tc.lstm_units = 4;
    tc.dense_widths = {6};
    return tc;
}

void check_rows_equal(const std::vector<marl::EpisodeRow>& a,
                      const std::vector<marl::EpisodeRow>& b) {
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].episode == b[k].episode);
        CHECK(a[k].test == b[k].test);
        CHECK(a[k].epsilon == b[k].epsilon);
        CHECK(a[k].reward_mean == b[k].reward_mean);
        CHECK(a[k].semantic_mean == b[k].semantic_mean);
        CHECK(a[k].loss_mean == b[k].loss_mean);
    }
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& label)
        : path(std::filesystem::temp_directory_path() / ("uavcov_test_marl_" + label)) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_CASE("replay memory overwrites oldest entries first") {
    ReplayMemory mem(3);
    CHECK(mem.capacity() == 3);
    for (int r = 1; r <= 3; ++r) mem.push(make_transition(r));
    CHECK(mem.size() == 3);
    CHECK(mem.at(0).reward == 1.0);
    CHECK(mem.at(2).reward == 3.0);
    mem.push(make_transition(4.0));
    CHECK(mem.size() == 3);
    CHECK(mem.at(0).reward == 2.0);
    CHECK(mem.at(2).reward == 4.0);
    mem.push(make_transition(5.0));
    mem.push(make_transition(6.0));
    CHECK(mem.at(0).reward == 4.0);
    CHECK(mem.at(1).reward == 5.0);
    CHECK(mem.at(2).reward == 6.0);
    CHECK_THROWS_WITH_AS(mem.at(3), "replay index out of range", std::out_of_range);
    CHECK_THROWS_WITH_AS(ReplayMemory(0), "replay capacity must be at least 1",
                         std::invalid_argument);
}

TEST_CASE("replay sampling is uniform without replacement and deterministic") {
    ReplayMemory mem(10);
    for (int r = 0; r < 10; ++r) mem.push(make_transition(r));

    RngStream rng(1, "marl/sample");
    CHECK_THROWS_WITH_AS(mem.sample_indices(11, rng),
                         "sample_indices: batch larger than stored transitions",
                         std::invalid_argument);

    auto full = mem.sample_indices(10, rng);
    std::sort(full.begin(), full.end());
    std::vector<std::size_t> iota(10);
    std::iota(iota.begin(), iota.end(), 0);
    CHECK(full == iota);

    auto part = mem.sample_indices(5, rng);
    CHECK(part.size() == 5);
    std::sort(part.begin(), part.end());
    CHECK(std::adjacent_find(part.begin(), part.end()) == part.end());
    CHECK(part.back() < 10);

    RngStream a(7, "marl/det");
    RngStream b(7, "marl/det");
    CHECK(mem.sample_indices(6, a) == mem.sample_indices(6, b));
}

TEST_CASE("replay save and load preserve logical order") {
    ReplayMemory mem(3);
    for (int r = 1; r <= 5; ++r) mem.push(make_transition(r));
    std::stringstream buf;
    mem.save(buf);
    ReplayMemory loaded(1);
    loaded.load(buf);
    CHECK(loaded.capacity() == 3);
    REQUIRE(loaded.size() == 3);
    CHECK(loaded.at(0).reward == 3.0);
    CHECK(loaded.at(1).reward == 4.0);
    CHECK(loaded.at(2).reward == 5.0);
    CHECK(loaded.at(0).obs == mem.at(0).obs);

    std::stringstream junk("definitely not a replay file");
    CHECK_THROWS_WITH_AS(loaded.load(junk), "replay file has wrong magic", std::runtime_error);
}

TEST_CASE("action selection is greedy with lowest-index ties at zero epsilon") {
    const Network net(tiny_spec());
    const ParamVector p = fixed_q_params(net); // Q = {4.5, -0.5}
    RngStream rng(5, "marl/greedy");
    const std::vector<double> obs = {0.0};
    CHECK(marl::select_action(net, p, obs, 0.0, rng) == 0);

    const ParamVector flipped = bias_only_params(net, 0.0, -1.0, 1.0); // Q = {-1, 1}
    CHECK(marl::select_action(net, flipped, obs, 0.0, rng) == 1);

    const ParamVector flat(net.param_count(), 0.0); // Q = {0, 0}
    CHECK(marl::select_action(net, flat, obs, 0.0, rng) == 0);

    // Greedy selection must not consume randomness.
    RngStream used(11, "marl/noconsume");
    RngStream untouched(11, "marl/noconsume");
    marl::select_action(net, p, obs, 0.0, used);
    CHECK(used.next_double() == untouched.next_double());
}

TEST_CASE("fully random exploration covers all actions uniformly") {
    NetworkSpec spec = tiny_spec();
    spec.num_actions = 6;
    const Network net(spec);
    const ParamVector p(net.param_count(), 0.0);
    RngStream rng(999, "marl/eps");
    const std::vector<double> obs = {0.0};
    std::vector<int> counts(6, 0);
    const int draws = 6000;
    for (int k = 0; k < draws; ++k) ++counts[marl::select_action(net, p, obs, 1.0, rng)];
    double chi2 = 0.0;
    for (int c : counts) {
        CHECK(c > 0);
        const double d = c - 1000.0;
        chi2 += d * d / 1000.0;
    }
    CHECK(chi2 < 20.52); // 0.999 quantile at 5 degrees of freedom
}

TEST_CASE("team value is the plain sum of per-agent values") {
    CHECK(marl::vdn_total(std::vector<double>{1.5, -0.25, 2.0}) == 3.25);
}

TEST_CASE("bootstrap targets pick online argmax but target value") {
    const Network net(tiny_spec());
    std::vector<Agent> agents(2);
    agents[0].online = fixed_q_params(net);                     // argmax 0
    agents[0].target = bias_only_params(net, 0.0, 10.0, 20.0);  // Q = {-5, 5}
    agents[1].online = bias_only_params(net, 0.0, 0.0, 1.0);    // argmax 1
    agents[1].target = bias_only_params(net, 2.0, 0.0, 0.0);    // Q = {2, 2}

    ReplayMemory mem(4);
    mem.push(make_transition(0.25));
    const auto y = marl::d3ql_targets(net, agents, mem, {0}, 0.5);
    REQUIRE(y.size() == 1);
    // Y = 0.25 + 0.5 * (target0[argmax=0] + target1[argmax=1]) = 0.25 + 0.5*(-5+2)
    CHECK(y[0] == -1.25);
}

TEST_CASE("one training step regresses the team value onto the target") {
    const Network net(tiny_spec());
    std::vector<Agent> agents(2);
    agents[0].online = fixed_q_params(net);
    agents[0].target = bias_only_params(net, 0.0, 10.0, 20.0);
    agents[1].online = bias_only_params(net, 0.0, 0.0, 1.0);
    agents[1].target = bias_only_params(net, 2.0, 0.0, 0.0);
    const ParamVector before0 = agents[0].online;
    const ParamVector target0 = agents[0].target;

    ReplayMemory mem(4);
    mem.push(make_transition(0.25));
    const double loss = marl::train_step(net, agents, mem, {0}, 0.5, 0.001);
    // q_tot = 4.5 - 0.5 = 4.0 against y = -1.25: squared residual 5.25^2.
    CHECK(loss == 27.5625);
    CHECK(agents[0].online != before0);
    CHECK(agents[1].online != bias_only_params(net, 0.0, 0.0, 1.0));
    CHECK(agents[0].target == target0); // targets only move on explicit sync
    CHECK(agents[0].adam.step == 1);
    CHECK_THROWS_WITH_AS(marl::train_step(net, agents, mem, {}, 0.5, 0.001),
                         "train_step: empty batch", std::invalid_argument);
}

TEST_CASE("epsilon decays multiplicatively onto its floor") {
    marl::EpsilonSchedule eps;
    eps.step();
    CHECK(eps.value == 1.0 * 0.9995);
    eps.value = 0.0011;
    eps.decay = 0.5;
    eps.step();
    CHECK(eps.value == 0.001);
}

TEST_CASE("trainer construction validates the training config") {
    TrainingConfig tc = tiny_training();
    tc.batch_size = 0;
    CHECK_THROWS_WITH_AS(Trainer(tiny_scenario(), env::EnvVariant{}, tc),
                         "batch_size must be in [1, replay_capacity]", std::invalid_argument);
    tc = tiny_training();
    tc.batch_size = tc.replay_capacity + 1;
    CHECK_THROWS_WITH_AS(Trainer(tiny_scenario(), env::EnvVariant{}, tc),
                         "batch_size must be in [1, replay_capacity]", std::invalid_argument);
    tc = tiny_training();
    tc.gamma = 1.0;
    CHECK_THROWS_WITH_AS(Trainer(tiny_scenario(), env::EnvVariant{}, tc),
                         "gamma must be in [0,1)", std::invalid_argument);
}

TEST_CASE("trainer wires independent agents with cloned targets") {
    Trainer trainer(tiny_scenario(), env::EnvVariant{}, tiny_training());
    REQUIRE(trainer.agents().size() == 2);
    CHECK(trainer.network().spec().num_actions == 2);
    CHECK(trainer.network().spec().input_width == 4); // B + 3
    for (const auto& agent : trainer.agents()) {
        CHECK(agent.online.size() == trainer.network().param_count());
        CHECK(agent.online == agent.target);
    }
    CHECK(trainer.agents()[0].online != trainer.agents()[1].online);
    CHECK(trainer.epsilon() == 1.0);
}

TEST_CASE("the training loop gates updates on replay fill and decays epsilon per step") {
    Trainer trainer(tiny_scenario(), env::EnvVariant{}, tiny_training());
    std::vector<marl::TraceRow> trace;
    trainer.set_trace_sink(&trace);

    const auto rows = trainer.run();
    REQUIRE(rows.size() == 5);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK_FALSE(rows[k].test);
        CHECK(rows[k].episode == k + 1);
    }
    for (std::size_t k = 3; k < 5; ++k) {
        CHECK(rows[k].test);
        CHECK(rows[k].episode == k - 2);
        CHECK(rows[k].epsilon == 0.0);
        CHECK(rows[k].loss_mean == 0.0);
    }

    // Replay reaches the batch size of 8 on the last step of episode 2.
    CHECK(rows[0].loss_mean == 0.0);
    CHECK(rows[1].loss_mean > 0.0);
    CHECK(trainer.gradient_updates() == 5);
    CHECK(trainer.memory().size() == 12); // test episodes do not push

    double eps = 1.0;
    for (int k = 0; k < 4; ++k) eps = std::max(0.001, eps * 0.9995);
    CHECK(rows[0].epsilon == eps);
    for (int k = 0; k < 8; ++k) eps = std::max(0.001, eps * 0.9995);
    CHECK(rows[2].epsilon == eps);
    CHECK(trainer.epsilon() == eps); // test episodes leave the schedule alone

    CHECK(trace.size() == 5 * 4);
    CHECK(trace.front().episode == 1);
    CHECK(trace.front().actions.size() == 2);

    const auto& objectives = trainer.test_objectives();
    REQUIRE(objectives.size() == 2);
    CHECK(objectives[0] == rows[3].semantic_mean);
    CHECK(objectives[1] == rows[4].semantic_mean);
    for (double v : objectives) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("training runs are deterministic in the master seed") {
    Trainer a(tiny_scenario(), env::EnvVariant{}, tiny_training());
    Trainer b(tiny_scenario(), env::EnvVariant{}, tiny_training());
    check_rows_equal(a.run(), b.run());
    CHECK(a.agents()[0].online == b.agents()[0].online);

    ScenarioConfig other = tiny_scenario();
    other.master_seed = 4;
    Trainer c(other, env::EnvVariant{}, tiny_training());
    const auto rows_a = a.run_train_episode();
    const auto rows_c = c.run_train_episode();
    CHECK(rows_a.reward_mean != rows_c.reward_mean);
}

TEST_CASE("target networks sync on the configured update cadence") {
    TrainingConfig tc = tiny_training();
    tc.batch_size = 1;
    tc.target_sync_period = 2;
    Trainer trainer(tiny_scenario(), env::EnvVariant{}, tc);
    trainer.run_train_episode(); // 4 gradient updates, syncs after 2 and 4
    CHECK(trainer.gradient_updates() == 4);
    for (const auto& agent : trainer.agents()) CHECK(agent.target == agent.online);

    TrainingConfig slow = tiny_training();
    slow.batch_size = 1;
    slow.target_sync_period = 100;
    Trainer lazy(tiny_scenario(), env::EnvVariant{}, slow);
    const ParamVector initial = lazy.agents()[0].online;
    lazy.run_train_episode();
    CHECK(lazy.agents()[0].online != initial);
    CHECK(lazy.agents()[0].target == initial); // never synced
}

TEST_CASE("checkpoints resume training bit-exactly") {
    TempDir dir("ckpt");
    const std::string ckpt = (dir.path / "run").string();

    Trainer a(tiny_scenario(), env::EnvVariant{}, tiny_training());
    a.run_train_episode();
    a.run_train_episode();
    a.save_checkpoint(ckpt);

    Trainer b(tiny_scenario(), env::EnvVariant{}, tiny_training());
    b.load_checkpoint(ckpt);
    CHECK(b.episodes_done() == 2);
    CHECK(b.gradient_updates() == a.gradient_updates());
    CHECK(b.epsilon() == a.epsilon());
    CHECK(b.agents()[0].online == a.agents()[0].online);
    CHECK(b.agents()[1].target == a.agents()[1].target);
    REQUIRE(b.memory().size() == a.memory().size());
    for (std::size_t k = 0; k < b.memory().size(); ++k) {
        CHECK(b.memory().at(k).reward == a.memory().at(k).reward);
        CHECK(b.memory().at(k).actions == a.memory().at(k).actions);
        CHECK(b.memory().at(k).obs == a.memory().at(k).obs);
    }

    const auto row_a = a.run_train_episode();
    const auto row_b = b.run_train_episode();
    CHECK(row_a.episode == row_b.episode);
    CHECK(row_a.epsilon == row_b.epsilon);
    CHECK(row_a.reward_mean == row_b.reward_mean);
    CHECK(row_a.loss_mean == row_b.loss_mean);
}

TEST_CASE("checkpoints refuse foreign scenarios and versions") {
    TempDir dir("ckpt_bad");
    const std::string ckpt = (dir.path / "run").string();
    Trainer a(tiny_scenario(), env::EnvVariant{}, tiny_training());
    a.run_train_episode();
    a.save_checkpoint(ckpt);

    ScenarioConfig other = tiny_scenario();
    other.master_seed = 999;
    Trainer b(other, env::EnvVariant{}, tiny_training());
    CHECK_THROWS_WITH_AS(b.load_checkpoint(ckpt),
                         "checkpoint was produced by a different scenario", std::runtime_error);

    Trainer c(tiny_scenario(), env::EnvVariant{}, tiny_training());
    CHECK_THROWS_AS(c.load_checkpoint((dir.path / "missing").string()), std::runtime_error);

    // Tamper with the manifest version in place.
    const auto manifest_path = dir.path / "run" / "manifest.txt";
    std::string text;
    {
        std::ifstream in(manifest_path);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    text.replace(text.find("version=1"), 9, "version=2");
    std::ofstream(manifest_path) << text;
    CHECK_THROWS_WITH_AS(c.load_checkpoint(ckpt), "unsupported checkpoint version",
                         std::runtime_error);
}

TEST_CASE("greedy evaluation replays the trainer's test behavior") {
    Trainer trainer(tiny_scenario(), env::EnvVariant{}, tiny_training());
    trainer.run();
    const auto objectives = marl::evaluate_greedy(tiny_scenario(), env::EnvVariant{},
                                                  tiny_training(), trainer.agents(), 2);
    REQUIRE(objectives.size() == 2);
    CHECK(objectives[0] == objectives[1]); // frozen kinematics replay exactly
    CHECK(objectives[0] == trainer.test_objectives()[0]);

    ScenarioConfig wider = tiny_scenario();
    wider.num_bs = 2; // frame width changes, parameters no longer fit
    CHECK_THROWS_WITH_AS(
        marl::evaluate_greedy(wider, env::EnvVariant{}, tiny_training(), trainer.agents(), 1),
        "evaluate_greedy: agents do not match the scenario's network", std::invalid_argument);
}

TEST_CASE("episode and trace tables render stable headers") {
    TempDir dir("csv");
    std::vector<marl::EpisodeRow> rows(2);
    rows[0] = {1, false, 0.5, 0.25, 0.25, 0.125};
    rows[1] = {1, true, 0.0, 0.75, 0.75, 0.0};
    const std::string episodes = (dir.path / "episodes.csv").string();
    marl::write_episode_csv(episodes, rows);
    std::ifstream in(episodes);
    std::string line;
    std::getline(in, line);
    CHECK(line == "episode,phase,epsilon,reward_mean,semantic_mean,loss_mean");
    std::getline(in, line);
    CHECK(line == "1,train,0.5,0.25,0.25,0.125");
    std::getline(in, line);
    CHECK(line == "1,test,0,0.75,0.75,0");

    std::vector<marl::TraceRow> trace(1);
    trace[0] = {1, 0, {2, 0}, {1.5, 0.0}, 0.5};
    const std::string trace_path = (dir.path / "trace.csv").string();
    marl::write_trace_csv(trace_path, trace, 2);
    std::ifstream tin(trace_path);
    std::getline(tin, line);
    CHECK(line == "episode,t,action_0,action_1,rate_0,rate_1,reward");
    std::getline(tin, line);
    CHECK(line == "1,0,2,0,1.5,0,0.5");
}
