#ifndef UAVCOV_TRAINER_HPP
#define UAVCOV_TRAINER_HPP

#include "uavcov/env.hpp"
#include "uavcov/net.hpp"
#include "uavcov/replay.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace uavcov::marl {

struct EpsilonSchedule {
    double value = 1.0;
    double floor = 0.001;
    double decay = 0.9995;

    void step() { value = std::max(floor, value * decay); }
};

struct TrainingConfig {
    std::size_t train_episodes = 400;
    std::size_t test_episodes = 40;
    std::size_t replay_capacity = 1000;
    std::size_t batch_size = 64;
    double gamma = 0.8;
    double learning_rate = 0.001;
    double epsilon_start = 1.0;
    double epsilon_floor = 0.001;
    double epsilon_decay = 0.9995;
    std::size_t target_sync_period = 20; // gradient updates between target syncs
    std::size_t lstm_units = 64;
    std::vector<std::size_t> dense_widths = {128, 64};
};

struct Agent {
    net::ParamVector online;
    net::ParamVector target;
    net::AdamState adam;
};

// Epsilon-greedy over the agent's own Q-values; ties break to the lowest
// action index.  At epsilon <= 0 no random number is drawn.
std::size_t select_action(const net::Network& network, const net::ParamVector& params,
                          std::span<const double> obs, double epsilon, RngStream& rng);

double vdn_total(std::span<const double> per_agent_q);

// Double-Q bootstrapped targets: Y = R + gamma * sum_i Q_i^target(s_i', a_i*)
// with a_i* = argmax_a Q_i^online(s_i', a).
std::vector<double> d3ql_targets(const net::Network& network, const std::vector<Agent>& agents,
                                 const ReplayMemory& memory,
                                 const std::vector<std::size_t>& batch_indices, double gamma);

// One semi-gradient update on every agent.  Targets are computed from the
// pre-update parameters of all agents before any agent changes.  Returns the
// batch MSE loss.
double train_step(const net::Network& network, std::vector<Agent>& agents,
                  const ReplayMemory& memory, const std::vector<std::size_t>& batch_indices,
                  double gamma, double learning_rate);

struct EpisodeRow {
    std::size_t episode = 0; // 1-based, training and test numbered separately
    bool test = false;
    double epsilon = 0.0;
    double reward_mean = 0.0;   // the variant's training reward
    double semantic_mean = 0.0; // semantic per-slot reward
    double loss_mean = 0.0;     // mean loss over trained steps, 0 if none
};

struct TraceRow {
    std::size_t episode = 0;
    std::size_t t = 0;
    std::vector<std::size_t> actions;
    std::vector<double> rates;
    double reward = 0.0;
};

// The full training loop: per-step epsilon-greedy decentralized actions,
// shared-reward replay, batched semi-gradient updates with periodic target
// sync, epsilon decay per training step.  Test episodes run greedily with no
// training.  Fully deterministic given the scenario master seed.
class Trainer {
public:
    Trainer(const ScenarioConfig& scenario, const env::EnvVariant& variant,
            const TrainingConfig& training);

    const net::Network& network() const { return network_; }
    const std::vector<Agent>& agents() const { return agents_; }
    env::Environment& environment() { return env_; }
    double epsilon() const { return epsilon_.value; }
    std::size_t episodes_done() const { return episodes_done_; }
    std::size_t gradient_updates() const { return gradient_updates_; }
    const ReplayMemory& memory() const { return memory_; }

    void set_trace_sink(std::vector<TraceRow>* sink) { trace_ = sink; }

    EpisodeRow run_train_episode();
    EpisodeRow run_test_episode(std::size_t index);

    // Algorithm: configured training episodes followed by greedy test
    // episodes; returns one row per episode.
    std::vector<EpisodeRow> run();

    // Semantic objectives of the test episodes recorded by run().
    const std::vector<double>& test_objectives() const { return test_objectives_; }

    void save_checkpoint(const std::string& dir) const;
    // Restores a checkpoint produced with an identical scenario/variant and
    // compatible training config; resumes bit-exactly at the saved episode
    // boundary.
    void load_checkpoint(const std::string& dir);

private:
    void sync_targets();

    ScenarioConfig scenario_;
    env::EnvVariant variant_;
    TrainingConfig training_;
    env::Environment env_;
    net::Network network_;
    std::vector<Agent> agents_;
    ReplayMemory memory_;
    EpsilonSchedule epsilon_;
    std::vector<RngStream> explore_rng_;
    RngStream replay_rng_;
    std::size_t episodes_done_ = 0;
    std::size_t gradient_updates_ = 0;
    std::vector<double> test_objectives_;
    std::vector<TraceRow>* trace_ = nullptr;
};

// Greedy rollout of trained agents on a freshly built environment (the
// scenario may differ from the training one in the quality metric only).
// Returns the per-episode semantic objective.
std::vector<double> evaluate_greedy(const ScenarioConfig& scenario, const env::EnvVariant& variant,
                                    const TrainingConfig& training,
                                    const std::vector<Agent>& agents, std::size_t episodes);

void write_episode_csv(const std::string& path, const std::vector<EpisodeRow>& rows);
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows,
                     std::size_t num_uavs);

} // namespace uavcov::marl

#endif
