#include "uavcov/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace uavcov::marl {

std::vector<std::size_t> ReplayMemory::sample_indices(std::size_t count, RngStream& rng) const {
    if (count > buffer_.size())
        throw std::invalid_argument("sample_indices: batch larger than stored transitions");
    std::vector<std::size_t> idx(buffer_.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    for (std::size_t j = 0; j < count; ++j) {
        const std::size_t pick = j + rng.next_below(idx.size() - j);
        std::swap(idx[j], idx[pick]);
    }
    idx.resize(count);
    return idx;
}

namespace {

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

void write_doubles(std::ostream& out, const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::istream& in, std::vector<double>& v, std::size_t count) {
    v.resize(count);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
}

constexpr char kReplayMagic[8] = {'U', 'A', 'V', 'R', 'P', 'L', 'Y', '1'};
constexpr char kAdamMagic[8] = {'U', 'A', 'V', 'A', 'D', 'M', '1', '\n'};

} // namespace

void ReplayMemory::save(std::ostream& out) const {
    out.write(kReplayMagic, sizeof kReplayMagic);
    const std::size_t agents = buffer_.empty() ? 0 : buffer_.front().obs.size();
    const std::size_t obs_size = agents == 0 ? 0 : buffer_.front().obs.front().size();
    write_u64(out, capacity_);
    write_u64(out, agents);
    write_u64(out, obs_size);
    write_u64(out, buffer_.size());
    for (std::size_t k = 0; k < buffer_.size(); ++k) {
        const Transition& t = at(k); // oldest first, so head_ realigns to 0 on load
        out.write(reinterpret_cast<const char*>(&t.reward), sizeof t.reward);
        for (std::size_t i = 0; i < agents; ++i) {
            write_u64(out, t.actions[i]);
            write_doubles(out, t.obs[i]);
            write_doubles(out, t.next_obs[i]);
        }
    }
}

void ReplayMemory::load(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kReplayMagic, sizeof magic) != 0)
        throw std::runtime_error("replay file has wrong magic");
    capacity_ = read_u64(in);
    const std::size_t agents = read_u64(in);
    const std::size_t obs_size = read_u64(in);
    const std::size_t count = read_u64(in);
    if (!in || count > capacity_) throw std::runtime_error("replay file header invalid");
    buffer_.assign(count, {});
    head_ = 0;
    for (auto& t : buffer_) {
        in.read(reinterpret_cast<char*>(&t.reward), sizeof t.reward);
        t.obs.resize(agents);
        t.actions.resize(agents);
        t.next_obs.resize(agents);
        for (std::size_t i = 0; i < agents; ++i) {
            t.actions[i] = read_u64(in);
            read_doubles(in, t.obs[i], obs_size);
            read_doubles(in, t.next_obs[i], obs_size);
        }
    }
    if (!in) throw std::runtime_error("replay file truncated");
}

std::size_t select_action(const net::Network& network, const net::ParamVector& params,
                          std::span<const double> obs, double epsilon, RngStream& rng) {
    if (epsilon > 0.0 && rng.next_double() < epsilon)
        return rng.next_below(network.spec().num_actions);
    const std::vector<double> q = network.forward_one(params, obs);
    std::size_t best = 0;
    for (std::size_t a = 1; a < q.size(); ++a)
        if (q[a] > q[best]) best = a;
    return best;
}

double vdn_total(std::span<const double> per_agent_q) {
    double total = 0.0;
    for (double q : per_agent_q) total += q;
    return total;
}

namespace {

// Gathers one agent's windows from the sampled transitions into a contiguous
// batch matrix.
void gather(const ReplayMemory& memory, const std::vector<std::size_t>& batch_indices,
            std::size_t agent, bool next, std::vector<double>& out, std::size_t obs_size) {
    out.resize(batch_indices.size() * obs_size);
    for (std::size_t m = 0; m < batch_indices.size(); ++m) {
        const Transition& t = memory.at(batch_indices[m]);
        const auto& src = next ? t.next_obs[agent] : t.obs[agent];
        std::memcpy(out.data() + m * obs_size, src.data(), obs_size * sizeof(double));
    }
}

std::size_t argmax_row(const double* row, std::size_t n) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < n; ++j)
        if (row[j] > row[best]) best = j;
    return best;
}

} // namespace

std::vector<double> d3ql_targets(const net::Network& network, const std::vector<Agent>& agents,
                                 const ReplayMemory& memory,
                                 const std::vector<std::size_t>& batch_indices, double gamma) {
    const std::size_t batch = batch_indices.size();
    const std::size_t a_count = network.spec().num_actions;
    std::vector<double> y(batch);
    for (std::size_t m = 0; m < batch; ++m) y[m] = memory.at(batch_indices[m]).reward;

    std::vector<double> next_obs;
    net::Network::Cache online_cache, target_cache;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        gather(memory, batch_indices, i, true, next_obs, network.obs_size());
        network.forward(agents[i].online, next_obs.data(), batch, online_cache);
        network.forward(agents[i].target, next_obs.data(), batch, target_cache);
        for (std::size_t m = 0; m < batch; ++m) {
            const std::size_t a_star = argmax_row(online_cache.q.data() + m * a_count, a_count);
            y[m] += gamma * target_cache.q[m * a_count + a_star];
        }
    }
    return y;
}

double train_step(const net::Network& network, std::vector<Agent>& agents,
                  const ReplayMemory& memory, const std::vector<std::size_t>& batch_indices,
                  double gamma, double learning_rate) {
    const std::size_t batch = batch_indices.size();
    if (batch == 0) throw std::invalid_argument("train_step: empty batch");
    const std::size_t a_count = network.spec().num_actions;

    // Bootstrapped targets from the pre-update parameters of every agent.
    const std::vector<double> y = d3ql_targets(network, agents, memory, batch_indices, gamma);

    std::vector<net::Network::Cache> caches(agents.size());
    std::vector<double> q_tot(batch, 0.0);
    std::vector<double> obs;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        gather(memory, batch_indices, i, false, obs, network.obs_size());
        network.forward(agents[i].online, obs.data(), batch, caches[i]);
        for (std::size_t m = 0; m < batch; ++m) {
            const std::size_t a = memory.at(batch_indices[m]).actions[i];
            q_tot[m] += caches[i].q[m * a_count + a];
        }
    }

    double loss = 0.0;
    std::vector<double> residual(batch);
    for (std::size_t m = 0; m < batch; ++m) {
        residual[m] = q_tot[m] - y[m];
        loss += residual[m] * residual[m];
    }
    loss /= static_cast<double>(batch);

    std::vector<double> dq(batch * a_count);
    net::ParamVector grad;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        std::fill(dq.begin(), dq.end(), 0.0);
        for (std::size_t m = 0; m < batch; ++m) {
            const std::size_t a = memory.at(batch_indices[m]).actions[i];
            dq[m * a_count + a] = 2.0 * residual[m] / static_cast<double>(batch);
        }
        network.backward(agents[i].online, caches[i], dq, grad);
        net::adam_step(agents[i].online, grad, agents[i].adam, learning_rate);
    }
    return loss;
}

namespace {

net::NetworkSpec make_spec(const env::Environment& environment, const TrainingConfig& training) {
    net::NetworkSpec spec;
    spec.input_width = environment.frame_width();
    spec.history = environment.config().history;
    spec.lstm_units = training.lstm_units;
    spec.dense_widths = training.dense_widths;
    spec.num_actions = environment.actions().size();
    return spec;
}

} // namespace

Trainer::Trainer(const ScenarioConfig& scenario, const env::EnvVariant& variant,
                 const TrainingConfig& training)
    : scenario_(scenario),
      variant_(variant),
      training_(training),
      env_(scenario, variant),
      network_(make_spec(env_, training)),
      memory_(training.replay_capacity),
      replay_rng_(scenario.master_seed, "replay") {
    if (training_.batch_size < 1 || training_.batch_size > training_.replay_capacity)
        throw std::invalid_argument("batch_size must be in [1, replay_capacity]");
    if (!(training_.gamma >= 0.0 && training_.gamma < 1.0))
        throw std::invalid_argument("gamma must be in [0,1)");
    epsilon_.value = training_.epsilon_start;
    epsilon_.floor = training_.epsilon_floor;
    epsilon_.decay = training_.epsilon_decay;
    const std::size_t n = scenario_.num_uavs;
    agents_.resize(n);
    explore_rng_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        RngStream init_rng(scenario_.master_seed, "init/agent/" + std::to_string(i));
        agents_[i].online = network_.init_params(init_rng);
        agents_[i].target = net::clone_params(agents_[i].online);
        explore_rng_.emplace_back(scenario_.master_seed, "explore/agent/" + std::to_string(i));
    }
}

void Trainer::sync_targets() {
    for (auto& agent : agents_) agent.target = net::clone_params(agent.online);
}

EpisodeRow Trainer::run_train_episode() {
    const std::size_t n = scenario_.num_uavs;
    const std::size_t steps = scenario_.steps_per_episode;
    std::vector<std::vector<double>> obs = env_.reset();
    double reward_sum = 0.0, semantic_sum = 0.0, loss_sum = 0.0;
    std::size_t trained_steps = 0;
    std::vector<std::size_t> actions(n);
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t i = 0; i < n; ++i)
            actions[i] = select_action(network_, agents_[i].online, obs[i], epsilon_.value,
                                       explore_rng_[i]);
        env::StepResult res = env_.step(actions);
        memory_.push({obs, actions, res.next_obs, res.reward});
        if (memory_.size() >= training_.batch_size) {
            const auto batch = memory_.sample_indices(training_.batch_size, replay_rng_);
            loss_sum += train_step(network_, agents_, memory_, batch, training_.gamma,
                                   training_.learning_rate);
            ++trained_steps;
            ++gradient_updates_;
            if (gradient_updates_ % training_.target_sync_period == 0) sync_targets();
        }
        epsilon_.step();
        reward_sum += res.reward;
        semantic_sum += res.semantic_reward;
        if (trace_) trace_->push_back({episodes_done_ + 1, t, actions, res.rates, res.reward});
        obs = std::move(res.next_obs);
    }
    ++episodes_done_;
    EpisodeRow row;
    row.episode = episodes_done_;
    row.test = false;
    row.epsilon = epsilon_.value;
    row.reward_mean = reward_sum / static_cast<double>(steps);
    row.semantic_mean = semantic_sum / static_cast<double>(steps);
    row.loss_mean = trained_steps == 0 ? 0.0 : loss_sum / static_cast<double>(trained_steps);
    return row;
}

EpisodeRow Trainer::run_test_episode(std::size_t index) {
    const std::size_t n = scenario_.num_uavs;
    const std::size_t steps = scenario_.steps_per_episode;
    std::vector<std::vector<double>> obs = env_.reset();
    double reward_sum = 0.0, semantic_sum = 0.0;
    std::vector<std::size_t> actions(n);
    RngStream unused;
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t i = 0; i < n; ++i)
            actions[i] = select_action(network_, agents_[i].online, obs[i], 0.0, unused);
        env::StepResult res = env_.step(actions);
        reward_sum += res.reward;
        semantic_sum += res.semantic_reward;
        if (trace_) trace_->push_back({episodes_done_ + index, t, actions, res.rates, res.reward});
        obs = std::move(res.next_obs);
    }
    EpisodeRow row;
    row.episode = index;
    row.test = true;
    row.epsilon = 0.0;
    row.reward_mean = reward_sum / static_cast<double>(steps);
    row.semantic_mean = semantic_sum / static_cast<double>(steps);
    return row;
}

std::vector<EpisodeRow> Trainer::run() {
    std::vector<EpisodeRow> rows;
    rows.reserve(training_.train_episodes + training_.test_episodes);
    for (std::size_t e = 0; e < training_.train_episodes; ++e) rows.push_back(run_train_episode());
    test_objectives_.clear();
    for (std::size_t e = 0; e < training_.test_episodes; ++e) {
        rows.push_back(run_test_episode(e + 1));
        test_objectives_.push_back(rows.back().semantic_mean);
    }
    return rows;
}

namespace {

std::string hex_u64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string hex_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

void save_adam(const std::string& path, const net::AdamState& state, std::size_t count) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for write: " + path);
    out.write(kAdamMagic, sizeof kAdamMagic);
    write_u64(out, state.step);
    write_u64(out, count);
    std::vector<double> m = state.m, v = state.v;
    if (m.empty()) m.assign(count, 0.0);
    if (v.empty()) v.assign(count, 0.0);
    write_doubles(out, m);
    write_doubles(out, v);
    if (!out) throw std::runtime_error("write failure: " + path);
}

net::AdamState load_adam(const std::string& path, std::size_t expected_count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kAdamMagic, sizeof magic) != 0)
        throw std::runtime_error("optimizer file has wrong magic: " + path);
    net::AdamState state;
    state.step = read_u64(in);
    const std::size_t count = read_u64(in);
    if (count != expected_count) throw std::runtime_error("optimizer file size mismatch: " + path);
    read_doubles(in, state.m, count);
    read_doubles(in, state.v, count);
    if (!in) throw std::runtime_error("optimizer file truncated: " + path);
    return state;
}

} // namespace

void Trainer::save_checkpoint(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream manifest(fs::path(dir) / "manifest.txt");
    if (!manifest) throw std::runtime_error("cannot write checkpoint manifest in " + dir);
    manifest << "version=1\n";
    manifest << "scenario_hash=" << hex_u64(scenario_.config_hash()) << "\n";
    manifest << "include_shared_coverage=" << (variant_.include_shared_coverage ? 1 : 0) << "\n";
    manifest << "reward_kind=" << (variant_.reward == env::RewardKind::Semantic ? "semantic" : "bitrate")
             << "\n";
    manifest << "num_agents=" << agents_.size() << "\n";
    manifest << "param_count=" << network_.param_count() << "\n";
    manifest << "episodes_done=" << episodes_done_ << "\n";
    manifest << "gradient_updates=" << gradient_updates_ << "\n";
    manifest << "epsilon=" << hex_double(epsilon_.value) << "\n";
    for (std::size_t i = 0; i < explore_rng_.size(); ++i)
        manifest << "rng_explore_" << i << "=" << explore_rng_[i].save_state() << "\n";
    manifest << "rng_replay=" << replay_rng_.save_state() << "\n";
    if (!manifest) throw std::runtime_error("write failure: checkpoint manifest");

    for (std::size_t i = 0; i < agents_.size(); ++i) {
        const std::string stem = (fs::path(dir) / ("agent_" + std::to_string(i))).string();
        net::save_params(stem + "_online.bin", network_.spec(), agents_[i].online);
        net::save_params(stem + "_target.bin", network_.spec(), agents_[i].target);
        save_adam(stem + "_adam.bin", agents_[i].adam, network_.param_count());
    }
    std::ofstream replay_out(fs::path(dir) / "replay.bin", std::ios::binary);
    if (!replay_out) throw std::runtime_error("cannot write replay file in " + dir);
    memory_.save(replay_out);
    if (!replay_out) throw std::runtime_error("write failure: replay file");
}

void Trainer::load_checkpoint(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream manifest(fs::path(dir) / "manifest.txt");
    if (!manifest) throw std::runtime_error("cannot open checkpoint manifest in " + dir);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(manifest, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto need = [&](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw std::runtime_error("checkpoint manifest missing key: " + key);
        return it->second;
    };
    if (need("version") != "1") throw std::runtime_error("unsupported checkpoint version");
    if (need("scenario_hash") != hex_u64(scenario_.config_hash()))
        throw std::runtime_error("checkpoint was produced by a different scenario");
    if (need("num_agents") != std::to_string(agents_.size()))
        throw std::runtime_error("checkpoint agent count mismatch");
    if (need("param_count") != std::to_string(network_.param_count()))
        throw std::runtime_error("checkpoint parameter count mismatch");
    episodes_done_ = std::stoull(need("episodes_done"));
    gradient_updates_ = std::stoull(need("gradient_updates"));
    epsilon_.value = std::strtod(need("epsilon").c_str(), nullptr);
    for (std::size_t i = 0; i < explore_rng_.size(); ++i)
        explore_rng_[i].load_state(need("rng_explore_" + std::to_string(i)));
    replay_rng_.load_state(need("rng_replay"));

    for (std::size_t i = 0; i < agents_.size(); ++i) {
        const std::string stem = (fs::path(dir) / ("agent_" + std::to_string(i))).string();
        agents_[i].online = net::load_params(stem + "_online.bin", network_.spec());
        agents_[i].target = net::load_params(stem + "_target.bin", network_.spec());
        agents_[i].adam = load_adam(stem + "_adam.bin", network_.param_count());
    }
    std::ifstream replay_in(fs::path(dir) / "replay.bin", std::ios::binary);
    if (!replay_in) throw std::runtime_error("cannot open replay file in " + dir);
    memory_.load(replay_in);
}

std::vector<double> evaluate_greedy(const ScenarioConfig& scenario, const env::EnvVariant& variant,
                                    const TrainingConfig& training,
                                    const std::vector<Agent>& agents, std::size_t episodes) {
    env::Environment environment(scenario, variant);
    net::Network network(make_spec(environment, training));
    if (agents.empty() || agents.front().online.size() != network.param_count())
        throw std::invalid_argument("evaluate_greedy: agents do not match the scenario's network");
    const std::size_t n = scenario.num_uavs;
    std::vector<double> objectives;
    objectives.reserve(episodes);
    RngStream unused;
    std::vector<std::size_t> actions(n);
    for (std::size_t e = 0; e < episodes; ++e) {
        auto obs = environment.reset();
        double semantic_sum = 0.0;
        for (std::size_t t = 0; t < scenario.steps_per_episode; ++t) {
            for (std::size_t i = 0; i < n; ++i)
                actions[i] = select_action(network, agents[i].online, obs[i], 0.0, unused);
            env::StepResult res = environment.step(actions);
            semantic_sum += res.semantic_reward;
            obs = std::move(res.next_obs);
        }
        objectives.push_back(semantic_sum / static_cast<double>(scenario.steps_per_episode));
    }
    return objectives;
}

void write_episode_csv(const std::string& path, const std::vector<EpisodeRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for write: " + path);
    out << "episode,phase,epsilon,reward_mean,semantic_mean,loss_mean\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%s,%.10g,%.10g,%.10g,%.10g\n", r.episode,
                      r.test ? "test" : "train", r.epsilon, r.reward_mean, r.semantic_mean,
                      r.loss_mean);
        out << buf;
    }
    if (!out) throw std::runtime_error("write failure: " + path);
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows,
                     std::size_t num_uavs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open file for write: " + path);
    out << "episode,t";
    for (std::size_t i = 0; i < num_uavs; ++i) out << ",action_" << i;
    for (std::size_t i = 0; i < num_uavs; ++i) out << ",rate_" << i;
    out << ",reward\n";
    char buf[40];
    for (const auto& r : rows) {
        out << r.episode << "," << r.t;
        for (std::size_t i = 0; i < num_uavs; ++i) out << "," << r.actions[i];
        for (std::size_t i = 0; i < num_uavs; ++i) {
            std::snprintf(buf, sizeof buf, ",%.10g", r.rates[i]);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.10g\n", r.reward);
        out << buf;
    }
    if (!out) throw std::runtime_error("write failure: " + path);
}

} // namespace uavcov::marl
