#ifndef UAVCOV_REPLAY_HPP
#define UAVCOV_REPLAY_HPP

#include "uavcov/rng.hpp"

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace uavcov::marl {

// One shared-reward step: per-agent observation windows and action indices
// plus the scalar team reward.
struct Transition {
    std::vector<std::vector<double>> obs;      // per agent, flattened window
    std::vector<std::size_t> actions;          // per agent
    std::vector<std::vector<double>> next_obs; // per agent
    double reward = 0.0;
};

// Fixed-capacity FIFO ring buffer.  Logical index 0 is always the oldest
// stored transition.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity) : capacity_(capacity) {
        if (capacity < 1) throw std::invalid_argument("replay capacity must be at least 1");
        buffer_.reserve(capacity);
    }

    std::size_t size() const { return buffer_.size(); }
    std::size_t capacity() const { return capacity_; }

    void push(Transition t) {
        if (buffer_.size() < capacity_) {
            buffer_.push_back(std::move(t));
        } else {
            buffer_[head_] = std::move(t);
            head_ = (head_ + 1) % capacity_;
        }
    }

    const Transition& at(std::size_t logical) const {
        if (logical >= buffer_.size()) throw std::out_of_range("replay index out of range");
        return buffer_[(head_ + logical) % buffer_.size()];
    }

    // Uniform sample without replacement (partial Fisher-Yates), returning
    // logical indices; deterministic given the rng state.
    std::vector<std::size_t> sample_indices(std::size_t count, RngStream& rng) const;

    void save(std::ostream& out) const;
    void load(std::istream& in);

private:
    std::size_t capacity_;
    std::size_t head_ = 0; // slot of the oldest element once full
    std::vector<Transition> buffer_;
};

} // namespace uavcov::marl

#endif
