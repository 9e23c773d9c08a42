#ifndef UAVCOV_RNG_HPP
#define UAVCOV_RNG_HPP

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace uavcov {

// Deterministic substream derivation: a master seed plus a stream name yields
// an independent mt19937_64 engine.  Substreams are stable under changes to
// unrelated streams (adding a UAV does not perturb the others' draws).
std::uint64_t splitmix64(std::uint64_t& state);

// FNV-1a over the stream name, then splitmix64-mixed with the master seed.
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::string_view stream_name);

class RngStream {
public:
    RngStream() : engine_(0) {}
    RngStream(std::uint64_t master_seed, std::string_view stream_name);

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform in [0, bound) by rejection; bound must be positive.
    std::uint64_t next_below(std::uint64_t bound);

    // Text round-trip of the full engine state.
    std::string save_state() const;
    void load_state(const std::string& text);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

} // namespace uavcov

#endif
