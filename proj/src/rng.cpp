#include "uavcov/rng.hpp"

#include <sstream>
#include <stdexcept>

namespace uavcov {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::string_view stream_name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : stream_name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::uint64_t state = master_seed ^ h;
    std::uint64_t a = splitmix64(state);
    std::uint64_t b = splitmix64(state);
    return a ^ (b << 1 | b >> 63);
}

RngStream::RngStream(std::uint64_t master_seed, std::string_view stream_name)
    : engine_(derive_stream_seed(master_seed, stream_name)) {}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % bound;
}

std::string RngStream::save_state() const {
    std::ostringstream oss;
    oss << engine_;
    return oss.str();
}

void RngStream::load_state(const std::string& text) {
    std::istringstream iss(text);
    iss >> engine_;
    if (iss.fail()) throw std::runtime_error("rng state parse failure");
}

} // namespace uavcov
