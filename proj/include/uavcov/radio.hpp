#ifndef UAVCOV_RADIO_HPP
#define UAVCOV_RADIO_HPP

#include <cstddef>
#include <vector>

namespace uavcov::radio {

struct Position3D {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// gains[uav][bs], each entry distance^(-alpha), strictly positive.
struct PathGainTable {
    std::vector<std::vector<double>> gains;
    double alpha = 2.0;

    std::size_t num_uavs() const { return gains.size(); }
    std::size_t num_bs() const { return gains.empty() ? 0 : gains.front().size(); }
};

// powers[uav][channel] in watts, entries drawn from the discrete level set.
struct PowerAllocation {
    std::vector<std::vector<double>> powers;

    std::size_t num_uavs() const { return powers.size(); }
    std::size_t num_channels() const { return powers.empty() ? 0 : powers.front().size(); }
};

using RateVector = std::vector<double>;

// Free-space gain (3D Euclidean distance)^(-alpha).  Throws on coincident
// positions where the gain is undefined.
double path_gain(const Position3D& uav_pos, const Position3D& bs_pos, double alpha);

PathGainTable build_gain_table(const std::vector<Position3D>& uav_positions,
                               const std::vector<Position3D>& bs_positions,
                               double alpha);

// Index of the highest-gain BS for one UAV; ties break to the lowest index.
std::size_t associate_bs(const PathGainTable& gains, std::size_t uav);

std::vector<std::size_t> associate_all(const PathGainTable& gains);

// p_{i,c}*h_{i,b_i} / (sum_{j != i} p_{j,c}*h_{j,b_i} + noise).  Interference
// is summed at UAV i's own associated BS using every other UAV's gain to that
// BS, regardless of the interferer's own association.
double sinr(std::size_t uav, std::size_t channel,
            const PowerAllocation& alloc, const PathGainTable& gains,
            const std::vector<std::size_t>& assoc, double noise);

// rates[i] = sum over channels of log2(1 + sinr).  Spectral efficiency; no
// bandwidth factor.
RateVector rates(const PowerAllocation& alloc, const PathGainTable& gains,
                 const std::vector<std::size_t>& assoc, double noise);

} // namespace uavcov::radio

#endif
