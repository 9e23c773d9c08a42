#include "uavcov/radio.hpp"

#include <cmath>
#include <stdexcept>

namespace uavcov::radio {

double path_gain(const Position3D& uav_pos, const Position3D& bs_pos, double alpha) {
    const double dx = uav_pos.x - bs_pos.x;
    const double dy = uav_pos.y - bs_pos.y;
    const double dz = uav_pos.z - bs_pos.z;
    const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (dist == 0.0) throw std::invalid_argument("coincident positions");
    return std::pow(dist, -alpha);
}

PathGainTable build_gain_table(const std::vector<Position3D>& uav_positions,
                               const std::vector<Position3D>& bs_positions,
                               double alpha) {
    PathGainTable table;
    table.alpha = alpha;
    table.gains.resize(uav_positions.size());
    for (std::size_t i = 0; i < uav_positions.size(); ++i) {
        table.gains[i].resize(bs_positions.size());
        for (std::size_t b = 0; b < bs_positions.size(); ++b) {
            table.gains[i][b] = path_gain(uav_positions[i], bs_positions[b], alpha);
        }
    }
    return table;
}

std::size_t associate_bs(const PathGainTable& gains, std::size_t uav) {
    const auto& row = gains.gains.at(uav);
    if (row.empty()) throw std::invalid_argument("no base stations");
    std::size_t best = 0;
    for (std::size_t b = 1; b < row.size(); ++b) {
        if (row[b] > row[best]) best = b;
    }
    return best;
}

std::vector<std::size_t> associate_all(const PathGainTable& gains) {
    std::vector<std::size_t> assoc(gains.num_uavs());
    for (std::size_t i = 0; i < assoc.size(); ++i) assoc[i] = associate_bs(gains, i);
    return assoc;
}

double sinr(std::size_t uav, std::size_t channel,
            const PowerAllocation& alloc, const PathGainTable& gains,
            const std::vector<std::size_t>& assoc, double noise) {
    const std::size_t bs = assoc.at(uav);
    const double signal = alloc.powers[uav][channel] * gains.gains[uav][bs];
    double interference = 0.0;
    for (std::size_t j = 0; j < alloc.num_uavs(); ++j) {
        if (j == uav) continue;
        interference += alloc.powers[j][channel] * gains.gains[j][bs];
    }
    return signal / (interference + noise);
}

RateVector rates(const PowerAllocation& alloc, const PathGainTable& gains,
                 const std::vector<std::size_t>& assoc, double noise) {
    RateVector out(alloc.num_uavs(), 0.0);
    for (std::size_t i = 0; i < alloc.num_uavs(); ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < alloc.num_channels(); ++c) {
            sum += std::log2(1.0 + sinr(i, c, alloc, gains, assoc, noise));
        }
        out[i] = sum;
    }
    return out;
}

} // namespace uavcov::radio
