#include "uavcov/geometry.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <unordered_map>

namespace uavcov::geometry {

SegmentDecomposition decompose(const std::vector<ObservationSquare>& squares) {
    if (squares.empty()) throw std::invalid_argument("decompose: no squares");
    if (squares.size() > 64) throw std::invalid_argument("decompose: more than 64 squares");

    std::vector<double> xs, ys;
    xs.reserve(2 * squares.size());
    ys.reserve(2 * squares.size());
    for (const auto& s : squares) {
        const double h = s.side / 2.0;
        xs.push_back(s.center_x - h);
        xs.push_back(s.center_x + h);
        ys.push_back(s.center_y - h);
        ys.push_back(s.center_y + h);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    std::unordered_map<std::uint64_t, double> by_members;
    for (std::size_t ix = 0; ix + 1 < xs.size(); ++ix) {
        const double cx = 0.5 * (xs[ix] + xs[ix + 1]);
        const double w = xs[ix + 1] - xs[ix];
        for (std::size_t iy = 0; iy + 1 < ys.size(); ++iy) {
            const double cy = 0.5 * (ys[iy] + ys[iy + 1]);
            const double h = ys[iy + 1] - ys[iy];
            std::uint64_t members = 0;
            for (std::size_t k = 0; k < squares.size(); ++k) {
                const auto& s = squares[k];
                const double half = s.side / 2.0;
                if (cx >= s.center_x - half && cx < s.center_x + half &&
                    cy >= s.center_y - half && cy < s.center_y + half) {
                    members |= std::uint64_t{1} << s.owner;
                }
            }
            if (members != 0) by_members[members] += w * h;
        }
    }

    SegmentDecomposition decomp;
    decomp.segments.reserve(by_members.size());
    for (const auto& [members, area] : by_members) decomp.segments.push_back({members, area});
    std::sort(decomp.segments.begin(), decomp.segments.end(),
              [](const Segment& a, const Segment& b) { return a.members < b.members; });
    return decomp;
}

double shared_coverage_degree(std::size_t uav, const SegmentDecomposition& decomp, double side) {
    const std::uint64_t bit = std::uint64_t{1} << uav;
    double weighted = 0.0;
    bool found = false;
    for (const auto& seg : decomp.segments) {
        if (seg.members & bit) {
            weighted += seg.area * static_cast<double>(std::popcount(seg.members));
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("unknown uav");
    return weighted / (side * side);
}

double union_area(const SegmentDecomposition& decomp) {
    double total = 0.0;
    for (const auto& seg : decomp.segments) total += seg.area;
    return total;
}

} // namespace uavcov::geometry
