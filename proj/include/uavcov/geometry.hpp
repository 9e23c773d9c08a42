#ifndef UAVCOV_GEOMETRY_HPP
#define UAVCOV_GEOMETRY_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace uavcov::geometry {

struct ObservationSquare {
    std::size_t owner = 0;
    double center_x = 0.0;
    double center_y = 0.0;
    double side = 0.0;
};

// members is a bitmask over UAV indices (bit i set when UAV i observes the
// segment); supports up to 64 UAVs.
struct Segment {
    std::uint64_t members = 0;
    double area = 0.0;
};

struct SegmentDecomposition {
    std::vector<Segment> segments;
};

// Exact decomposition by coordinate compression: the 2N square edges per axis
// induce a cell grid; each cell is assigned the set of squares containing its
// center (squares treated as half-open [x0,x1) x [y0,y1)); cells with equal
// nonempty member sets merge into one segment.
SegmentDecomposition decompose(const std::vector<ObservationSquare>& squares);

// Area-weighted average number of UAVs observing points of i's square:
// (sum over segments containing i of area * popcount(members)) / side^2.
// Value lies in [1, N].  Throws if uav appears in no segment.
double shared_coverage_degree(std::size_t uav, const SegmentDecomposition& decomp, double side);

double union_area(const SegmentDecomposition& decomp);

} // namespace uavcov::geometry

#endif
