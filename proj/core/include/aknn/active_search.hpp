#pragma once

#include <cstdint>
#include <vector>

#include "aknn/neighbor.hpp"
#include "aknn/raster.hpp"

namespace aknn {

/// Parameters of one active search. `r0` is the initial scan radius in
/// pixels; `max_iters` is a termination guard, not a tuning knob (the search
/// normally stops long before it).
struct SearchParams {
    int k = 11;
    int r0 = 100;
    int max_iters = 64;
    Metric metric = Metric::L2;
};

enum class Termination {
    ExactK,        // a scan enclosed exactly k points
    Bracketed,     // no radius encloses exactly k; minimal enclosing radius used
    IterationCap,  // max_iters reached; best-effort result
};

/// One scan of the search loop: the radius tried and the number of points
/// (with multiplicity) the circle enclosed.
struct SearchStep {
    int radius = 0;
    std::uint64_t count = 0;
};

/// Per-query history. Each step's count is reproducible by recounting at
/// that radius.
struct SearchTrace {
    std::vector<SearchStep> steps;
    Termination terminated_by = Termination::ExactK;
};

/// One returned neighbor entry: an occupied (pixel, class) cell inside the
/// final circle. `count` is the multiplicity taken from the cell (the
/// outermost entry may be truncated to make the total exactly k).
/// `point_ids` identifies the points when the grid kept buckets, ascending.
struct Neighbor {
    PixelCoord pixel;
    int label = 0;
    double distance = 0.0;  // pixel units
    std::uint32_t count = 0;
    std::vector<std::uint32_t> point_ids;
};

/// Result of a query: neighbors with total multiplicity k, sorted by the
/// shared neighbor order (distances non-decreasing), the majority-vote class
/// and the search trace.
struct QueryResult {
    std::vector<Neighbor> neighbors;
    int predicted_class = 0;
    SearchTrace trace;

    std::uint64_t multiplicity() const {
        std::uint64_t m = 0;
        for (const auto& n : neighbors) m += n.count;
        return m;
    }
};

/// The radius update rule: r' = round(r * sqrt(k / n)), rounding half away
/// from zero, floored at 1. Holds the fixed point r' = r at n = k, grows the
/// radius when n < k and shrinks it when n > k. Callers must not pass n = 0
/// (the search doubles the radius instead of dividing by zero).
int update_radius(int r, std::uint64_t n, int k);

/// Number of points per class inside the circle of radius r around `center`.
/// Membership is exact integer arithmetic on pixel deltas: dx^2 + dy^2 <= r^2
/// for L2, |dx| + |dy| <= r for L1. At most the (2r+1)^2 bounding box clipped
/// to the grid is visited; rows a class has no points in are skipped via the
/// grid's per-row totals, which leaves the counts unchanged.
std::vector<std::uint64_t> count_in_circle(const RasterGrid& grid,
                                           PixelCoord center, int r,
                                           Metric metric);

/// A hit produced by collect_in_circle: one occupied (pixel, class) cell.
/// `point_ids` is filled (ascending) when the grid kept buckets.
struct CircleHit {
    PixelCoord pixel;
    int label = 0;
    std::uint32_t count = 0;
    std::int64_t dist_key = 0;  // squared L2 / plain L1 distance to center
    double distance = 0.0;
    std::vector<std::uint32_t> point_ids;
};

/// Itemized variant of count_in_circle. Hits come back sorted by the shared
/// neighbor order; multiplicity-weighted totals match count_in_circle.
std::vector<CircleHit> collect_in_circle(const RasterGrid& grid,
                                         PixelCoord center, int r,
                                         Metric metric);

/// The adaptive-radius k-nearest-neighbor query.
///
/// Maps the query point to its pixel, then repeatedly scans a circle whose
/// radius starts at r0 and is rescaled by update_radius (doubled while the
/// circle is empty). A scan enclosing exactly k points terminates the search
/// (ExactK). Every scan also tightens a bracket [lo, hi] with
/// count(lo) < k <= count(hi); when the bracket closes to width one, the
/// search terminates at hi, the minimal radius enclosing at least k points
/// (Bracketed). A proposed radius that would leave the open bracket, repeat
/// the current radius, or revisit a scanned one is replaced by the bracket
/// midpoint, so the loop cannot oscillate. Radii live in [1, 2 * resolution];
/// a circle of radius 2 * resolution covers the whole grid from any center.
///
/// The final hit list is sorted by the shared neighbor order and truncated to
/// total multiplicity exactly k. If max_iters scans were spent first, the
/// best known enclosing radius is used and the trace says IterationCap.
///
/// Throws std::invalid_argument when k exceeds the number of gridded points.
QueryResult active_knn(const RasterGrid& grid, double x, double y,
                       const SearchParams& params);

/// Runs active_knn and returns its majority-vote class (ties to the lowest
/// class id) alongside the full result.
int classify(const RasterGrid& grid, double x, double y,
             const SearchParams& params, QueryResult* result = nullptr);

}  // namespace aknn
