#include "aknn/active_search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aknn {

namespace {

// Largest s >= 0 with s * s <= v. Exact; the double sqrt is only a guess.
std::int64_t isqrt(std::int64_t v) {
    if (v <= 0) return 0;
    auto s = std::int64_t(std::sqrt(double(v)));
    while (s > 0 && s * s > v) --s;
    while ((s + 1) * (s + 1) <= v) ++s;
    return s;
}

// Half-width of the circle's row at vertical offset dy, in pixels.
inline std::int64_t row_span(Metric metric, std::int64_t r, std::int64_t dy) {
    return metric == Metric::L2 ? isqrt(r * r - dy * dy) : r - std::llabs(dy);
}

}  // namespace

int update_radius(int r, std::uint64_t n, int k) {
    if (r < 1 || n < 1 || k < 1)
        throw std::invalid_argument("update_radius: r, n, k must be >= 1");
    const double scale = std::sqrt(double(k) / double(n));
    const long long next = std::llround(double(r) * scale);
    return int(std::max(1LL, next));
}

std::vector<std::uint64_t> count_in_circle(const RasterGrid& grid,
                                           PixelCoord center, int r,
                                           Metric metric) {
    if (r < 0) throw std::invalid_argument("count_in_circle: negative radius");
    const int res = grid.resolution();
    std::vector<std::uint64_t> counts(grid.num_classes(), 0);

    const int row_lo = std::max(0, center.row - r);
    const int row_hi = std::min(res - 1, center.row + r);
    for (int row = row_lo; row <= row_hi; ++row) {
        const std::int64_t span = row_span(metric, r, row - center.row);
        const int c0 = std::max(0, center.col - int(span));
        const int c1 = std::min(res - 1, center.col + int(span));
        const std::size_t base = std::size_t(row) * std::size_t(res);
        for (int cls = 0; cls < grid.num_classes(); ++cls) {
            if (grid.row_total(cls, row) == 0) continue;  // provably empty
            const std::uint32_t* p = grid.plane(cls).data() + base;
            std::uint64_t acc = 0;
            for (int col = c0; col <= c1; ++col) acc += p[col];
            counts[cls] += acc;
        }
    }
    return counts;
}

std::vector<CircleHit> collect_in_circle(const RasterGrid& grid,
                                         PixelCoord center, int r,
                                         Metric metric) {
    if (r < 0) throw std::invalid_argument("collect_in_circle: negative radius");
    const int res = grid.resolution();
    std::vector<CircleHit> hits;

    const int row_lo = std::max(0, center.row - r);
    const int row_hi = std::min(res - 1, center.row + r);
    for (int row = row_lo; row <= row_hi; ++row) {
        const std::int64_t dy = row - center.row;
        const std::int64_t span = row_span(metric, r, dy);
        const int c0 = std::max(0, center.col - int(span));
        const int c1 = std::min(res - 1, center.col + int(span));
        bool any_class = false;
        for (int cls = 0; cls < grid.num_classes(); ++cls)
            any_class = any_class || grid.row_total(cls, row) != 0;
        if (!any_class) continue;
        for (int col = c0; col <= c1; ++col) {
            const std::int64_t dx = col - center.col;
            for (int cls = 0; cls < grid.num_classes(); ++cls) {
                const std::uint32_t n = grid.count_at(cls, {col, row});
                if (n == 0) continue;
                CircleHit hit;
                hit.pixel = {col, row};
                hit.label = cls;
                hit.count = n;
                hit.dist_key = metric == Metric::L2 ? dx * dx + dy * dy
                                                    : std::llabs(dx) + std::llabs(dy);
                hit.distance = metric == Metric::L2
                                   ? std::sqrt(double(hit.dist_key))
                                   : double(hit.dist_key);
                if (grid.has_buckets()) {
                    for (std::uint32_t id : grid.bucket({col, row}))
                        if (grid.label_of(id) == cls) hit.point_ids.push_back(id);
                }
                hits.push_back(std::move(hit));
            }
        }
    }

    // Cell-level neighbor order: distance, pixel row-major, class id.
    std::sort(hits.begin(), hits.end(),
              [](const CircleHit& a, const CircleHit& b) {
                  if (a.dist_key != b.dist_key) return a.dist_key < b.dist_key;
                  if (a.pixel.row != b.pixel.row) return a.pixel.row < b.pixel.row;
                  if (a.pixel.col != b.pixel.col) return a.pixel.col < b.pixel.col;
                  return a.label < b.label;
              });
    return hits;
}

namespace {

// Sorts the final hit list and truncates it to multiplicity exactly k.
// With buckets the cut is made at point-id granularity (the shared
// NeighborKey order); without them the boundary cell's count is clipped.
std::vector<Neighbor> take_k(std::vector<CircleHit> hits, int k,
                             bool has_buckets) {
    std::vector<Neighbor> out;
    if (!has_buckets) {
        std::uint64_t taken = 0;
        for (auto& h : hits) {
            if (taken >= std::uint64_t(k)) break;
            Neighbor n;
            n.pixel = h.pixel;
            n.label = h.label;
            n.distance = h.distance;
            n.count = std::uint32_t(
                std::min<std::uint64_t>(h.count, std::uint64_t(k) - taken));
            taken += n.count;
            out.push_back(std::move(n));
        }
        return out;
    }

    struct Candidate {
        NeighborKey key;
        int label;
        double distance;
    };
    std::vector<Candidate> flat;
    for (const auto& h : hits)
        for (std::uint32_t id : h.point_ids)
            flat.push_back({{h.dist_key, h.pixel.row, h.pixel.col, id},
                            h.label,
                            h.distance});
    std::sort(flat.begin(), flat.end(),
              [](const Candidate& a, const Candidate& b) { return a.key < b.key; });
    if (flat.size() > std::size_t(k)) flat.resize(std::size_t(k));

    // Regroup consecutive points of one (pixel, class) cell.
    for (const auto& c : flat) {
        if (!out.empty() && out.back().pixel.row == c.key.row &&
            out.back().pixel.col == c.key.col && out.back().label == c.label) {
            ++out.back().count;
            out.back().point_ids.push_back(c.key.index);
        } else {
            Neighbor n;
            n.pixel = {c.key.col, c.key.row};
            n.label = c.label;
            n.distance = c.distance;
            n.count = 1;
            n.point_ids.push_back(c.key.index);
            out.push_back(std::move(n));
        }
    }
    return out;
}

}  // namespace

QueryResult active_knn(const RasterGrid& grid, double x, double y,
                       const SearchParams& params) {
    if (params.k < 1 || params.r0 < 1 || params.max_iters < 1)
        throw std::invalid_argument("active_knn: k, r0, max_iters must be >= 1");
    if (std::uint64_t(params.k) > grid.total_points())
        throw std::invalid_argument(
            "active_knn: k=" + std::to_string(params.k) +
            " exceeds dataset size " + std::to_string(grid.total_points()));

    const PixelCoord center = pixel_of(grid.config(), x, y);
    const int cap = 2 * grid.resolution();
    const int k = params.k;

    // Bracket invariant: count(lo) < k <= count(hi). lo = -1 stands for the
    // empty circle; hi = cap encloses the whole grid from any center, so its
    // count is the total point count even before it is ever scanned.
    int lo = -1;
    int hi = cap;
    int r = std::clamp(params.r0, 1, cap);
    std::vector<bool> visited(std::size_t(cap) + 1, false);

    QueryResult result;
    auto finish = [&](Termination term, int r_star) {
        result.trace.terminated_by = term;
        result.neighbors = take_k(
            collect_in_circle(grid, center, r_star, params.metric), k,
            grid.has_buckets());
        std::vector<std::uint64_t> votes(grid.num_classes(), 0);
        for (const auto& n : result.neighbors) votes[n.label] += n.count;
        result.predicted_class = majority_vote(votes);
        return result;
    };

    for (int iter = 0; iter < params.max_iters; ++iter) {
        const auto per_class = count_in_circle(grid, center, r, params.metric);
        std::uint64_t n = 0;
        for (auto c : per_class) n += c;
        result.trace.steps.push_back({r, n});
        visited[std::size_t(r)] = true;

        if (n == std::uint64_t(k)) return finish(Termination::ExactK, r);
        if (n < std::uint64_t(k))
            lo = std::max(lo, r);
        else
            hi = std::min(hi, r);
        if (hi - lo == 1) return finish(Termination::Bracketed, hi);

        int next;
        if (n == 0)
            next = r <= cap / 2 ? std::max(2 * r, 1) : cap;
        else if (r == 0)
            next = 1;  // bisection probes can reach radius 0; the update rule cannot
        else
            next = std::min(update_radius(r, n, k), cap);
        // A proposal that leaves the open bracket, stalls, or revisits a
        // scanned radius cannot make progress; take the bracket midpoint
        // instead (plain integer bisection on [lo, hi]).
        if (next <= lo || next >= hi || next == r || visited[std::size_t(next)])
            next = lo + (hi - lo) / 2;
        r = next;
    }

    // Iteration cap: hi is the best known enclosing radius and is always
    // valid, scanned or not.
    return finish(Termination::IterationCap, hi);
}

int classify(const RasterGrid& grid, double x, double y,
             const SearchParams& params, QueryResult* result) {
    QueryResult r = active_knn(grid, x, y, params);
    const int predicted = r.predicted_class;
    if (result) *result = std::move(r);
    return predicted;
}

}  // namespace aknn
