#include "aknn/active_search.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "doctest.h"
#include "support/support.hpp"

using namespace aknn;

namespace {

std::uint64_t total(const std::vector<std::uint64_t>& per_class) {
    std::uint64_t t = 0;
    for (auto c : per_class) t += c;
    return t;
}

std::vector<std::uint32_t> flat_ids(const QueryResult& result) {
    std::vector<std::uint32_t> ids;
    for (const auto& n : result.neighbors)
        ids.insert(ids.end(), n.point_ids.begin(), n.point_ids.end());
    return ids;
}

// Test-local ground truth, independent of both the search loop and the
// oracle module: quantize all points, sort by the shared neighbor order,
// take k.
std::vector<std::uint32_t> local_pixel_knn(const Dataset& ds,
                                           const GridConfig& cfg,
                                           PixelCoord q, int k, Metric metric) {
    std::vector<NeighborKey> keys;
    for (std::uint32_t i = 0; i < ds.points.size(); ++i) {
        const PixelCoord px = pixel_of(cfg, ds.points[i].x, ds.points[i].y);
        const std::int64_t dx = px.col - q.col;
        const std::int64_t dy = px.row - q.row;
        keys.push_back({metric == Metric::L2 ? dx * dx + dy * dy
                                             : std::llabs(dx) + std::llabs(dy),
                        px.row, px.col, i});
    }
    std::sort(keys.begin(), keys.end());
    std::vector<std::uint32_t> ids;
    for (int i = 0; i < k; ++i) ids.push_back(keys[std::size_t(i)].index);
    return ids;
}

}  // namespace

TEST_CASE("update_radius: frozen examples") {
    CHECK(update_radius(100, 11, 11) == 100);  // fixed point
    CHECK(update_radius(100, 44, 11) == 50);   // sqrt(11/44) = 1/2
    CHECK(update_radius(100, 25, 11) == 66);   // 100*sqrt(0.44) = 66.33...
}

TEST_CASE("update_radius: floors at 1 and rejects bad input") {
    CHECK(update_radius(1, 1000000, 1) == 1);
    CHECK_THROWS_AS(update_radius(0, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(update_radius(1, 0, 1), std::invalid_argument);
}

TEST_CASE("update_radius: fixed point and direction (property)") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 2000; ++trial) {
        const int r = 1 + int(rng() % 6000);
        const std::uint64_t n = 1 + rng() % 10000;
        const int k = 1 + int(rng() % 100);

        CHECK(update_radius(r, std::uint64_t(k), k) == r);
        const int next = update_radius(r, n, k);
        CHECK(next >= 1);
        if (n < std::uint64_t(k)) CHECK(next >= r);
        if (n > std::uint64_t(k)) CHECK(next <= r);
    }
}

TEST_CASE("count_in_circle: empty grid") {
    const RasterGrid grid(test::unit_grid(32), 2);
    const auto counts = count_in_circle(grid, {10, 10}, 8, Metric::L2);
    CHECK(total(counts) == 0);
}

TEST_CASE("count_in_circle: 3-4-5 triangle, L2 vs L1") {
    const Dataset ds = test::dataset_from_pixels(
        {{0, 0, 0}, {3, 4, 0}, {6, 8, 0}}, 10, 1);
    const RasterGrid grid = rasterize(ds, test::unit_grid(10));

    // (3,4) sits at distance exactly 5; (6,8) at 10.
    CHECK(total(count_in_circle(grid, {0, 0}, 5, Metric::L2)) == 2);
    CHECK(total(count_in_circle(grid, {0, 0}, 4, Metric::L2)) == 1);
    CHECK(total(count_in_circle(grid, {0, 0}, 10, Metric::L2)) == 3);

    // L1: |3|+|4| = 7 > 5, so only the origin point is inside.
    CHECK(total(count_in_circle(grid, {0, 0}, 5, Metric::L1)) == 1);
    CHECK(total(count_in_circle(grid, {0, 0}, 7, Metric::L1)) == 2);
}

TEST_CASE("collect_in_circle mirrors count_in_circle and sorts hits") {
    const Dataset ds = test::dataset_from_pixels(
        {{0, 0, 0}, {3, 4, 0}, {6, 8, 0}}, 10, 1);
    const RasterGrid grid = rasterize(ds, test::unit_grid(10));

    const auto hits = collect_in_circle(grid, {0, 0}, 5, Metric::L2);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].pixel == PixelCoord{0, 0});
    CHECK(hits[0].distance == 0.0);
    CHECK(hits[1].pixel == PixelCoord{3, 4});
    CHECK(hits[1].distance == doctest::Approx(5.0));

    const auto l1 = collect_in_circle(grid, {0, 0}, 5, Metric::L1);
    REQUIRE(l1.size() == 1);
    CHECK(l1[0].pixel == PixelCoord{0, 0});
}

TEST_CASE("scan properties: consistency, monotonicity, L1 within L2") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        const int res = 8 + int(rng() % 56);
        const Dataset ds =
            generate_dataset(1 + rng() % 200, 1 + int(rng() % 3), rng());
        const RasterGrid grid = rasterize(ds, test::unit_grid(res));

        for (int probe = 0; probe < 8; ++probe) {
            const PixelCoord center{int(rng() % std::uint64_t(res)),
                                    int(rng() % std::uint64_t(res))};
            const int r1 = int(rng() % std::uint64_t(2 * res));
            const int r2 = r1 + int(rng() % std::uint64_t(res));

            const auto l2_r1 = count_in_circle(grid, center, r1, Metric::L2);
            const auto l2_r2 = count_in_circle(grid, center, r2, Metric::L2);
            const auto l1_r1 = count_in_circle(grid, center, r1, Metric::L1);

            CHECK(total(l2_r1) <= total(l2_r2));  // monotone in r
            for (std::size_t c = 0; c < l2_r1.size(); ++c)
                CHECK(l1_r1[c] <= l2_r1[c]);  // L1 ball inside L2 ball

            // collect agrees with count, class by class.
            const auto hits = collect_in_circle(grid, center, r1, Metric::L2);
            std::vector<std::uint64_t> from_hits(l2_r1.size(), 0);
            for (const auto& h : hits) {
                from_hits[std::size_t(h.label)] += h.count;
                CHECK(h.dist_key <= std::int64_t(r1) * r1);
            }
            for (std::size_t c = 0; c < l2_r1.size(); ++c)
                CHECK(from_hits[c] == l2_r1[c]);
            for (std::size_t i = 1; i < hits.size(); ++i)
                CHECK(hits[i - 1].distance <= hits[i].distance);
        }
    }
}

TEST_CASE("active_knn: immediate exact hit when r0 covers exactly k points") {
    // k points packed around the query, far from anything else.
    const Dataset ds = test::dataset_from_pixels(
        {{50, 50, 0}, {51, 50, 0}, {50, 51, 0}, {90, 90, 0}}, 100, 1);
    const RasterGrid grid = rasterize(ds, test::unit_grid(100));

    double qx, qy;
    world_of(test::unit_grid(100), {50, 50}, qx, qy);
    SearchParams params;
    params.k = 3;
    params.r0 = 5;
    const QueryResult result = active_knn(grid, qx, qy, params);

    CHECK(result.trace.terminated_by == Termination::ExactK);
    CHECK(result.trace.steps.size() == 1);
    CHECK(result.multiplicity() == 3);
}

TEST_CASE("active_knn: 15-point scene, k=3 returns the frozen neighbor set") {
    const auto pixels = test::fifteen_points();
    const Dataset ds = test::dataset_from_pixels(pixels, 100, 1);
    const RasterGrid grid = rasterize(ds, test::unit_grid(100), true);
    REQUIRE(grid.collision_free());

    double qx, qy;
    world_of(test::unit_grid(100), {50, 50}, qx, qy);
    SearchParams params;
    params.k = 3;
    params.r0 = 30;
    const QueryResult result = active_knn(grid, qx, qy, params);

    // Frozen from a full sort of all 15 pixel distances: (50,50) at 0,
    // (52,48) at sqrt(8), (55,55) at sqrt(50).
    REQUIRE(result.neighbors.size() == 3);
    CHECK(result.neighbors[0].pixel == PixelCoord{50, 50});
    CHECK(result.neighbors[0].distance == 0.0);
    CHECK(result.neighbors[1].pixel == PixelCoord{52, 48});
    CHECK(result.neighbors[1].distance == doctest::Approx(std::sqrt(8.0)));
    CHECK(result.neighbors[2].pixel == PixelCoord{55, 55});
    CHECK(result.neighbors[2].distance == doctest::Approx(std::sqrt(50.0)));
    CHECK(flat_ids(result) == std::vector<std::uint32_t>{5, 6, 7});
}

TEST_CASE("active_knn: matches local pixel-space ground truth (property)") {
    // Odd instances use a coarse grid so points collide on pixels; the
    // id-level tie-break (bucket insertion order = ascending index) must keep
    // the two sides identical there too.
    std::mt19937_64 rng(41);
    for (int instance = 0; instance < 30; ++instance) {
        const std::size_t n = 12 + rng() % 200;
        const Dataset ds = generate_dataset(n, 3, rng());
        const int res = instance % 2 ? 64 : 512;
        const GridConfig cfg =
            test::unit_grid(res, instance % 2 ? Metric::L1 : Metric::L2);
        const RasterGrid grid = rasterize(ds, cfg, true);

        SearchParams params;
        params.k = 1 + int(rng() % 11);
        params.r0 = 1 + int(rng() % (2 * std::uint64_t(res)));
        params.metric = cfg.metric;

        for (int q = 0; q < 5; ++q) {
            const double qx = double(rng() >> 11) * 0x1.0p-53;
            const double qy = double(rng() >> 11) * 0x1.0p-53;
            const QueryResult result = active_knn(grid, qx, qy, params);
            CHECK(result.multiplicity() == std::uint64_t(params.k));

            auto expected = local_pixel_knn(ds, cfg, pixel_of(cfg, qx, qy),
                                            params.k, params.metric);
            auto actual = flat_ids(result);
            std::sort(expected.begin(), expected.end());
            std::sort(actual.begin(), actual.end());
            CHECK(expected == actual);
        }
    }
}

TEST_CASE("active_knn: trace counts are honest (recount reproduces them)") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        const Dataset ds = generate_dataset(50 + rng() % 500, 3, rng());
        const GridConfig cfg = test::unit_grid(256);
        const RasterGrid grid = rasterize(ds, cfg);

        SearchParams params;
        params.k = 7;
        params.r0 = 1 + int(rng() % 300);
        const double qx = double(rng() >> 11) * 0x1.0p-53;
        const double qy = double(rng() >> 11) * 0x1.0p-53;
        const QueryResult result = active_knn(grid, qx, qy, params);

        const PixelCoord center = pixel_of(cfg, qx, qy);
        for (const auto& step : result.trace.steps) {
            const auto recount =
                count_in_circle(grid, center, step.radius, params.metric);
            CHECK(total(recount) == step.count);
        }
    }
}

TEST_CASE("active_knn: k above dataset size throws with both values") {
    const Dataset ds = generate_dataset(10, 2, 3);
    const RasterGrid grid = rasterize(ds, test::unit_grid(64));
    SearchParams params;
    params.k = 50;
    try {
        active_knn(grid, 0.5, 0.5, params);
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("50") != std::string::npos);
        CHECK(msg.find("10") != std::string::npos);
    }
}

TEST_CASE("active_knn: iteration cap still yields k neighbors, flagged") {
    const Dataset ds = generate_dataset(500, 3, 8);
    const RasterGrid grid = rasterize(ds, test::unit_grid(256));
    SearchParams params;
    params.k = 11;
    params.r0 = 1;  // forces growth, then the cap bites first
    params.max_iters = 1;
    const QueryResult result = active_knn(grid, 0.5, 0.5, params);
    CHECK(result.trace.terminated_by == Termination::IterationCap);
    CHECK(result.trace.steps.size() == 1);
    CHECK(result.multiplicity() == 11);
}

TEST_CASE("active_knn: concurrent readers of one immutable grid") {
    const Dataset ds = generate_dataset(2000, 3, 61);
    const GridConfig cfg = test::unit_grid(512);
    const RasterGrid grid = rasterize(ds, cfg, true);
    SearchParams params;
    params.k = 7;
    params.r0 = 20;

    std::vector<QueryResult> serial;
    for (int q = 0; q < 32; ++q) {
        const double t = (q + 0.5) / 32.0;
        serial.push_back(active_knn(grid, t, 1.0 - t, params));
    }

    std::vector<QueryResult> parallel(32);
    std::vector<std::thread> workers;
    for (int w = 0; w < 4; ++w) {
        workers.emplace_back([&, w] {
            for (int q = w; q < 32; q += 4) {
                const double t = (q + 0.5) / 32.0;
                parallel[std::size_t(q)] = active_knn(grid, t, 1.0 - t, params);
            }
        });
    }
    for (auto& t : workers) t.join();

    for (int q = 0; q < 32; ++q) {
        CHECK(parallel[std::size_t(q)].predicted_class ==
              serial[std::size_t(q)].predicted_class);
        CHECK(flat_ids(parallel[std::size_t(q)]) ==
              flat_ids(serial[std::size_t(q)]));
    }
}

TEST_CASE("classify: unanimous vote and tie to lowest class id") {
    // Two points, one each of classes 0 and 2, equidistant from the query.
    const Dataset ds = test::dataset_from_pixels(
        {{10, 10, 0}, {14, 10, 2}}, 32, 3);
    const RasterGrid grid = rasterize(ds, test::unit_grid(32));

    double qx, qy;
    world_of(test::unit_grid(32), {12, 10}, qx, qy);
    SearchParams params;
    params.k = 2;
    params.r0 = 3;
    QueryResult result;
    CHECK(classify(grid, qx, qy, params, &result) == 0);
    CHECK(result.multiplicity() == 2);

    // Unanimous case: both neighbors are class 2.
    const Dataset uni = test::dataset_from_pixels(
        {{10, 10, 2}, {14, 10, 2}, {30, 30, 0}}, 32, 3);
    const RasterGrid ugrid = rasterize(uni, test::unit_grid(32));
    CHECK(classify(ugrid, qx, qy, params) == 2);
}
