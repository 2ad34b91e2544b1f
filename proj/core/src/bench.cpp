#include "aknn/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <stdexcept>

#include "aknn/active_search.hpp"
#include "aknn/dataset.hpp"
#include "aknn/oracle.hpp"

namespace aknn {

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

// splitmix64 finalizer; mixes the sweep seed with n so every dataset in the
// sweep is independent yet reproducible.
std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<LabeledPoint> held_out_queries(const WorldBounds& bounds,
                                           int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto unit = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
    std::vector<LabeledPoint> qs(static_cast<std::size_t>(count));
    for (auto& q : qs) {
        q.x = bounds.xmin + unit() * bounds.width();
        q.y = bounds.ymin + unit() * bounds.height();
    }
    return qs;
}

}  // namespace

void BenchConfig::validate() const {
    if (n_values.empty())
        throw std::invalid_argument("bench: n_values must be non-empty");
    if (!std::is_sorted(n_values.begin(), n_values.end()))
        throw std::invalid_argument("bench: n_values must be sorted ascending");
    if (num_classes < 1 || k < 1 || r0 < 1 || resolution < 1 ||
        num_queries < 1 || repeats < 1)
        throw std::invalid_argument(
            "bench: classes, k, r0, resolution, queries, repeats must be >= 1");
    for (auto n : n_values)
        if (n < std::size_t(k))
            throw std::invalid_argument("bench: n=" + std::to_string(n) +
                                        " is smaller than k=" +
                                        std::to_string(k));
}

BenchResult run_bench(const BenchConfig& cfg, std::ostream* progress) {
    cfg.validate();

    BenchResult result;
    result.n_values = cfg.n_values;

    for (std::size_t n : cfg.n_values) {
        const std::uint64_t ds_seed = mix(cfg.seed ^ mix(std::uint64_t(n)));
        const Dataset ds = generate_dataset(n, cfg.num_classes, ds_seed);
        const WorldBounds bounds = compute_bounds(ds);
        const auto queries =
            held_out_queries(bounds, cfg.num_queries, mix(ds_seed + 1));

        std::vector<int> brute_pred(queries.size());
        std::vector<int> active_pred(queries.size());

        // Brute force baseline. Predictions land in a preallocated buffer so
        // repeats cannot be optimized away; minimum total time wins.
        const OracleMode world{OracleSpace::World, cfg.metric};
        double brute_total_ms = 0.0;
        for (int rep = 0; rep < cfg.repeats; ++rep) {
            const auto t0 = Clock::now();
            for (std::size_t i = 0; i < queries.size(); ++i)
                brute_pred[i] =
                    brute_classify(ds, queries[i].x, queries[i].y, cfg.k, world);
            const auto t1 = Clock::now();
            const double total = ms_between(t0, t1);
            brute_total_ms = rep == 0 ? total : std::min(brute_total_ms, total);
        }

        BenchRow brute_row;
        brute_row.n = n;
        brute_row.method = BenchMethod::BruteForce;
        brute_row.build_ms = 0.0;  // no index to build
        brute_row.query_total_ms = brute_total_ms;
        brute_row.query_mean_us = brute_total_ms * 1000.0 / cfg.num_queries;
        result.rows.push_back(brute_row);
        if (progress)
            *progress << "n=" << n << " brute_force mean "
                      << brute_row.query_mean_us << " us/query\n";

        // Grid build, timed once.
        GridConfig grid_cfg{cfg.resolution, bounds, cfg.metric};
        const auto b0 = Clock::now();
        const RasterGrid grid = rasterize(ds, grid_cfg, cfg.keep_buckets);
        const auto b1 = Clock::now();

        SearchParams params;
        params.k = cfg.k;
        params.r0 = cfg.r0;
        params.metric = cfg.metric;

        double active_total_ms = 0.0;
        for (int rep = 0; rep < cfg.repeats; ++rep) {
            const auto t0 = Clock::now();
            for (std::size_t i = 0; i < queries.size(); ++i)
                active_pred[i] =
                    classify(grid, queries[i].x, queries[i].y, params);
            const auto t1 = Clock::now();
            const double total = ms_between(t0, t1);
            active_total_ms = rep == 0 ? total : std::min(active_total_ms, total);
        }

        BenchRow active_row;
        active_row.n = n;
        active_row.method = BenchMethod::ActiveSearch;
        active_row.build_ms = ms_between(b0, b1);
        active_row.query_total_ms = active_total_ms;
        active_row.query_mean_us = active_total_ms * 1000.0 / cfg.num_queries;
        active_row.agreement_vs_brute = agreement(active_pred, brute_pred);
        result.rows.push_back(active_row);
        if (progress)
            *progress << "n=" << n << " active_search mean "
                      << active_row.query_mean_us << " us/query, agreement "
                      << *active_row.agreement_vs_brute << "\n";

        result.brute_predictions.push_back(std::move(brute_pred));
        result.active_predictions.push_back(std::move(active_pred));
    }
    return result;
}

std::string to_string(BenchMethod method) {
    return method == BenchMethod::BruteForce ? "brute_force" : "active_search";
}

void write_bench_csv(const std::vector<BenchRow>& rows,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());

    out << "n,method,build_ms,query_total_ms,query_mean_us,agreement\n";
    char buf[160];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%zu,%s,%.3f,%.3f,%.3f,", row.n,
                      to_string(row.method).c_str(), row.build_ms,
                      row.query_total_ms, row.query_mean_us);
        out << buf;
        if (row.agreement_vs_brute) {
            std::snprintf(buf, sizeof(buf), "%.4f", *row.agreement_vs_brute);
            out << buf;
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace aknn
