#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aknn/raster.hpp"

namespace aknn {

/// Benchmark sweep configuration. Defaults reproduce the reference setup:
/// 3 classes on a 3000x3000 grid, k = 11, r0 = 100 pixels, 100 held-out
/// queries, a decade sweep of dataset sizes.
struct BenchConfig {
    std::vector<std::size_t> n_values = {1000,   5000,   10000,  50000,
                                         100000, 500000, 1000000};
    int num_classes = 3;
    int k = 11;
    int r0 = 100;
    int resolution = 3000;
    Metric metric = Metric::L2;
    int num_queries = 100;
    std::uint64_t seed = 1;
    int repeats = 3;
    bool keep_buckets = false;

    void validate() const;  // throws std::invalid_argument
};

enum class BenchMethod { BruteForce, ActiveSearch };

/// One benchmark result row. Timings are minimum-of-repeats on a monotonic
/// clock; everything else is deterministic for a fixed config and seed.
/// BruteForce rows build nothing, so their build_ms is 0.
struct BenchRow {
    std::size_t n = 0;
    BenchMethod method = BenchMethod::BruteForce;
    double build_ms = 0.0;
    double query_total_ms = 0.0;
    double query_mean_us = 0.0;
    std::optional<double> agreement_vs_brute;  // ActiveSearch rows only
};

/// Rows plus the per-n prediction vectors they were scored from, so
/// agreement can be recomputed after the fact.
struct BenchResult {
    std::vector<BenchRow> rows;
    std::vector<std::size_t> n_values;
    std::vector<std::vector<int>> brute_predictions;
    std::vector<std::vector<int>> active_predictions;
};

/// Runs the sweep. For each n: generates a dataset (seed derived
/// deterministically from cfg.seed and n), builds the grid once (timed as
/// build_ms), draws num_queries held-out query points inside the data
/// bounds, then times brute-force classification and active-search
/// classification, repeats times each, keeping the minimum. Timing loops are
/// single-threaded. `progress`, when given, receives one line per row.
BenchResult run_bench(const BenchConfig& cfg, std::ostream* progress = nullptr);

/// CSV with header `n,method,build_ms,query_total_ms,query_mean_us,agreement`
/// and one row per (n, method); BruteForce rows leave agreement empty.
void write_bench_csv(const std::vector<BenchRow>& rows,
                     const std::filesystem::path& path);

std::string to_string(BenchMethod method);

}  // namespace aknn
