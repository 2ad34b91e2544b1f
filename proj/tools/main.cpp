// aknn: command-line front end for the raster-grid nearest-neighbor library.

#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "aknn/active_search.hpp"
#include "aknn/bench.hpp"
#include "aknn/dataset.hpp"
#include "aknn/oracle.hpp"
#include "aknn/raster.hpp"

namespace {

struct CommonArgs {
    std::string in;
    int classes = 0;  // 0: infer from file
    int resolution = 3000;
    double margin = 0.05;
    aknn::Metric metric = aknn::Metric::L2;
    bool buckets = false;
};

const std::map<std::string, aknn::Metric> kMetricNames{
    {"l2", aknn::Metric::L2}, {"l1", aknn::Metric::L1}};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_grid) {
    cmd->add_option("--in", args.in, "input dataset CSV")->required();
    cmd->add_option("--classes", args.classes,
                    "number of classes (0 = infer from labels)");
    if (needs_grid) {
        cmd->add_option("--resolution", args.resolution, "grid side in pixels")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--margin", args.margin,
                        "bounds margin as a fraction of the data extent")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--metric", args.metric, "distance metric")
            ->transform(CLI::CheckedTransformer(kMetricNames, CLI::ignore_case));
        cmd->add_flag("--buckets", args.buckets,
                      "keep per-pixel point ids (reports which points matched)");
    }
}

struct LoadedGrid {
    aknn::Dataset dataset;
    aknn::GridConfig config;
    aknn::RasterGrid grid;
};

LoadedGrid build_grid(const CommonArgs& args) {
    LoadedGrid g;
    g.dataset = aknn::load_dataset(args.in, args.classes);
    if (g.dataset.points.empty())
        throw std::runtime_error(args.in + ": no points");
    g.config = aknn::GridConfig{args.resolution,
                                aknn::compute_bounds(g.dataset, args.margin),
                                args.metric};
    g.grid = aknn::rasterize(g.dataset, g.config, args.buckets);
    return g;
}

const char* termination_name(aknn::Termination t) {
    switch (t) {
        case aknn::Termination::ExactK: return "exact-k";
        case aknn::Termination::Bracketed: return "bracketed";
        case aknn::Termination::IterationCap: return "iteration-cap";
    }
    return "?";
}

void print_result(const aknn::QueryResult& result) {
    std::printf("trace (%s, %zu scans):", termination_name(result.trace.terminated_by),
                result.trace.steps.size());
    for (const auto& s : result.trace.steps)
        std::printf(" r=%d n=%llu |", s.radius, (unsigned long long)s.count);
    std::printf("\nneighbors (multiplicity %llu):\n",
                (unsigned long long)result.multiplicity());
    for (const auto& n : result.neighbors) {
        std::printf("  pixel (col %d, row %d)  class %d  dist %.4f  count %u",
                    n.pixel.col, n.pixel.row, n.label, n.distance, n.count);
        if (!n.point_ids.empty()) {
            std::printf("  ids [");
            for (std::size_t i = 0; i < n.point_ids.size(); ++i)
                std::printf(i ? " %u" : "%u", n.point_ids[i]);
            std::printf("]");
        }
        std::printf("\n");
    }
    std::printf("predicted class: %d\n", result.predicted_class);
}

int run(int argc, char** argv) {
    CLI::App app{"adaptive-radius nearest-neighbor search on raster grids"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic dataset CSV");
    std::size_t gen_n = 1000;
    int gen_classes = 3;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    gen->add_option("--n", gen_n, "number of points")->check(CLI::PositiveNumber);
    gen->add_option("--classes", gen_classes, "number of classes")
        ->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output CSV path")->required();

    // rasterize
    auto* rast = app.add_subcommand("rasterize",
                                    "build the count grid and print a summary");
    CommonArgs rast_args;
    add_common(rast, rast_args, true);

    // query / classify
    auto* query = app.add_subcommand("query", "k-nearest-neighbor query");
    auto* cls = app.add_subcommand("classify", "majority-vote classification");
    CommonArgs query_args, cls_args;
    double qx = 0.0, qy = 0.0, cx = 0.0, cy = 0.0;
    aknn::SearchParams query_params, cls_params;
    for (auto [cmd, args, px, py, params] :
         {std::tuple{query, &query_args, &qx, &qy, &query_params},
          std::tuple{cls, &cls_args, &cx, &cy, &cls_params}}) {
        add_common(cmd, *args, true);
        cmd->add_option("--x", *px, "query x (world units)")->required();
        cmd->add_option("--y", *py, "query y (world units)")->required();
        cmd->add_option("--k", params->k, "neighbors to return")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--r0", params->r0, "initial radius in pixels")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--max-iters", params->max_iters, "scan budget")
            ->check(CLI::PositiveNumber);
    }

    // bench
    auto* bench = app.add_subcommand(
        "bench", "time brute-force vs grid search over a size sweep");
    aknn::BenchConfig bench_cfg;
    std::string bench_out = "bench.csv";
    bench->add_option("--n", bench_cfg.n_values,
                      "dataset sizes (repeatable; default decade sweep)");
    bench->add_option("--classes", bench_cfg.num_classes, "number of classes")
        ->check(CLI::PositiveNumber);
    bench->add_option("--k", bench_cfg.k, "neighbors per query")
        ->check(CLI::PositiveNumber);
    bench->add_option("--r0", bench_cfg.r0, "initial radius in pixels")
        ->check(CLI::PositiveNumber);
    bench->add_option("--resolution", bench_cfg.resolution, "grid side in pixels")
        ->check(CLI::PositiveNumber);
    bench->add_option("--metric", bench_cfg.metric, "distance metric")
        ->transform(CLI::CheckedTransformer(kMetricNames, CLI::ignore_case));
    bench->add_option("--queries", bench_cfg.num_queries, "queries per size")
        ->check(CLI::PositiveNumber);
    bench->add_option("--seed", bench_cfg.seed, "sweep seed");
    bench->add_option("--repeats", bench_cfg.repeats,
                      "timing repeats (minimum wins)")
        ->check(CLI::PositiveNumber);
    bench->add_flag("--buckets", bench_cfg.keep_buckets,
                    "keep per-pixel point ids while benchmarking");
    bench->add_option("--out", bench_out, "output CSV path");

    // render
    auto* rend = app.add_subcommand("render", "write the grid as a PPM image");
    CommonArgs rend_args;
    std::string rend_out;
    double rx = 0.0, ry = 0.0;
    bool overlay_trace = false;
    aknn::SearchParams rend_params;
    add_common(rend, rend_args, true);
    rend->add_option("--out", rend_out, "output PPM path")->required();
    auto* rx_opt = rend->add_option("--x", rx, "query x for the overlay");
    auto* ry_opt = rend->add_option("--y", ry, "query y for the overlay");
    rend->add_flag("--overlay-trace", overlay_trace,
                   "overlay the query mark and all traced scan circles")
        ->needs(rx_opt)
        ->needs(ry_opt);
    rend->add_option("--k", rend_params.k, "neighbors for the overlay query")
        ->check(CLI::PositiveNumber);
    rend->add_option("--r0", rend_params.r0, "initial radius in pixels")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            const aknn::Dataset ds =
                aknn::generate_dataset(gen_n, gen_classes, gen_seed);
            aknn::save_dataset(ds, gen_out);
            std::printf("wrote %zu points, %d classes to %s\n", ds.size(),
                        ds.num_classes, gen_out.c_str());
        } else if (rast->parsed()) {
            const LoadedGrid g = build_grid(rast_args);
            std::printf("points: %llu\n",
                        (unsigned long long)g.grid.total_points());
            std::printf("classes: %d\n", g.grid.num_classes());
            std::printf("resolution: %d\n", g.grid.resolution());
            std::printf("bounds: [%.6g, %.6g] x [%.6g, %.6g]\n",
                        g.config.bounds.xmin, g.config.bounds.xmax,
                        g.config.bounds.ymin, g.config.bounds.ymax);
            std::printf("occupied pixels: %llu\n",
                        (unsigned long long)g.grid.occupied_pixels());
            std::printf("collision free: %s\n",
                        g.grid.collision_free() ? "yes" : "no");
        } else if (query->parsed() || cls->parsed()) {
            const bool is_query = query->parsed();
            const CommonArgs& args = is_query ? query_args : cls_args;
            const aknn::SearchParams& params =
                is_query ? query_params : cls_params;
            LoadedGrid g = build_grid(args);
            aknn::SearchParams p = params;
            p.metric = args.metric;
            const double x = is_query ? qx : cx;
            const double y = is_query ? qy : cy;
            const aknn::PixelCoord px = aknn::pixel_of(g.config, x, y);
            std::printf("query (%.6g, %.6g) -> pixel (col %d, row %d)\n", x, y,
                        px.col, px.row);
            const aknn::QueryResult result = aknn::active_knn(g.grid, x, y, p);
            if (is_query) {
                print_result(result);
            } else {
                std::printf("trace (%s, %zu scans)\n",
                            termination_name(result.trace.terminated_by),
                            result.trace.steps.size());
                std::printf("predicted class: %d\n", result.predicted_class);
            }
        } else if (bench->parsed()) {
            const aknn::BenchResult result =
                aknn::run_bench(bench_cfg, &std::cout);
            aknn::write_bench_csv(result.rows, bench_out);
            std::printf("wrote %zu rows to %s\n", result.rows.size(),
                        bench_out.c_str());
        } else if (rend->parsed()) {
            LoadedGrid g = build_grid(rend_args);
            std::optional<aknn::RenderOverlay> overlay;
            if (overlay_trace) {
                aknn::SearchParams p = rend_params;
                p.metric = rend_args.metric;
                const aknn::QueryResult result =
                    aknn::active_knn(g.grid, rx, ry, p);
                overlay.emplace();
                overlay->center = aknn::pixel_of(g.config, rx, ry);
                for (const auto& s : result.trace.steps)
                    overlay->radii.push_back(s.radius);
            }
            aknn::render(g.grid, rend_out, overlay);
            std::printf("wrote %s\n", rend_out.c_str());
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
