#include "aknn/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace aknn {

namespace {

void validate_config(const GridConfig& cfg) {
    if (cfg.resolution < 1)
        throw std::invalid_argument("grid resolution must be >= 1");
    if (!(cfg.bounds.xmin < cfg.bounds.xmax) ||
        !(cfg.bounds.ymin < cfg.bounds.ymax))
        throw std::invalid_argument("grid bounds must be non-degenerate");
}

int clamp_axis(double t, int resolution) {
    const int i = int(std::floor(t));
    return std::clamp(i, 0, resolution - 1);
}

}  // namespace

PixelCoord pixel_of(const GridConfig& cfg, double x, double y) {
    const int res = cfg.resolution;
    const int col =
        clamp_axis((x - cfg.bounds.xmin) / cfg.bounds.width() * res, res);
    const int row_from_bottom =
        clamp_axis((y - cfg.bounds.ymin) / cfg.bounds.height() * res, res);
    return {col, res - 1 - row_from_bottom};
}

void world_of(const GridConfig& cfg, PixelCoord px, double& x, double& y) {
    const int res = cfg.resolution;
    x = cfg.bounds.xmin + (px.col + 0.5) / res * cfg.bounds.width();
    y = cfg.bounds.ymin + (res - 1 - px.row + 0.5) / res * cfg.bounds.height();
}

RasterGrid::RasterGrid(GridConfig cfg, int num_classes)
    : config_(cfg), num_classes_(num_classes) {
    validate_config(cfg);
    if (num_classes < 1)
        throw std::invalid_argument("num_classes must be >= 1");
    counts_.assign(std::size_t(num_classes) * std::size_t(cfg.resolution) *
                       std::size_t(cfg.resolution),
                   0u);
    row_totals_.assign(std::size_t(num_classes) * std::size_t(cfg.resolution),
                       0u);
}

std::span<const std::uint32_t> RasterGrid::bucket(PixelCoord px) const {
    if (bucket_offsets_.empty()) return {};
    const std::size_t i =
        std::size_t(px.row) * std::size_t(config_.resolution) +
        std::size_t(px.col);
    return {bucket_ids_.data() + bucket_offsets_[i],
            bucket_offsets_[i + 1] - bucket_offsets_[i]};
}

std::uint64_t RasterGrid::occupied_pixels() const {
    const std::size_t n =
        std::size_t(config_.resolution) * std::size_t(config_.resolution);
    std::uint64_t occupied = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < num_classes_; ++c) {
            if (counts_[std::size_t(c) * n + i] != 0) {
                ++occupied;
                break;
            }
        }
    }
    return occupied;
}

RasterGrid rasterize(const Dataset& ds, const GridConfig& cfg,
                     bool keep_buckets) {
    RasterGrid grid(cfg, ds.num_classes);

    const std::size_t pixels =
        std::size_t(cfg.resolution) * std::size_t(cfg.resolution);
    std::vector<std::uint32_t> pixel_of_point;
    if (keep_buckets) pixel_of_point.resize(ds.size());

    for (std::size_t i = 0; i < ds.points.size(); ++i) {
        const auto& p = ds.points[i];
        if (p.label < 0 || p.label >= ds.num_classes)
            throw std::invalid_argument("point " + std::to_string(i) +
                                        " has label outside [0, num_classes)");
        const PixelCoord px = pixel_of(cfg, p.x, p.y);
        ++grid.counts_[grid.plane_index(p.label, px)];
        ++grid.row_totals_[std::size_t(p.label) * std::size_t(cfg.resolution) +
                           std::size_t(px.row)];
        if (keep_buckets)
            pixel_of_point[i] =
                std::uint32_t(px.row) * std::uint32_t(cfg.resolution) +
                std::uint32_t(px.col);
    }
    grid.total_points_ = ds.size();

    if (keep_buckets) {
        // CSR build in two passes; per-pixel ids stay in dataset order.
        grid.bucket_offsets_.assign(pixels + 1, 0u);
        for (auto px : pixel_of_point) ++grid.bucket_offsets_[px + 1];
        for (std::size_t i = 1; i <= pixels; ++i)
            grid.bucket_offsets_[i] += grid.bucket_offsets_[i - 1];
        grid.bucket_ids_.resize(ds.size());
        std::vector<std::uint32_t> cursor(grid.bucket_offsets_.begin(),
                                          grid.bucket_offsets_.end() - 1);
        for (std::size_t i = 0; i < pixel_of_point.size(); ++i)
            grid.bucket_ids_[cursor[pixel_of_point[i]]++] = std::uint32_t(i);
        grid.point_labels_.resize(ds.size());
        for (std::size_t i = 0; i < ds.points.size(); ++i)
            grid.point_labels_[i] = ds.points[i].label;
    }
    return grid;
}

namespace {

struct Pixmap {
    int res;
    std::vector<std::uint8_t> rgb;

    explicit Pixmap(int resolution)
        : res(resolution),
          rgb(std::size_t(resolution) * std::size_t(resolution) * 3, 255) {}

    void set(int col, int row, const std::array<std::uint8_t, 3>& color) {
        if (col < 0 || col >= res || row < 0 || row >= res) return;
        const std::size_t i =
            (std::size_t(row) * std::size_t(res) + std::size_t(col)) * 3;
        rgb[i] = color[0];
        rgb[i + 1] = color[1];
        rgb[i + 2] = color[2];
    }
};

constexpr std::array<std::uint8_t, 3> kBlack = {0, 0, 0};
constexpr std::array<std::uint8_t, 3> kGray = {140, 140, 140};

// Integer midpoint circle outline; deterministic and clipping-safe.
void draw_circle(Pixmap& img, PixelCoord c, int r,
                 const std::array<std::uint8_t, 3>& color) {
    if (r <= 0) {
        img.set(c.col, c.row, color);
        return;
    }
    int x = r;
    int y = 0;
    int err = 1 - r;
    while (x >= y) {
        img.set(c.col + x, c.row + y, color);
        img.set(c.col + y, c.row + x, color);
        img.set(c.col - y, c.row + x, color);
        img.set(c.col - x, c.row + y, color);
        img.set(c.col - x, c.row - y, color);
        img.set(c.col - y, c.row - x, color);
        img.set(c.col + y, c.row - x, color);
        img.set(c.col + x, c.row - y, color);
        ++y;
        if (err < 0) {
            err += 2 * y + 1;
        } else {
            --x;
            err += 2 * (y - x) + 1;
        }
    }
}

void draw_plus(Pixmap& img, PixelCoord c, int arm,
               const std::array<std::uint8_t, 3>& color) {
    for (int d = -arm; d <= arm; ++d) {
        img.set(c.col + d, c.row, color);
        img.set(c.col, c.row + d, color);
    }
}

}  // namespace

void render(const RasterGrid& grid, const std::filesystem::path& path,
            const std::optional<RenderOverlay>& overlay) {
    const int res = grid.resolution();
    Pixmap img(res);

    for (int row = 0; row < res; ++row) {
        for (int col = 0; col < res; ++col) {
            // Dominant class wins the pixel; ties to the lowest class id.
            int best = -1;
            std::uint32_t best_count = 0;
            for (int c = 0; c < grid.num_classes(); ++c) {
                const std::uint32_t n = grid.count_at(c, {col, row});
                if (n > best_count) {
                    best = c;
                    best_count = n;
                }
            }
            if (best >= 0)
                img.set(col, row, kClassPalette[best % kClassPalette.size()]);
        }
    }

    if (overlay) {
        for (int r : overlay->radii) draw_circle(img, overlay->center, r, kGray);
        draw_plus(img, overlay->center, std::max(3, res / 100), kBlack);
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    char header[64];
    std::snprintf(header, sizeof(header), "P6\n%d %d\n255\n", res, res);
    out << header;
    out.write(reinterpret_cast<const char*>(img.rgb.data()),
              std::streamsize(img.rgb.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace aknn
