#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "aknn/dataset.hpp"

namespace aknn {

enum class Metric { L2, L1 };

/// Parameters of the world -> pixel mapping: a square image of
/// resolution x resolution pixels covering `bounds`. `metric` is the
/// grid's declared distance metric; search parameters may override it.
struct GridConfig {
    int resolution = 3000;
    WorldBounds bounds;
    Metric metric = Metric::L2;
};

/// Integer pixel position. col grows with x; row 0 corresponds to ymax
/// (image convention, top row = largest y).
struct PixelCoord {
    int col = 0;
    int row = 0;

    bool operator==(const PixelCoord&) const = default;
};

/// Maps world coordinates to a pixel: col = floor((x - xmin) / width * res),
/// row = res - 1 - floor((y - ymin) / height * res), both clamped to
/// [0, res - 1]. Out-of-bounds coordinates clamp to the nearest edge pixel.
PixelCoord pixel_of(const GridConfig& cfg, double x, double y);

/// Center of a pixel in world coordinates. Inverse of pixel_of up to
/// quantization; used by the pixel-space oracle and by tests.
void world_of(const GridConfig& cfg, PixelCoord px, double& x, double& y);

/// The dataset quantized onto per-class pixel count planes. Plane c holds,
/// for every pixel, the number of class-c points mapped there; the sum over
/// all planes equals the source dataset size. When built with
/// keep_buckets = true the grid additionally records, per pixel, the indices
/// of the points on it (in dataset order, hence ascending), which lets
/// queries report which original points were returned.
class RasterGrid {
public:
    RasterGrid() = default;
    RasterGrid(GridConfig cfg, int num_classes);

    const GridConfig& config() const { return config_; }
    int resolution() const { return config_.resolution; }
    int num_classes() const { return num_classes_; }
    std::uint64_t total_points() const { return total_points_; }
    bool has_buckets() const { return !bucket_offsets_.empty(); }

    std::uint32_t count_at(int cls, PixelCoord px) const {
        return counts_[plane_index(cls, px)];
    }
    /// Row-major count plane of one class, resolution*resolution entries.
    std::span<const std::uint32_t> plane(int cls) const {
        const std::size_t n =
            std::size_t(config_.resolution) * std::size_t(config_.resolution);
        return {counts_.data() + std::size_t(cls) * n, n};
    }

    /// Total count of one class over one whole grid row. Circle scans use
    /// this to skip rows a class has no points in; on sparse grids that is
    /// most of them.
    std::uint32_t row_total(int cls, int row) const {
        return row_totals_[std::size_t(cls) * std::size_t(config_.resolution) +
                           std::size_t(row)];
    }

    /// Point indices on a pixel, ascending. Empty unless built with buckets.
    std::span<const std::uint32_t> bucket(PixelCoord px) const;
    /// Label of a point by index; only available when buckets were kept.
    int label_of(std::uint32_t point_index) const {
        return point_labels_[point_index];
    }

    /// Number of occupied pixels (summed over classes, a pixel shared by two
    /// classes counts once).
    std::uint64_t occupied_pixels() const;

    /// True when no two distinct points share a pixel. Tests use this to
    /// select exact-comparison regimes; false means quantization has merged
    /// points and counts are only approximate stand-ins for identities.
    bool collision_free() const { return occupied_pixels() == total_points_; }

private:
    friend RasterGrid rasterize(const Dataset&, const GridConfig&, bool);

    std::size_t plane_index(int cls, PixelCoord px) const {
        const std::size_t n =
            std::size_t(config_.resolution) * std::size_t(config_.resolution);
        return std::size_t(cls) * n +
               std::size_t(px.row) * std::size_t(config_.resolution) +
               std::size_t(px.col);
    }

    GridConfig config_;
    int num_classes_ = 0;
    std::uint64_t total_points_ = 0;
    std::vector<std::uint32_t> counts_;          // num_classes planes, row-major
    std::vector<std::uint32_t> row_totals_;      // num_classes x resolution
    std::vector<std::uint32_t> bucket_offsets_;  // CSR offsets, res*res + 1
    std::vector<std::uint32_t> bucket_ids_;      // point indices, dataset order
    std::vector<std::int32_t> point_labels_;     // label per point index
};

/// Quantizes every dataset point onto its pixel, incrementing that pixel's
/// count in the point's class plane. Throws std::invalid_argument on an
/// invalid config or labels outside [0, num_classes).
RasterGrid rasterize(const Dataset& ds, const GridConfig& cfg,
                     bool keep_buckets = false);

/// Optional decoration for render(): a query mark plus circle outlines, one
/// per listed radius (a search trace visualization).
struct RenderOverlay {
    PixelCoord center;
    std::vector<int> radii;
};

/// Fixed per-class palette used by render(); class ids cycle through it.
inline constexpr std::array<std::array<std::uint8_t, 3>, 8> kClassPalette = {{
    {230, 25, 75},    // red
    {60, 180, 75},    // green
    {0, 130, 200},    // blue
    {245, 130, 48},   // orange
    {145, 30, 180},   // purple
    {70, 240, 240},   // cyan
    {240, 50, 230},   // magenta
    {128, 128, 0},    // olive
}};

/// Writes the grid as a binary PPM (P6): white background, each occupied
/// pixel colored by the palette entry of its dominant class (largest count,
/// ties to the lowest class id). The overlay, when given, draws the query
/// mark as a black plus and each listed radius as a gray midpoint-circle
/// outline. Output is byte-identical for identical inputs.
void render(const RasterGrid& grid, const std::filesystem::path& path,
            const std::optional<RenderOverlay>& overlay = std::nullopt);

}  // namespace aknn
