#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "aknn/dataset.hpp"
#include "aknn/raster.hpp"

namespace aknn::test {

// A pixel-addressed dataset: each (col, row, label) triple becomes a point at
// that pixel's center under bounds (0,1)x(0,1), so tests can reason in pixel
// coordinates exactly.
struct PixelSpec {
    int col;
    int row;
    int label;
};

inline GridConfig unit_grid(int resolution, Metric metric = Metric::L2) {
    return GridConfig{resolution, WorldBounds{0.0, 1.0, 0.0, 1.0}, metric};
}

inline Dataset dataset_from_pixels(const std::vector<PixelSpec>& pixels,
                                   int resolution, int num_classes) {
    GridConfig cfg = unit_grid(resolution);
    Dataset ds;
    ds.num_classes = num_classes;
    for (const auto& p : pixels) {
        double x, y;
        world_of(cfg, PixelCoord{p.col, p.row}, x, y);
        ds.points.push_back({x, y, p.label});
    }
    return ds;
}

// The 15-point single-class scene used by several tests (a small scatter with
// one tight cluster around pixel (50, 50) on a 100x100 grid).
inline std::vector<PixelSpec> fifteen_points() {
    return {{10, 10, 0}, {20, 15, 0}, {30, 40, 0}, {35, 35, 0}, {42, 38, 0},
            {50, 50, 0}, {52, 48, 0}, {55, 55, 0}, {60, 20, 0}, {70, 70, 0},
            {75, 30, 0}, {80, 80, 0}, {85, 60, 0}, {90, 90, 0}, {15, 85, 0}};
}

struct Ppm {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    bool is_white(int col, int row) const {
        const std::size_t i =
            (std::size_t(row) * std::size_t(width) + std::size_t(col)) * 3;
        return rgb[i] == 255 && rgb[i + 1] == 255 && rgb[i + 2] == 255;
    }
    int non_white_pixels() const {
        int n = 0;
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c)
                if (!is_white(c, r)) ++n;
        return n;
    }
};

inline Ppm read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string magic;
    int maxval = 0;
    Ppm img;
    in >> magic >> img.width >> img.height >> maxval;
    if (magic != "P6" || maxval != 255)
        throw std::runtime_error("not a P6/255 ppm: " + path.string());
    in.get();  // single whitespace after maxval
    img.rgb.resize(std::size_t(img.width) * std::size_t(img.height) * 3);
    in.read(reinterpret_cast<char*>(img.rgb.data()),
            std::streamsize(img.rgb.size()));
    if (!in) throw std::runtime_error("truncated ppm: " + path.string());
    return img;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

// Scratch directory for a test, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("aknn_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace aknn::test
