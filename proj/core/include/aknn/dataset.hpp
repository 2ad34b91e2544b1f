#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace aknn {

/// A 2-D point with a class label. Coordinates are world units (arbitrary
/// reals), labels are class ids in [0, num_classes) of the owning dataset.
struct LabeledPoint {
    double x = 0.0;
    double y = 0.0;
    int label = 0;
};

/// An ordered collection of labeled points. Point indices are stable and act
/// as point identities everywhere downstream (grid buckets, oracle results).
struct Dataset {
    std::vector<LabeledPoint> points;
    int num_classes = 0;

    std::size_t size() const { return points.size(); }
};

/// Axis-aligned world-coordinate box. Always non-degenerate: xmin < xmax and
/// ymin < ymax.
struct WorldBounds {
    double xmin = 0.0;
    double xmax = 1.0;
    double ymin = 0.0;
    double ymax = 1.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    bool contains(double x, double y) const {
        return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
    }
};

/// Generates n points uniformly in the unit square with labels drawn
/// uniformly from [0, num_classes). The scheme is fixed so results are
/// reproducible across platforms: an std::mt19937_64 seeded with `seed`
/// yields, per point, x then y as (next() >> 11) * 2^-53, then the label as
/// next() % num_classes.
///
/// Pure function of (n, num_classes, seed): identical arguments produce
/// bit-identical datasets.
Dataset generate_dataset(std::size_t n, int num_classes, std::uint64_t seed);

/// Smallest axis-aligned box containing all points, expanded on each side by
/// margin_fraction times that axis's extent. A degenerate axis (all values
/// equal) is first widened to extent 1.0 centered on the value, so the result
/// is always strictly non-degenerate.
///
/// Throws std::invalid_argument on an empty dataset or negative margin.
WorldBounds compute_bounds(const Dataset& ds, double margin_fraction = 0.05);

/// Reads a dataset from CSV (header `x,y,label`, one point per row).
/// `num_classes` = 0 infers the class count as max(label) + 1; a positive
/// value is used as-is and every label is validated against it. Malformed
/// rows, out-of-range labels and non-finite coordinates are reported with
/// their line number via std::runtime_error.
Dataset load_dataset(const std::filesystem::path& path, int num_classes = 0);

/// Writes the dataset as CSV. Coordinates are serialized with 17 significant
/// digits so save followed by load reproduces them exactly.
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

}  // namespace aknn
