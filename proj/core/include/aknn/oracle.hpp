#pragma once

#include <cstdint>
#include <vector>

#include "aknn/dataset.hpp"
#include "aknn/neighbor.hpp"
#include "aknn/raster.hpp"

namespace aknn {

/// Space the ground-truth search runs in. World measures true accuracy
/// against raw coordinates; PixelQuantized snaps both data and query to
/// pixels first, which isolates algorithmic correctness of the grid search
/// from quantization error.
enum class OracleSpace { World, PixelQuantized };

struct OracleMode {
    OracleSpace space = OracleSpace::World;
    Metric metric = Metric::L2;
};

struct OracleNeighbor {
    std::uint32_t index = 0;
    double distance = 0.0;
    int label = 0;
};

/// Brute-force k nearest neighbors: scans all N points, Theta(N) by
/// construction. Ties are broken by the shared neighbor order (distance,
/// then pixel row-major in PixelQuantized mode, then point index).
/// PixelQuantized mode requires the grid config used to quantize; pass it
/// via `quantize_cfg`. Throws std::invalid_argument when k > N.
std::vector<OracleNeighbor> brute_knn(const Dataset& ds, double x, double y,
                                      int k, const OracleMode& mode,
                                      const GridConfig* quantize_cfg = nullptr);

/// Majority vote over brute_knn labels, ties to the lowest class id.
int brute_classify(const Dataset& ds, double x, double y, int k,
                   const OracleMode& mode,
                   const GridConfig* quantize_cfg = nullptr);

/// Fraction of positions where the two prediction lists agree. Throws
/// std::invalid_argument on length mismatch or empty input.
double agreement(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace aknn
