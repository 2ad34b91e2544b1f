#pragma once

#include <cstdint>
#include <span>

namespace aknn {

/// The one tie-break rule shared by the active search and both oracles.
///
/// Neighbor candidates are ordered by
///   1. distance (exact integer key in pixel space, double in world space),
///   2. pixel row-major order (row, then col) where pixels exist,
///   3. point index / bucket insertion order (these coincide: buckets are
///      filled in dataset order).
/// Truncating any candidate list "to the k nearest" means taking the first k
/// under this order. Keeping the rule in one place is what makes the
/// active-search-vs-oracle equivalence tests meaningful.
struct NeighborKey {
    std::int64_t dist_key = 0;  // squared L2 or plain L1, in pixel units
    int row = 0;
    int col = 0;
    std::uint32_t index = 0;  // point index; 0 when identities are unknown

    friend bool operator<(const NeighborKey& a, const NeighborKey& b) {
        if (a.dist_key != b.dist_key) return a.dist_key < b.dist_key;
        if (a.row != b.row) return a.row < b.row;
        if (a.col != b.col) return a.col < b.col;
        return a.index < b.index;
    }
};

/// Majority vote over per-class multiplicities; ties go to the lowest class
/// id. Returns 0 for an all-zero histogram.
inline int majority_vote(std::span<const std::uint64_t> votes_per_class) {
    int best = 0;
    std::uint64_t best_votes = 0;
    for (std::size_t c = 0; c < votes_per_class.size(); ++c) {
        if (votes_per_class[c] > best_votes) {
            best = int(c);
            best_votes = votes_per_class[c];
        }
    }
    return best;
}

}  // namespace aknn
