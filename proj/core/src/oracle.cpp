#include "aknn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aknn {

namespace {

// Bounded selection: keeps the k best candidates under `less` in a max-heap,
// one pass over the data, no O(N) scratch.
template <typename Cand, typename Less>
class TopK {
public:
    TopK(int k, Less less) : k_(std::size_t(k)), less_(less) { heap_.reserve(k_); }

    void offer(const Cand& cand) {
        if (heap_.size() < k_) {
            heap_.push_back(cand);
            std::push_heap(heap_.begin(), heap_.end(), less_);
        } else if (less_(cand, heap_.front())) {
            std::pop_heap(heap_.begin(), heap_.end(), less_);
            heap_.back() = cand;
            std::push_heap(heap_.begin(), heap_.end(), less_);
        }
    }

    std::vector<Cand> sorted() && {
        std::sort_heap(heap_.begin(), heap_.end(), less_);
        return std::move(heap_);
    }

private:
    std::size_t k_;
    Less less_;
    std::vector<Cand> heap_;
};

struct WorldCand {
    double dist2;  // squared L2 or plain L1; sqrt deferred
    std::uint32_t index;
};

struct PixelCand {
    NeighborKey key;
};

}  // namespace

std::vector<OracleNeighbor> brute_knn(const Dataset& ds, double x, double y,
                                      int k, const OracleMode& mode,
                                      const GridConfig* quantize_cfg) {
    if (k < 1) throw std::invalid_argument("brute_knn: k must be >= 1");
    if (std::size_t(k) > ds.size())
        throw std::invalid_argument("brute_knn: k=" + std::to_string(k) +
                                    " exceeds dataset size " +
                                    std::to_string(ds.size()));

    std::vector<OracleNeighbor> out;
    out.reserve(std::size_t(k));

    if (mode.space == OracleSpace::World) {
        auto less = [](const WorldCand& a, const WorldCand& b) {
            if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
            return a.index < b.index;
        };
        TopK<WorldCand, decltype(less)> top(k, less);
        for (std::uint32_t i = 0; i < ds.points.size(); ++i) {
            const double dx = ds.points[i].x - x;
            const double dy = ds.points[i].y - y;
            const double d = mode.metric == Metric::L2
                                 ? dx * dx + dy * dy
                                 : std::abs(dx) + std::abs(dy);
            top.offer({d, i});
        }
        for (const auto& c : std::move(top).sorted())
            out.push_back({c.index,
                           mode.metric == Metric::L2 ? std::sqrt(c.dist2)
                                                     : c.dist2,
                           ds.points[c.index].label});
        return out;
    }

    if (quantize_cfg == nullptr)
        throw std::invalid_argument(
            "brute_knn: PixelQuantized mode needs a grid config");

    const PixelCoord q = pixel_of(*quantize_cfg, x, y);
    auto less = [](const PixelCand& a, const PixelCand& b) {
        return a.key < b.key;
    };
    TopK<PixelCand, decltype(less)> top(k, less);
    for (std::uint32_t i = 0; i < ds.points.size(); ++i) {
        const PixelCoord px =
            pixel_of(*quantize_cfg, ds.points[i].x, ds.points[i].y);
        const std::int64_t dx = px.col - q.col;
        const std::int64_t dy = px.row - q.row;
        const std::int64_t key = mode.metric == Metric::L2
                                     ? dx * dx + dy * dy
                                     : std::llabs(dx) + std::llabs(dy);
        top.offer({{key, px.row, px.col, i}});
    }
    for (const auto& c : std::move(top).sorted())
        out.push_back({c.key.index,
                       mode.metric == Metric::L2 ? std::sqrt(double(c.key.dist_key))
                                                 : double(c.key.dist_key),
                       ds.points[c.key.index].label});
    return out;
}

int brute_classify(const Dataset& ds, double x, double y, int k,
                   const OracleMode& mode, const GridConfig* quantize_cfg) {
    const auto nn = brute_knn(ds, x, y, k, mode, quantize_cfg);
    std::vector<std::uint64_t> votes(std::size_t(ds.num_classes), 0);
    for (const auto& n : nn) ++votes[std::size_t(n.label)];
    return majority_vote(votes);
}

double agreement(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("agreement: length mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    if (a.empty()) throw std::invalid_argument("agreement: empty input");
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] == b[i]) ++same;
    return double(same) / double(a.size());
}

}  // namespace aknn
