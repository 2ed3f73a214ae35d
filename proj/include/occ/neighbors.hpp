#pragma once

#include <cstddef>
#include <vector>

#include "occ/matrix.hpp"

namespace occ {

// Exact k-nearest-neighbour queries under the Manhattan metric. One sorted
// k_max query serves every k <= k_max, which is what makes leave-one-out
// validation of the neighbour-based descriptors cheap.
class NeighborIndex {
public:
    explicit NeighborIndex(Matrix points);

    std::size_t size() const { return points_.rows(); }
    std::size_t dim() const { return points_.cols(); }
    const Matrix& points() const { return points_; }

private:
    Matrix points_;
};

// Per-query sorted neighbour lists of fixed width k_max. Distances are
// non-decreasing; ties broken by ascending reference index.
struct NeighborTable {
    std::size_t k_max = 0;
    bool self_excluded = false;
    std::vector<std::vector<double>> distances;     // [query][rank]
    std::vector<std::vector<std::size_t>> indices;  // [query][rank]

    std::size_t n_queries() const { return distances.size(); }
    double dist(std::size_t q, std::size_t k) const { return distances[q][k - 1]; }  // 1-based k
    std::size_t neighbor(std::size_t q, std::size_t k) const { return indices[q][k - 1]; }
};

NeighborTable query(const NeighborIndex& index, const Matrix& queries, std::size_t k_max);

// Each index point queried against the others: k_max+1 neighbours fetched,
// then the entry whose reference index equals the query's own row removed.
NeighborTable query_loo(const NeighborIndex& index, std::size_t k_max);

}  // namespace occ
