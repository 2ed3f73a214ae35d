#include "occ/neighbors.hpp"

#include <algorithm>
#include <stdexcept>

namespace occ {

NeighborIndex::NeighborIndex(Matrix points) : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("NeighborIndex: empty point set");
    if (!points_.all_finite()) throw std::invalid_argument("NeighborIndex: non-finite coordinates");
}

namespace {

struct Entry {
    double dist;
    std::size_t idx;
    bool operator<(const Entry& o) const {
        return dist < o.dist || (dist == o.dist && idx < o.idx);
    }
};

std::vector<Entry> knn_one(const Matrix& refs, std::span<const double> q, std::size_t k) {
    std::vector<Entry> all(refs.rows());
    for (std::size_t i = 0; i < refs.rows(); ++i) all[i] = {manhattan(refs.row(i), q), i};
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
    all.resize(k);
    return all;
}

}  // namespace

NeighborTable query(const NeighborIndex& index, const Matrix& queries, std::size_t k_max) {
    if (k_max < 1 || k_max > index.size())
        throw std::invalid_argument("query: k_max out of range [1, " +
                                    std::to_string(index.size()) + "]");
    if (queries.cols() != index.dim())
        throw std::invalid_argument("query: query width does not match reference width");

    NeighborTable t;
    t.k_max = k_max;
    t.distances.resize(queries.rows());
    t.indices.resize(queries.rows());
    for (std::size_t q = 0; q < queries.rows(); ++q) {
        const auto nn = knn_one(index.points(), queries.row(q), k_max);
        t.distances[q].resize(k_max);
        t.indices[q].resize(k_max);
        for (std::size_t r = 0; r < k_max; ++r) {
            t.distances[q][r] = nn[r].dist;
            t.indices[q][r] = nn[r].idx;
        }
    }
    return t;
}

NeighborTable query_loo(const NeighborIndex& index, std::size_t k_max) {
    if (k_max >= index.size())
        throw std::invalid_argument("query_loo: k_max must be < index size");

    NeighborTable t;
    t.k_max = k_max;
    t.self_excluded = true;
    t.distances.resize(index.size());
    t.indices.resize(index.size());
    for (std::size_t q = 0; q < index.size(); ++q) {
        auto nn = knn_one(index.points(), index.points().row(q), k_max + 1);
        // Remove the entry matching the query's own row. Duplicate points make
        // "drop the first zero distance" ambiguous, so match by index.
        auto self = std::find_if(nn.begin(), nn.end(),
                                 [q](const Entry& e) { return e.idx == q; });
        if (self != nn.end())
            nn.erase(self);
        else
            nn.pop_back();
        t.distances[q].resize(k_max);
        t.indices[q].resize(k_max);
        for (std::size_t r = 0; r < k_max; ++r) {
            t.distances[q][r] = nn[r].dist;
            t.indices[q][r] = nn[r].idx;
        }
    }
    return t;
}

}  // namespace occ
