#pragma once

#include "jsmooth/dataset.hpp"

#include <vector>

namespace jsmooth {

struct Neighbor {
    Index index;
    double distance;  // Euclidean
};

/// Exact k-nearest-neighbor search over a fixed point set.
///
/// Ties in distance are broken by the smaller point index, so results are
/// deterministic and agree with a brute-force scan ordered the same way.
class KdTree {
public:
    KdTree() = default;
    explicit KdTree(const Matrix& points, Index leaf_size = 16);

    Index size() const noexcept { return n_; }
    Index dim() const noexcept { return dim_; }

    /// The k nearest points to `query` (length dim()), sorted by (distance,
    /// index). `exclude` removes one point index from consideration.
    std::vector<Neighbor> query(const double* query, Index k, Index exclude = -1) const;

private:
    struct Node {
        Index begin, end;  // range into order_
        Index split_dim = -1;
        double split_value = 0.0;
        Index left = -1, right = -1;
    };

    Index build(Index begin, Index end, Index leaf_size);

    Index n_ = 0;
    Index dim_ = 0;
    std::vector<double> coords_;  // row-major copy
    std::vector<Index> order_;
    std::vector<Node> nodes_;
};

}  // namespace jsmooth
