#include "jsmooth/knn.hpp"

#include "jsmooth/error.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace jsmooth {

KdTree::KdTree(const Matrix& points, Index leaf_size) : n_(points.rows()), dim_(points.cols()) {
    if (n_ < 1 || dim_ < 1) throw UsageError("kd-tree needs a non-empty point set");
    coords_.resize(static_cast<std::size_t>(n_ * dim_));
    for (Index i = 0; i < n_; ++i)
        for (Index j = 0; j < dim_; ++j) coords_[static_cast<std::size_t>(i * dim_ + j)] = points(i, j);
    order_.resize(static_cast<std::size_t>(n_));
    for (Index i = 0; i < n_; ++i) order_[static_cast<std::size_t>(i)] = i;
    nodes_.reserve(static_cast<std::size_t>(2 * n_ / std::max<Index>(leaf_size, 1) + 2));
    build(0, n_, std::max<Index>(leaf_size, 1));
}

Index KdTree::build(Index begin, Index end, Index leaf_size) {
    const auto id = static_cast<Index>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= leaf_size) return id;

    // Split on the dimension of largest spread, at the median.
    Index best_dim = 0;
    double best_spread = -1.0;
    for (Index d = 0; d < dim_; ++d) {
        double lo = INFINITY, hi = -INFINITY;
        for (Index i = begin; i < end; ++i) {
            const double v = coords_[static_cast<std::size_t>(order_[static_cast<std::size_t>(i)] * dim_ + d)];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            best_dim = d;
        }
    }
    if (best_spread <= 0.0) return id;  // all points identical: keep as leaf

    const Index mid = begin + (end - begin) / 2;
    auto key = [&](Index p) { return coords_[static_cast<std::size_t>(p * dim_ + best_dim)]; };
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](Index a, Index b) { return key(a) < key(b); });
    const double split = key(order_[static_cast<std::size_t>(mid)]);

    const Index left = build(begin, mid, leaf_size);
    const Index right = build(mid, end, leaf_size);
    Node& node = nodes_[static_cast<std::size_t>(id)];
    node.split_dim = best_dim;
    node.split_value = split;
    node.left = left;
    node.right = right;
    return id;
}

namespace {

struct Candidate {
    double dist2;
    Index index;
    bool operator<(const Candidate& o) const {
        return dist2 < o.dist2 || (dist2 == o.dist2 && index < o.index);
    }
};

}  // namespace

std::vector<Neighbor> KdTree::query(const double* q, Index k, Index exclude) const {
    const Index available = n_ - ((exclude >= 0 && exclude < n_) ? 1 : 0);
    if (k < 1 || k > available) throw UsageError("k must be in [1, " + std::to_string(available) + "]");

    // Max-heap of the best k candidates seen so far.
    std::priority_queue<Candidate> best;
    auto consider = [&](Index p) {
        if (p == exclude) return;
        const double* x = &coords_[static_cast<std::size_t>(p * dim_)];
        double d2 = 0.0;
        for (Index j = 0; j < dim_; ++j) {
            const double diff = q[j] - x[j];
            d2 += diff * diff;
        }
        const Candidate c{d2, p};
        if (static_cast<Index>(best.size()) < k) {
            best.push(c);
        } else if (c < best.top()) {
            best.pop();
            best.push(c);
        }
    };

    // Iterative depth-first search, nearer child first. Each stack entry
    // carries a lower bound on the squared distance to its region.
    struct Item {
        Index node;
        double bound2;
    };
    std::vector<Item> stack{{0, 0.0}};
    while (!stack.empty()) {
        const Item item = stack.back();
        stack.pop_back();
        // `<=` keeps equal-distance regions so index tie-breaking stays exact.
        if (static_cast<Index>(best.size()) == k && item.bound2 > best.top().dist2) continue;
        const Node& node = nodes_[static_cast<std::size_t>(item.node)];
        if (node.split_dim < 0) {
            for (Index i = node.begin; i < node.end; ++i) consider(order_[static_cast<std::size_t>(i)]);
            continue;
        }
        const double diff = q[node.split_dim] - node.split_value;
        const Index near = diff < 0.0 ? node.left : node.right;
        const Index far = diff < 0.0 ? node.right : node.left;
        stack.push_back({far, std::max(item.bound2, diff * diff)});
        stack.push_back({near, item.bound2});
    }

    std::vector<Neighbor> out(best.size());
    for (auto i = static_cast<Index>(best.size()) - 1; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = Neighbor{best.top().index, std::sqrt(best.top().dist2)};
        best.pop();
    }
    return out;
}

}  // namespace jsmooth
