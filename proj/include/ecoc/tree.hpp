#pragma once

/*
 Entropy decision tree.

 Binary splits `x[feature] <= threshold` go left. Candidate thresholds are
 midpoints between consecutive distinct sorted values of a feature; the
 split with the largest information gain wins (lowest feature, then lowest
 threshold, on ties). A node becomes a leaf when it is pure, at max_depth,
 when the best gain is <= 1e-12, or when no split leaves min_leaf rows on
 both sides.
*/

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ecoc/core.hpp"

namespace ecoc {

/// Shannon entropy in bits of a count vector.
inline double entropy(std::span<const std::size_t> counts) {
    std::size_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw Error(Errc::empty_input, "entropy of an all-zero count vector");
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h;
}

inline double entropy(std::initializer_list<std::size_t> counts) {
    return entropy(std::span<const std::size_t>(counts.begin(), counts.size()));
}

struct TreeNode {
    // split when feature >= 0
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    // leaf payload
    int label = 0;
    std::vector<double> proba;

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Flat node storage; node 0 is the root.
struct DecisionTree {
    std::vector<TreeNode> nodes;
    std::size_t dim = 0;
    std::size_t classes = 0;

    std::size_t depth() const { return nodes.empty() ? 0 : depth_of(0); }
    std::size_t leaves() const {
        return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
    }
    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

private:
    std::size_t depth_of(std::size_t i) const {
        const auto& n = nodes[i];
        if (n.is_leaf()) return 0;
        return 1 + std::max(depth_of(static_cast<std::size_t>(n.left)), depth_of(static_cast<std::size_t>(n.right)));
    }
};

namespace detail {

class TreeBuilder {
public:
    TreeBuilder(const Dataset& ds, std::size_t max_depth, std::size_t min_leaf)
        : ds_(ds), max_depth_(max_depth), min_leaf_(min_leaf) {}

    DecisionTree build() {
        tree_.dim = ds_.dim();
        tree_.classes = ds_.classes();
        std::vector<std::size_t> rows(ds_.size());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        grow(rows, 0);
        return std::move(tree_);
    }

private:
    std::vector<std::size_t> counts_of(std::span<const std::size_t> rows) const {
        std::vector<std::size_t> counts(ds_.classes(), 0);
        for (auto r : rows) ++counts[static_cast<std::size_t>(ds_.labels[r])];
        return counts;
    }

    int grow(std::vector<std::size_t>& rows, std::size_t depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        const auto counts = counts_of(rows);
        {
            auto& leaf = tree_.nodes.back();
            leaf.proba.resize(counts.size());
            for (std::size_t c = 0; c < counts.size(); ++c)
                leaf.proba[c] = static_cast<double>(counts[c]) / static_cast<double>(rows.size());
            leaf.label = static_cast<int>(argmax_lowest(leaf.proba));
        }
        const double parent_h = entropy(counts);
        if (parent_h == 0.0 || depth >= max_depth_ || rows.size() < 2 * min_leaf_) return id;

        int best_feature = -1;
        double best_threshold = 0.0, best_gain = 1e-12;
        std::vector<std::pair<double, int>> column(rows.size());
        std::vector<std::size_t> left(ds_.classes());
        std::vector<std::size_t> right(ds_.classes());
        const double n = static_cast<double>(rows.size());

        for (std::size_t f = 0; f < ds_.dim(); ++f) {
            for (std::size_t i = 0; i < rows.size(); ++i) column[i] = {ds_.features(rows[i], f), ds_.labels[rows[i]]};
            std::sort(column.begin(), column.end());
            std::fill(left.begin(), left.end(), 0);
            right = counts;
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                const auto c = static_cast<std::size_t>(column[i].second);
                ++left[c];
                --right[c];
                if (column[i].first == column[i + 1].first) continue;
                const std::size_t nl = i + 1, nr = column.size() - nl;
                if (nl < min_leaf_ || nr < min_leaf_) continue;
                const double gain = parent_h - (static_cast<double>(nl) / n) * entropy(left) -
                                    (static_cast<double>(nr) / n) * entropy(right);
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    double mid = 0.5 * (column[i].first + column[i + 1].first);
                    if (!(mid < column[i + 1].first)) mid = column[i].first;
                    best_threshold = mid;
                }
            }
        }
        if (best_feature < 0) return id;

        std::vector<std::size_t> lrows, rrows;
        for (auto r : rows)
            (ds_.features(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? lrows : rrows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();
        const int l = grow(lrows, depth + 1);
        const int r = grow(rrows, depth + 1);
        auto& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.label = 0;
        node.proba.clear();
        node.left = l;
        node.right = r;
        return id;
    }

    const Dataset& ds_;
    std::size_t max_depth_;
    std::size_t min_leaf_;
    DecisionTree tree_;
};

}  // namespace detail

inline DecisionTree tree_train(const Dataset& ds, std::size_t max_depth, std::size_t min_leaf = 1) {
    if (ds.size() == 0) throw Error(Errc::empty_input, "cannot grow a tree on an empty dataset");
    if (max_depth < 1 || min_leaf < 1) throw Error(Errc::config, "tree max_depth and min_leaf must be >= 1");
    return detail::TreeBuilder(ds, max_depth, min_leaf).build();
}

inline const TreeNode& tree_leaf(const DecisionTree& tree, std::span<const double> x) {
    if (x.size() != tree.dim)
        throw Error(Errc::shape, "tree input has dimension " + std::to_string(x.size()) + ", tree expects " +
                                     std::to_string(tree.dim));
    const TreeNode* node = &tree.nodes.at(0);
    while (!node->is_leaf())
        node = &tree.nodes[static_cast<std::size_t>(x[static_cast<std::size_t>(node->feature)] <= node->threshold
                                                        ? node->left
                                                        : node->right)];
    return *node;
}

inline int tree_predict(const DecisionTree& tree, std::span<const double> x) { return tree_leaf(tree, x).label; }

}  // namespace ecoc
