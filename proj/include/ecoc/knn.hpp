#pragma once

// k-nearest-neighbor classification (Euclidean). Distance ties go to the
// lower training index, vote ties to the lower class index.

#include <algorithm>
#include <vector>

#include "ecoc/core.hpp"

namespace ecoc {

struct KnnModel {
    Dataset train;
    std::size_t k = 1;
};

/// Per-class vote counts among the k nearest training rows.
inline std::vector<double> knn_votes(const Dataset& train, std::size_t k, std::span<const double> x) {
    if (train.size() == 0) throw Error(Errc::empty_input, "kNN training set is empty");
    if (k < 1 || k > train.size())
        throw Error(Errc::range, "kNN k=" + std::to_string(k) + " outside [1, " + std::to_string(train.size()) + "]");
    if (x.size() != train.dim())
        throw Error(Errc::shape, "kNN input has dimension " + std::to_string(x.size()) + ", training data has " +
                                     std::to_string(train.dim()));

    std::vector<std::pair<double, std::size_t>> dist(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) dist[i] = {squared_distance(x, train.row(i)), i};
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

    std::vector<double> votes(train.classes(), 0.0);
    for (std::size_t n = 0; n < k; ++n) votes[static_cast<std::size_t>(train.labels[dist[n].second])] += 1.0;
    return votes;
}

inline int knn_predict(const Dataset& train, std::size_t k, std::span<const double> x) {
    return static_cast<int>(argmax_lowest(knn_votes(train, k, x)));
}

inline int knn_predict(const KnnModel& model, std::span<const double> x) { return knn_predict(model.train, model.k, x); }

}  // namespace ecoc
