#pragma once

/*
 PCA feature extraction.

 pca_fit centers the training rows, builds the sample covariance (n-1
 divisor) and diagonalizes it with cyclic Jacobi rotations. Components are
 returned as unit rows sorted by descending eigenvalue, each flipped so its
 largest-magnitude entry is positive (first such entry on ties).

 When the data has fewer rows than columns the n x n Gram matrix of the
 centered rows is diagonalized instead and its eigenvectors are mapped back;
 the nonzero spectrum is the same and the cost drops from O(d^3) to O(n^3).
*/

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ecoc/core.hpp"

namespace ecoc {

struct EigenResult {
    std::vector<double> values;  // descending
    Matrix vectors;              // row i is the unit eigenvector for values[i]
    int sweeps = 0;
};

/// Symmetric eigen-decomposition by cyclic Jacobi sweeps. Stops when the
/// off-diagonal Frobenius norm is <= tol * ||A||_F or after max_sweeps.
inline EigenResult jacobi_eigen(Matrix a, double tol = 1e-10, int max_sweeps = 100) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw Error(Errc::shape, "jacobi_eigen needs a square matrix");
    Matrix v(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    double frob = 0.0;
    for (double x : a.data()) frob += x * x;
    frob = std::sqrt(frob);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
        return std::sqrt(s);
    };

    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        if (off_norm() <= tol * frob) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = a(p, k) = c * akp - s * akq;
                    a(k, q) = a(q, k) = s * akp + c * akq;
                }
                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigenResult out;
    out.sweeps = sweep;
    out.vectors = Matrix(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        out.values.push_back(a(order[r], order[r]));
        for (std::size_t k = 0; k < n; ++k) out.vectors(r, k) = v(k, order[r]);
    }
    return out;
}

/// Flips `vec` so that its largest-magnitude entry (lowest index on ties) is positive.
inline void canonicalize_sign(std::span<double> vec) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < vec.size(); ++i)
        if (std::abs(vec[i]) > std::abs(vec[best])) best = i;
    if (!vec.empty() && vec[best] < 0)
        for (double& x : vec) x = -x;
}

struct PcaModel {
    std::vector<double> mean;
    Matrix components;  // k x d
    std::vector<double> eigenvalues;

    std::size_t k() const noexcept { return components.rows(); }
    std::size_t d() const noexcept { return mean.size(); }

    friend bool operator==(const PcaModel&, const PcaModel&) = default;
};

inline PcaModel pca_fit(const Dataset& ds, std::size_t k) {
    const std::size_t n = ds.size(), d = ds.dim();
    if (n < 2) throw Error(Errc::range, "PCA needs at least 2 samples");
    if (k < 1 || k > std::min(d, n - 1))
        throw Error(Errc::range, "component count " + std::to_string(k) + " outside [1, " +
                                     std::to_string(std::min(d, n - 1)) + "]");

    PcaModel model;
    model.mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) model.mean[j] += ds.features(i, j);
    for (double& m : model.mean) m /= static_cast<double>(n);

    Matrix centered(n, d);
    bool any_variance = false;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            centered(i, j) = ds.features(i, j) - model.mean[j];
            any_variance |= ds.features(i, j) != ds.features(0, j);
        }
    if (!any_variance) throw Error(Errc::degenerate_covariance, "all rows are identical");

    const double denom = static_cast<double>(n - 1);
    model.components = Matrix(k, d);
    model.eigenvalues.assign(k, 0.0);

    bool done = false;
    if (n < d) {
        Matrix gram(n, n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a; b < n; ++b) gram(a, b) = gram(b, a) = dot(centered.row(a), centered.row(b)) / denom;
        const auto eig = jacobi_eigen(std::move(gram));
        const double floor = 1e-9 * std::max(eig.values.front(), 0.0);
        if (eig.values[k - 1] > floor && eig.values[k - 1] > 0.0) {
            for (std::size_t r = 0; r < k; ++r) {
                auto comp = model.components.row(r);
                for (std::size_t i = 0; i < n; ++i) {
                    const double w = eig.vectors(r, i);
                    auto xi = centered.row(i);
                    for (std::size_t j = 0; j < d; ++j) comp[j] += w * xi[j];
                }
                const double norm = std::sqrt(dot(comp, comp));
                for (double& c : comp) c /= norm;
                model.eigenvalues[r] = eig.values[r];
            }
            done = true;
        }
    }
    if (!done) {
        Matrix cov(d, d);
        for (std::size_t i = 0; i < n; ++i) {
            auto xi = centered.row(i);
            for (std::size_t a = 0; a < d; ++a) {
                const double xa = xi[a];
                if (xa == 0.0) continue;
                for (std::size_t b = a; b < d; ++b) cov(a, b) += xa * xi[b];
            }
        }
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = a; b < d; ++b) cov(b, a) = cov(a, b) = cov(a, b) / denom;
        const auto eig = jacobi_eigen(std::move(cov));
        for (std::size_t r = 0; r < k; ++r) {
            std::copy(eig.vectors.row(r).begin(), eig.vectors.row(r).end(), model.components.row(r).begin());
            model.eigenvalues[r] = eig.values[r];
        }
    }
    for (std::size_t r = 0; r < k; ++r) {
        canonicalize_sign(model.components.row(r));
        if (model.eigenvalues[r] < 0.0) model.eigenvalues[r] = 0.0;
    }
    return model;
}

inline std::vector<double> pca_project(const PcaModel& model, std::span<const double> x) {
    if (x.size() != model.d())
        throw Error(Errc::shape, "PCA input has dimension " + std::to_string(x.size()) + ", model expects " +
                                     std::to_string(model.d()));
    std::vector<double> centered(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) centered[j] = x[j] - model.mean[j];
    std::vector<double> out(model.k());
    for (std::size_t r = 0; r < model.k(); ++r) out[r] = dot(model.components.row(r), centered);
    return out;
}

inline Dataset pca_transform(const PcaModel& model, const Dataset& ds) {
    if (ds.dim() != model.d())
        throw Error(Errc::shape, "PCA input has dimension " + std::to_string(ds.dim()) + ", model expects " +
                                     std::to_string(model.d()));
    Dataset out;
    out.labels = ds.labels;
    out.label_names = ds.label_names;
    out.features = Matrix(ds.size(), model.k());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto p = pca_project(model, ds.row(i));
        std::copy(p.begin(), p.end(), out.features.row(i).begin());
    }
    return out;
}

}  // namespace ecoc
