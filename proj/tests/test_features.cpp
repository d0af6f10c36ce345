#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "ecoc/features.hpp"

using namespace ecoc;

namespace {

Dataset rows_dataset(const std::vector<std::vector<double>>& rows) {
    Dataset ds;
    ds.features = Matrix(0, rows.front().size());
    for (const auto& r : rows) {
        ds.features.append_row(r);
        ds.labels.push_back(0);
    }
    ds.label_names = {"x"};
    return ds;
}

Dataset random_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    for (auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) r[j] = rng.normal() * static_cast<double>(j + 1) + (j % 2 ? 3.0 : -1.0);
    return rows_dataset(rows);
}

Matrix covariance(const Dataset& ds) {
    const std::size_t n = ds.size(), d = ds.dim();
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) mean[j] += ds.features(i, j) / static_cast<double>(n);
    Matrix c(d, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                c(a, b) += (ds.features(i, a) - mean[a]) * (ds.features(i, b) - mean[b]) / static_cast<double>(n - 1);
    return c;
}

// Random orthonormal basis by Gram-Schmidt on Gaussian vectors.
Matrix random_orthonormal(std::size_t d, Rng& rng) {
    Matrix q(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<double> v(d);
        for (auto& x : v) x = rng.normal();
        for (std::size_t k = 0; k < i; ++k) {
            const double p = dot(v, q.row(k));
            for (std::size_t j = 0; j < d; ++j) v[j] -= p * q(k, j);
        }
        const double nrm = std::sqrt(dot(v, v));
        for (std::size_t j = 0; j < d; ++j) q(i, j) = v[j] / nrm;
    }
    return q;
}

// det(A - lambda I) for d <= 4 by cofactor expansion.
double det(const Matrix& a) {
    const std::size_t d = a.rows();
    if (d == 1) return a(0, 0);
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        Matrix minor(d - 1, d - 1);
        for (std::size_t i = 1; i < d; ++i)
            for (std::size_t j = 0, jj = 0; j < d; ++j)
                if (j != c) minor(i - 1, jj++) = a(i, j);
        s += (c % 2 ? -1.0 : 1.0) * a(0, c) * det(minor);
    }
    return s;
}

double sign_aligned_diff(std::span<const double> a, std::span<const double> b) {
    double plus = 0.0, minus = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        plus = std::max(plus, std::abs(a[i] - b[i]));
        minus = std::max(minus, std::abs(a[i] + b[i]));
    }
    return std::min(plus, minus);
}

}  // namespace

// ---------------------------------------------------------------------------
// Jacobi

TEST(Jacobi, ClosedForm2x2) {
    // [[2,1],[1,2]] has eigenpairs 3:(1,1)/sqrt2 and 1:(1,-1)/sqrt2
    const auto r = jacobi_eigen(Matrix(2, 2, std::vector<double>{2, 1, 1, 2}));
    EXPECT_NEAR(r.values[0], 3.0, 1e-12);
    EXPECT_NEAR(r.values[1], 1.0, 1e-12);
    EXPECT_NEAR(std::abs(r.vectors(0, 0)), 1 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(r.vectors(0, 0) * r.vectors(0, 1), 0.5, 1e-12);
}

TEST(Jacobi, DiagonalIsAlreadyConverged) {
    const auto r = jacobi_eigen(Matrix(3, 3, std::vector<double>{1, 0, 0, 0, 5, 0, 0, 0, 3}));
    EXPECT_EQ(r.values, (std::vector<double>{5, 3, 1}));
    EXPECT_EQ(r.sweeps, 0);
}

// Oracle: matrices built as Q diag(l) Q^T with known eigenpairs, plus the
// characteristic polynomial det(A - lambda I) vanishing at each eigenvalue.
TEST(Jacobi, MatchesConstructedEigenpairsUpToDim4) {
    Rng rng(11);
    for (std::size_t d = 1; d <= 4; ++d) {
        for (int trial = 0; trial < 25; ++trial) {
            const auto q = random_orthonormal(d, rng);
            std::vector<double> lambda(d);
            for (std::size_t i = 0; i < d; ++i) lambda[i] = 5.0 - 1.3 * static_cast<double>(i) + 0.2 * rng.uniform();
            Matrix a(d, d);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    for (std::size_t k = 0; k < d; ++k) a(i, j) += q(k, i) * lambda[k] * q(k, j);
            const auto r = jacobi_eigen(a);
            for (std::size_t k = 0; k < d; ++k) {
                EXPECT_NEAR(r.values[k], lambda[k], 1e-8) << "d=" << d << " trial " << trial;
                EXPECT_LT(sign_aligned_diff(r.vectors.row(k), q.row(k)), 1e-8);
                Matrix shifted = a;
                for (std::size_t i = 0; i < d; ++i) shifted(i, i) -= r.values[k];
                EXPECT_NEAR(det(shifted), 0.0, 1e-8);
            }
        }
    }
}

TEST(Jacobi, ResidualAndOrthonormalityOnLargerMatrices) {
    Rng rng(2);
    for (std::size_t d : {5u, 12u, 30u}) {
        Matrix a(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.normal();
        const auto r = jacobi_eigen(a);
        for (std::size_t k = 0; k < d; ++k) {
            if (k > 0) {
                EXPECT_GE(r.values[k - 1], r.values[k]);
            }
            for (std::size_t i = 0; i < d; ++i) {
                double av = 0.0;
                for (std::size_t j = 0; j < d; ++j) av += a(i, j) * r.vectors(k, j);
                EXPECT_NEAR(av, r.values[k] * r.vectors(k, i), 1e-8);
            }
            for (std::size_t l = 0; l < d; ++l)
                EXPECT_NEAR(dot(r.vectors.row(k), r.vectors.row(l)), k == l ? 1.0 : 0.0, 1e-10);
        }
    }
}

TEST(Jacobi, SignConvention) {
    std::vector<double> v{0.2, -0.9, 0.3};
    canonicalize_sign(v);
    EXPECT_EQ(v, (std::vector<double>{-0.2, 0.9, -0.3}));
    std::vector<double> tie{-0.5, 0.5};
    canonicalize_sign(tie);
    EXPECT_EQ(tie, (std::vector<double>{0.5, -0.5}));
}

// ---------------------------------------------------------------------------
// PCA

TEST(Pca, LineData) {
    const auto ds = rows_dataset({{1, 1}, {2, 2}, {3, 3}, {4, 4}});
    const auto one = pca_fit(ds, 1);
    EXPECT_NEAR(one.components(0, 0), 1 / std::sqrt(2.0), 1e-8);
    EXPECT_NEAR(one.components(0, 1), 1 / std::sqrt(2.0), 1e-8);
    const auto two = pca_fit(ds, 2);
    EXPECT_NEAR(two.eigenvalues[1], 0.0, 1e-12);
    EXPECT_GE(two.eigenvalues[1], 0.0);
    EXPECT_NEAR(two.eigenvalues[0], 2.0 * 5.0 / 3.0, 1e-10);  // var along the line: 2 * var(1..4)
}

TEST(Pca, AxisAligned) {
    const auto m = pca_fit(rows_dataset({{1, 0}, {-1, 0}}), 1);
    EXPECT_NEAR(m.components(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(m.components(0, 1), 0.0, 1e-12);
    EXPECT_NEAR(m.eigenvalues[0], 2.0, 1e-12);
}

TEST(Pca, Errors) {
    const auto same = rows_dataset({{1, 2}, {1, 2}, {1, 2}});
    try {
        pca_fit(same, 1);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::degenerate_covariance);
    }
    const auto ds = random_dataset(5, 3, 1);
    for (std::size_t k : {0u, 4u}) {
        try {
            pca_fit(ds, k);
            ADD_FAILURE();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::range);
        }
    }
    const auto small = random_dataset(3, 6, 2);  // k <= n - 1 = 2
    EXPECT_NO_THROW(pca_fit(small, 2));
    EXPECT_THROW(pca_fit(small, 3), Error);
}

TEST(Pca, TransformMeanIsZeroAndShapeChecked) {
    const auto ds = random_dataset(30, 5, 3);
    const auto m = pca_fit(ds, 3);
    for (double v : pca_project(m, m.mean)) EXPECT_NEAR(v, 0.0, 1e-12);
    EXPECT_THROW(pca_project(m, std::vector<double>(4, 0.0)), Error);
    const auto t = pca_transform(m, ds);
    EXPECT_EQ(t.dim(), 3u);
    EXPECT_EQ(t.labels, ds.labels);
}

TEST(Pca, FullRankIsIsometry) {
    const auto ds = random_dataset(25, 4, 4);
    const auto t = pca_transform(pca_fit(ds, 4), ds);
    for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t j = 0; j < ds.size(); ++j)
            EXPECT_NEAR(std::sqrt(squared_distance(t.row(i), t.row(j))), std::sqrt(squared_distance(ds.row(i), ds.row(j))), 1e-8);
}

TEST(Pca, ComponentInvariants) {
    const auto ds = random_dataset(40, 6, 5);
    const auto m = pca_fit(ds, 6);
    for (std::size_t a = 0; a < 6; ++a) {
        EXPECT_NEAR(dot(m.components.row(a), m.components.row(a)), 1.0, 1e-8);
        for (std::size_t b = a + 1; b < 6; ++b) EXPECT_LE(std::abs(dot(m.components.row(a), m.components.row(b))), 1e-8);
        if (a > 0) {
            EXPECT_GE(m.eigenvalues[a - 1], m.eigenvalues[a]);
        }
        // largest-magnitude entry positive
        auto row = m.components.row(a);
        const auto it = std::max_element(row.begin(), row.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
        EXPECT_GT(*it, 0.0);
    }
}

TEST(Pca, EigenvalueSumEqualsTrace) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto ds = random_dataset(50, 7, seed);
        const auto m = pca_fit(ds, 7);
        const auto c = covariance(ds);
        double trace = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < 7; ++i) trace += c(i, i);
        for (double e : m.eigenvalues) sum += e;
        EXPECT_NEAR(sum, trace, 1e-6 * trace);
    }
}

TEST(Pca, ProjectedVarianceEqualsEigenvalue) {
    const auto ds = random_dataset(60, 5, 8);
    const auto m = pca_fit(ds, 5);
    const auto t = pca_transform(m, ds);
    const auto c = covariance(t);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(c(k, k), m.eigenvalues[k], 1e-6 * m.eigenvalues[k]);
}

TEST(Pca, ReconstructionErrorNonIncreasingInK) {
    const auto ds = random_dataset(30, 6, 9);
    double prev = 1e300;
    for (std::size_t k = 1; k <= 6; ++k) {
        const auto m = pca_fit(ds, k);
        double err = 0.0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const auto z = pca_project(m, ds.row(i));
            for (std::size_t j = 0; j < 6; ++j) {
                double rec = m.mean[j];
                for (std::size_t a = 0; a < k; ++a) rec += m.components(a, j) * z[a];
                err += (ds.features(i, j) - rec) * (ds.features(i, j) - rec);
            }
        }
        EXPECT_LE(err, prev + 1e-9);
        prev = err;
    }
    EXPECT_NEAR(prev, 0.0, 1e-9);
}

TEST(Pca, WideDataMatchesPrimalCovariance) {
    // n < d takes the Gram-matrix route; compare to Jacobi on the covariance.
    const auto ds = random_dataset(6, 10, 12);
    const auto m = pca_fit(ds, 4);
    const auto r = jacobi_eigen(covariance(ds));
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_NEAR(m.eigenvalues[k], r.values[k], 1e-8 * std::max(1.0, r.values[k]));
        EXPECT_LT(sign_aligned_diff(m.components.row(k), r.vectors.row(k)), 1e-7);
    }
}

TEST(Pca, Deterministic) {
    const auto ds = random_dataset(20, 5, 13);
    EXPECT_EQ(pca_fit(ds, 3), pca_fit(ds, 3));
}
