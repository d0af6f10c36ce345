#pragma once

/*
 One-hidden-layer perceptron with logistic units.

   h = sigmoid(W1 x + b1)          W1: hidden x d
   o = sigmoid(W2 h + b2)          W2: classes x hidden

 Trained by full-batch gradient descent on the squared error against
 one-hot targets summed over the training set, L = 1/2 sum_n |o_n - t_n|^2.
 The step therefore grows with N; the default lr suits a few thousand rows.
*/

#include <cmath>
#include <cstdint>
#include <vector>

#include "ecoc/core.hpp"

namespace ecoc {

struct MlpModel {
    Matrix w1;
    std::vector<double> b1;
    Matrix w2;
    std::vector<double> b2;

    std::size_t dim() const noexcept { return w1.cols(); }
    std::size_t hidden() const noexcept { return w1.rows(); }
    std::size_t outputs() const noexcept { return w2.rows(); }

    friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

struct MlpParams {
    std::size_t hidden = 32;
    double lr = 1e-3;
    std::size_t epochs = 300;
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Weights uniform in [-0.5, 0.5], drawn in the order W1, b1, W2, b2.
inline MlpModel mlp_init(std::size_t dim, std::size_t hidden, std::size_t outputs, std::uint64_t seed) {
    Rng rng(seed);
    MlpModel m{Matrix(hidden, dim), std::vector<double>(hidden), Matrix(outputs, hidden), std::vector<double>(outputs)};
    for (double& w : m.w1.data()) w = rng.uniform(-0.5, 0.5);
    for (double& w : m.b1) w = rng.uniform(-0.5, 0.5);
    for (double& w : m.w2.data()) w = rng.uniform(-0.5, 0.5);
    for (double& w : m.b2) w = rng.uniform(-0.5, 0.5);
    return m;
}

/// Output activations; `hidden_out` receives the hidden activations if given.
inline std::vector<double> mlp_forward(const MlpModel& m, std::span<const double> x,
                                       std::vector<double>* hidden_out = nullptr) {
    if (x.size() != m.dim())
        throw Error(Errc::shape, "MLP input has dimension " + std::to_string(x.size()) + ", model expects " +
                                     std::to_string(m.dim()));
    std::vector<double> h(m.hidden());
    for (std::size_t j = 0; j < h.size(); ++j) h[j] = sigmoid(dot(m.w1.row(j), x) + m.b1[j]);
    std::vector<double> o(m.outputs());
    for (std::size_t c = 0; c < o.size(); ++c) o[c] = sigmoid(dot(m.w2.row(c), h) + m.b2[c]);
    if (hidden_out) *hidden_out = std::move(h);
    return o;
}

inline int mlp_predict(const MlpModel& m, std::span<const double> x) {
    return static_cast<int>(argmax_lowest(mlp_forward(m, x)));
}

inline double mlp_loss(const MlpModel& m, const Dataset& ds) {
    double loss = 0.0;
    for (std::size_t n = 0; n < ds.size(); ++n) {
        const auto o = mlp_forward(m, ds.row(n));
        for (std::size_t c = 0; c < o.size(); ++c) {
            const double t = ds.labels[n] == static_cast<int>(c) ? 1.0 : 0.0;
            loss += (o[c] - t) * (o[c] - t);
        }
    }
    return 0.5 * loss;
}

/// dL/dtheta by back-propagation, returned in the same layout as the model.
inline MlpModel mlp_gradient(const MlpModel& m, const Dataset& ds) {
    MlpModel g{Matrix(m.hidden(), m.dim()), std::vector<double>(m.hidden()), Matrix(m.outputs(), m.hidden()),
               std::vector<double>(m.outputs())};
    std::vector<double> h, delta_o(m.outputs()), delta_h(m.hidden());
    for (std::size_t n = 0; n < ds.size(); ++n) {
        auto x = ds.row(n);
        const auto o = mlp_forward(m, x, &h);
        for (std::size_t c = 0; c < o.size(); ++c) {
            const double t = ds.labels[n] == static_cast<int>(c) ? 1.0 : 0.0;
            delta_o[c] = (o[c] - t) * o[c] * (1.0 - o[c]);
        }
        for (std::size_t j = 0; j < h.size(); ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < o.size(); ++c) s += delta_o[c] * m.w2(c, j);
            delta_h[j] = s * h[j] * (1.0 - h[j]);
        }
        for (std::size_t c = 0; c < o.size(); ++c) {
            auto row = g.w2.row(c);
            for (std::size_t j = 0; j < h.size(); ++j) row[j] += delta_o[c] * h[j];
            g.b2[c] += delta_o[c];
        }
        for (std::size_t j = 0; j < h.size(); ++j) {
            if (delta_h[j] == 0.0) continue;
            auto row = g.w1.row(j);
            for (std::size_t i = 0; i < x.size(); ++i) row[i] += delta_h[j] * x[i];
            g.b1[j] += delta_h[j];
        }
    }
    return g;
}

/// All parameters in W1, b1, W2, b2 order.
inline std::vector<double> mlp_flatten(const MlpModel& m) {
    std::vector<double> p(m.w1.data());
    p.insert(p.end(), m.b1.begin(), m.b1.end());
    p.insert(p.end(), m.w2.data().begin(), m.w2.data().end());
    p.insert(p.end(), m.b2.begin(), m.b2.end());
    return p;
}

inline void mlp_unflatten(MlpModel& m, std::span<const double> p) {
    auto it = p.begin();
    auto fill = [&](std::span<double> dst) {
        std::copy(it, it + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
        it += static_cast<std::ptrdiff_t>(dst.size());
    };
    fill(m.w1.data());
    fill(m.b1);
    fill(m.w2.data());
    fill(m.b2);
}

inline MlpModel mlp_train(const Dataset& ds, const MlpParams& params, std::uint64_t seed) {
    if (ds.size() == 0) throw Error(Errc::empty_input, "cannot train an MLP on an empty dataset");
    if (params.hidden < 1 || !(params.lr > 0.0)) throw Error(Errc::config, "MLP needs hidden >= 1 and lr > 0");
    auto m = mlp_init(ds.dim(), params.hidden, ds.classes(), seed);
    for (std::size_t e = 0; e < params.epochs; ++e) {
        const auto g = mlp_gradient(m, ds);
        for (std::size_t i = 0; i < m.w1.data().size(); ++i) m.w1.data()[i] -= params.lr * g.w1.data()[i];
        for (std::size_t i = 0; i < m.b1.size(); ++i) m.b1[i] -= params.lr * g.b1[i];
        for (std::size_t i = 0; i < m.w2.data().size(); ++i) m.w2.data()[i] -= params.lr * g.w2.data()[i];
        for (std::size_t i = 0; i < m.b2.size(); ++i) m.b2[i] -= params.lr * g.b2[i];
    }
    return m;
}

}  // namespace ecoc
