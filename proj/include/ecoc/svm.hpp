#pragma once

/*
 Soft-margin kernel SVM trained by sequential minimal optimization.

   f(x) = sum_i alpha_i y_i K(x, x_i) + b
   K(x, z) = x.z                      (linear)
           = exp(-gamma |x - z|^2)    (rbf)

 Each SMO step takes the maximal KKT violator i and the partner j with the
 largest second-order decrease of the dual, solves the two-variable
 subproblem in closed form inside the box [0, C] and updates the gradient.
 It stops once the violation gap (max over the up set minus min over the
 low set of y_t - g_t) falls below `tol`; every training point then meets
 its KKT condition within tol for the bias chosen from the feasible
 interval.

 Labels are +1/-1. A precomputed GramMatrix can be shared between several
 trainings on the same rows (one-vs-all, ECOC columns).
*/

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "ecoc/core.hpp"

namespace ecoc {

enum class KernelKind { linear, rbf };

struct KernelConfig {
    KernelKind kind = KernelKind::rbf;
    double gamma = 1.0;

    void validate() const {
        if (kind == KernelKind::rbf && !(gamma > 0.0))
            throw Error(Errc::config, "rbf kernel needs gamma > 0");
    }
    friend bool operator==(const KernelConfig&, const KernelConfig&) = default;
};

inline double kernel_eval(const KernelConfig& cfg, std::span<const double> x, std::span<const double> z) {
    if (x.size() != z.size())
        throw Error(Errc::shape, "kernel arguments have dimensions " + std::to_string(x.size()) + " and " +
                                     std::to_string(z.size()));
    if (cfg.kind == KernelKind::linear) return dot(x, z);
    return std::exp(-cfg.gamma * squared_distance(x, z));
}

struct SvmParams {
    KernelConfig kernel;
    double c = 10.0;
    double tol = 1e-3;
    std::size_t max_iterations = 0;  // 0: max(1e7, 100 l)

    void validate() const {
        kernel.validate();
        if (!(c > 0.0)) throw Error(Errc::config, "SVM penalty C must be > 0");
        if (!(tol > 0.0)) throw Error(Errc::config, "SVM tolerance must be > 0");
    }
};

/// Rows plus +1/-1 labels.
struct BinaryLabeled {
    Matrix features;
    std::vector<int> labels;

    std::size_t size() const noexcept { return labels.size(); }
};

struct TrainedSvm {
    std::vector<double> alphas;
    Matrix sv_features;
    std::vector<int> sv_labels;
    double bias = 0.0;
    KernelConfig kernel;
    // Training-row index of each support vector; empty for deserialized models.
    std::vector<std::size_t> sv_indices;

    std::size_t dim() const noexcept { return sv_features.cols(); }
};

/// Full l x l kernel matrix over a fixed set of rows.
class GramMatrix {
public:
    GramMatrix(const Matrix& rows, const KernelConfig& kernel) : n_(rows.rows()), values_(n_ * n_) {
        kernel.validate();
        for (std::size_t i = 0; i < n_; ++i) {
            values_[i * n_ + i] = kernel_eval(kernel, rows.row(i), rows.row(i));
            for (std::size_t j = i + 1; j < n_; ++j)
                values_[i * n_ + j] = values_[j * n_ + i] = kernel_eval(kernel, rows.row(i), rows.row(j));
        }
    }
    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * n_, n_}; }

private:
    std::size_t n_;
    std::vector<double> values_;
};

struct SmoSolution {
    std::vector<double> alphas;  // one per training row
    double bias = 0.0;
    std::size_t updates = 0;
};

/// W(alpha) = sum alpha - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
inline double dual_objective(std::span<const double> alphas, std::span<const int> labels, const GramMatrix& gram) {
    double linear = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        linear += alphas[i];
        if (alphas[i] == 0.0) continue;
        for (std::size_t j = 0; j < alphas.size(); ++j)
            quad += alphas[i] * alphas[j] * labels[i] * labels[j] * gram(i, j);
    }
    return linear - 0.5 * quad;
}

namespace detail {

inline void check_binary_labels(std::span<const int> labels) {
    bool pos = false, neg = false;
    for (int y : labels) {
        if (y == 1) pos = true;
        else if (y == -1) neg = true;
        else throw Error(Errc::label, "binary labels must be +1 or -1, got " + std::to_string(y));
    }
    if (!pos || !neg) throw Error(Errc::label, "binary training data needs both +1 and -1 samples");
}

}  // namespace detail

inline SmoSolution smo_solve(const GramMatrix& gram, std::span<const int> y, const SvmParams& params) {
    params.validate();
    detail::check_binary_labels(y);
    const std::size_t l = y.size();
    if (gram.size() != l) throw Error(Errc::shape, "Gram matrix size does not match label count");

    const double c = params.c, tol = params.tol;
    constexpr double tau = 1e-12;
    const std::size_t max_iter = params.max_iterations > 0 ? params.max_iterations : std::max<std::size_t>(10000000, 100 * l);

    // Dual in minimization form: 1/2 a'Qa - e'a, Q_ij = y_i y_j K_ij.
    // grad_t = y_t g_t - 1 with g_t = sum_k a_k y_k K_tk.
    std::vector<double> alpha(l, 0.0);
    std::vector<double> grad(l, -1.0);
    SmoSolution sol;

    auto in_up = [&](std::size_t t) { return y[t] == 1 ? alpha[t] < c : alpha[t] > 0.0; };
    auto in_low = [&](std::size_t t) { return y[t] == 1 ? alpha[t] > 0.0 : alpha[t] < c; };

    for (; sol.updates < max_iter; ++sol.updates) {
        // i: maximal violator from the up set
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = l;
        for (std::size_t t = 0; t < l; ++t)
            if (in_up(t) && -y[t] * grad[t] > gmax) {
                gmax = -y[t] * grad[t];
                i = t;
            }
        if (i == l) break;
        // j: largest second-order decrease from the low set
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        std::size_t j = l;
        auto ki = gram.row(i);
        for (std::size_t t = 0; t < l; ++t) {
            if (!in_low(t)) continue;
            const double yg = y[t] * grad[t];
            gmax2 = std::max(gmax2, yg);
            const double b = gmax + yg;
            if (b <= 0.0) continue;
            double a = ki[i] + gram(t, t) - 2.0 * ki[t];
            if (a <= 0.0) a = tau;
            const double obj = -(b * b) / a;
            if (obj < best) {
                best = obj;
                j = t;
            }
        }
        if (gmax + gmax2 < tol || j == l) break;

        const double ai_old = alpha[i], aj_old = alpha[j];
        auto kj = gram.row(j);
        const double qij = y[i] * y[j] * ki[j];
        if (y[i] != y[j]) {
            double quad = ki[i] + kj[j] + 2.0 * qij;
            if (quad <= 0.0) quad = tau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = ki[i] + kj[j] - 2.0 * qij;
            if (quad <= 0.0) quad = tau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double di = (alpha[i] - ai_old) * y[i], dj = (alpha[j] - aj_old) * y[j];
        for (std::size_t t = 0; t < l; ++t) grad[t] += y[t] * (di * ki[t] + dj * kj[t]);
    }

    // Bias from the KKT intervals of the final multipliers: with
    // F_t = y_t - g_t, the up set needs b >= F_t - tol, the low set b <= F_t + tol.
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < l; ++t) {
        const double f = -y[t] * grad[t];
        if (in_up(t)) lo = std::max(lo, f - tol);
        if (in_low(t)) hi = std::min(hi, f + tol);
        if (alpha[t] > 0.0 && alpha[t] < c) {
            free_sum += f;
            ++free_count;
        }
    }
    double bias;
    if (free_count > 0) bias = free_sum / static_cast<double>(free_count);
    else if (std::isfinite(lo) && std::isfinite(hi)) bias = 0.5 * (lo + hi);
    else bias = std::isfinite(lo) ? lo + tol : hi - tol;
    if (lo <= hi) bias = std::clamp(bias, lo, hi);
    sol.alphas = std::move(alpha);
    sol.bias = bias;
    return sol;
}

inline TrainedSvm svm_train(const BinaryLabeled& data, const SvmParams& params, const GramMatrix& gram) {
    if (data.features.rows() != data.labels.size())
        throw Error(Errc::shape, "feature rows do not match label count");
    const auto sol = smo_solve(gram, data.labels, params);
    TrainedSvm model;
    model.kernel = params.kernel;
    model.bias = sol.bias;
    model.sv_features = Matrix(0, data.features.cols());
    for (std::size_t i = 0; i < sol.alphas.size(); ++i) {
        if (sol.alphas[i] <= 1e-8) continue;
        model.alphas.push_back(sol.alphas[i]);
        model.sv_features.append_row(data.features.row(i));
        model.sv_labels.push_back(data.labels[i]);
        model.sv_indices.push_back(i);
    }
    if (model.alphas.empty()) throw Error(Errc::training, "SMO produced no support vectors");
    return model;
}

inline TrainedSvm svm_train(const BinaryLabeled& data, const SvmParams& params) {
    params.validate();
    detail::check_binary_labels(data.labels);
    return svm_train(data, params, GramMatrix(data.features, params.kernel));
}

inline double svm_decision(const TrainedSvm& model, std::span<const double> x) {
    if (x.size() != model.dim())
        throw Error(Errc::shape, "SVM input has dimension " + std::to_string(x.size()) + ", model expects " +
                                     std::to_string(model.dim()));
    double f = model.bias;
    for (std::size_t i = 0; i < model.alphas.size(); ++i)
        f += model.alphas[i] * model.sv_labels[i] * kernel_eval(model.kernel, x, model.sv_features.row(i));
    return f;
}

struct KktReport {
    double max_violation = 0.0;  // largest amount by which a condition is exceeded
    double equality_residual = 0.0;  // |sum alpha_i y_i|
    bool box_ok = true;

    bool ok(double tol) const { return box_ok && max_violation <= tol && equality_residual <= 1e-8; }
};

/// Audits a trained model against every training row (needs sv_indices).
inline KktReport kkt_audit(const TrainedSvm& model, const BinaryLabeled& data, double c) {
    std::vector<double> alpha(data.size(), 0.0);
    KktReport rep;
    double eq = 0.0;
    for (std::size_t s = 0; s < model.alphas.size(); ++s) {
        alpha[model.sv_indices.at(s)] = model.alphas[s];
        eq += model.alphas[s] * model.sv_labels[s];
        if (model.alphas[s] < 0.0 || model.alphas[s] > c) rep.box_ok = false;
    }
    rep.equality_residual = std::abs(eq);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double margin = data.labels[i] * svm_decision(model, data.features.row(i));
        double v = 0.0;
        if (alpha[i] <= 1e-8) v = (1.0 - margin);              // want margin >= 1
        else if (alpha[i] >= c - 1e-8) v = (margin - 1.0);     // want margin <= 1
        else v = std::abs(margin - 1.0);
        rep.max_violation = std::max(rep.max_violation, v);
    }
    return rep;
}

/// Several SVMs sharing one kernel, evaluated together: support vectors that
/// occur in more than one model are evaluated once per input.
class SvmBank {
public:
    SvmBank() = default;
    explicit SvmBank(const std::vector<TrainedSvm>& models) {
        if (models.empty()) return;
        kernel_ = models.front().kernel;
        dim_ = models.front().dim();
        pool_ = Matrix(0, dim_);
        std::unordered_map<std::string, std::size_t> index;
        for (const auto& m : models) {
            if (!(m.kernel == kernel_) || m.dim() != dim_)
                throw Error(Errc::shape, "SvmBank models must share kernel and dimension");
            Entry entry{m.bias, {}};
            for (std::size_t s = 0; s < m.alphas.size(); ++s) {
                auto row = m.sv_features.row(s);
                std::string key(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(double));
                auto [it, inserted] = index.try_emplace(std::move(key), pool_.rows());
                if (inserted) pool_.append_row(row);
                entry.terms.emplace_back(it->second, m.alphas[s] * m.sv_labels[s]);
            }
            entries_.push_back(std::move(entry));
        }
    }

    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t pool_size() const noexcept { return pool_.rows(); }

    std::vector<double> decisions(std::span<const double> x) const {
        if (x.size() != dim_)
            throw Error(Errc::shape, "SVM input has dimension " + std::to_string(x.size()) + ", model expects " +
                                         std::to_string(dim_));
        std::vector<double> k(pool_.rows());
        for (std::size_t p = 0; p < pool_.rows(); ++p) k[p] = kernel_eval(kernel_, x, pool_.row(p));
        std::vector<double> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) {
            double f = e.bias;
            for (const auto& [p, coef] : e.terms) f += coef * k[p];
            out.push_back(f);
        }
        return out;
    }

private:
    struct Entry {
        double bias;
        std::vector<std::pair<std::size_t, double>> terms;
    };
    KernelConfig kernel_;
    std::size_t dim_ = 0;
    Matrix pool_;
    std::vector<Entry> entries_;
};

}  // namespace ecoc
