#pragma once

/*
 Uniform front end over the base learners.

 LearnerConfig selects one of svm / knn / tree / mlp plus its
 hyperparameters. Two trained shapes exist:

   Classifier   multiclass model (the svm kind is one-vs-all)
   BinaryModel  a single +1/-1 separator with a confidence in [0, 1] that
                the input belongs to the positive side; used as an ECOC
                column classifier
*/

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ecoc/core.hpp"
#include "ecoc/knn.hpp"
#include "ecoc/mlp.hpp"
#include "ecoc/svm.hpp"
#include "ecoc/tree.hpp"

namespace ecoc {

enum class LearnerKind { svm, knn, tree, mlp };

inline std::string to_string(LearnerKind k) {
    switch (k) {
    case LearnerKind::svm: return "svm";
    case LearnerKind::knn: return "knn";
    case LearnerKind::tree: return "tree";
    case LearnerKind::mlp: return "mlp";
    }
    return "?";
}

inline LearnerKind parse_learner_kind(std::string_view s) {
    if (s == "svm") return LearnerKind::svm;
    if (s == "knn") return LearnerKind::knn;
    if (s == "tree" || s == "dt") return LearnerKind::tree;
    if (s == "mlp" || s == "nn") return LearnerKind::mlp;
    throw Error(Errc::config, "unknown learner '" + std::string(s) + "' (expected svm, knn, tree or mlp)");
}

inline std::string to_string(KernelKind k) { return k == KernelKind::linear ? "linear" : "rbf"; }

inline KernelKind parse_kernel_kind(std::string_view s) {
    if (s == "linear") return KernelKind::linear;
    if (s == "rbf") return KernelKind::rbf;
    throw Error(Errc::config, "unknown kernel '" + std::string(s) + "'");
}

struct LearnerConfig {
    LearnerKind kind = LearnerKind::svm;

    KernelKind kernel = KernelKind::rbf;
    double svm_c = 10.0;
    std::optional<double> svm_gamma;  // unset: 1 / feature dimension
    double svm_tol = 1e-3;

    std::size_t knn_k = 3;

    std::size_t tree_max_depth = 20;
    std::size_t tree_min_leaf = 1;

    MlpParams mlp;

    SvmParams svm_params(std::size_t dim) const {
        SvmParams p;
        p.kernel.kind = kernel;
        p.kernel.gamma = svm_gamma.value_or(dim > 0 ? 1.0 / static_cast<double>(dim) : 1.0);
        p.c = svm_c;
        p.tol = svm_tol;
        return p;
    }

    friend bool operator==(const LearnerConfig& a, const LearnerConfig& b) {
        return a.kind == b.kind && a.kernel == b.kernel && a.svm_c == b.svm_c && a.svm_gamma == b.svm_gamma &&
               a.svm_tol == b.svm_tol && a.knn_k == b.knn_k &&
               a.tree_max_depth == b.tree_max_depth && a.tree_min_leaf == b.tree_min_leaf &&
               a.mlp.hidden == b.mlp.hidden && a.mlp.lr == b.mlp.lr && a.mlp.epochs == b.mlp.epochs;
    }
};

// ---------------------------------------------------------------------------
// One-vs-all SVM

class OneVsAllModel {
public:
    OneVsAllModel() = default;
    explicit OneVsAllModel(std::vector<TrainedSvm> models) : models_(std::move(models)), bank_(models_) {}

    const std::vector<TrainedSvm>& models() const noexcept { return models_; }
    std::size_t classes() const noexcept { return models_.size(); }
    std::size_t dim() const noexcept { return models_.empty() ? 0 : models_.front().dim(); }

    std::vector<double> decisions(std::span<const double> x) const { return bank_.decisions(x); }

private:
    std::vector<TrainedSvm> models_;
    SvmBank bank_;
};

/// Model c separates class c (+1) from the rest (-1).
inline OneVsAllModel one_vs_all_train(const Dataset& ds, const SvmParams& params, const GramMatrix& gram) {
    if (ds.classes() < 2) throw Error(Errc::label, "one-vs-all needs at least 2 classes");
    const auto counts = ds.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c)
        if (counts[c] == 0) throw Error(Errc::label, "class '" + ds.label_names[c] + "' is absent from training data");
    std::vector<TrainedSvm> models;
    models.reserve(ds.classes());
    BinaryLabeled bl{ds.features, std::vector<int>(ds.size())};
    for (std::size_t c = 0; c < ds.classes(); ++c) {
        for (std::size_t i = 0; i < ds.size(); ++i) bl.labels[i] = ds.labels[i] == static_cast<int>(c) ? 1 : -1;
        models.push_back(svm_train(bl, params, gram));
    }
    return OneVsAllModel(std::move(models));
}

inline OneVsAllModel one_vs_all_train(const Dataset& ds, const SvmParams& params) {
    params.validate();
    if (ds.classes() < 2) throw Error(Errc::label, "one-vs-all needs at least 2 classes");
    return one_vs_all_train(ds, params, GramMatrix(ds.features, params.kernel));
}

/// argmax of the per-class decision values, lowest class on ties.
inline int one_vs_all_predict(const OneVsAllModel& model, std::span<const double> x) {
    return static_cast<int>(argmax_lowest(model.decisions(x)));
}

// ---------------------------------------------------------------------------
// Multiclass front end

using Classifier = std::variant<OneVsAllModel, KnnModel, DecisionTree, MlpModel>;

inline LearnerKind kind_of(const Classifier& c) {
    return std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, OneVsAllModel>) return LearnerKind::svm;
            else if constexpr (std::is_same_v<T, KnnModel>) return LearnerKind::knn;
            else if constexpr (std::is_same_v<T, DecisionTree>) return LearnerKind::tree;
            else return LearnerKind::mlp;
        },
        c);
}

inline Classifier train_classifier(const Dataset& ds, const LearnerConfig& cfg, std::uint64_t seed) {
    if (ds.size() == 0) throw Error(Errc::empty_input, "training set is empty");
    switch (cfg.kind) {
    case LearnerKind::svm: return one_vs_all_train(ds, cfg.svm_params(ds.dim()));
    case LearnerKind::knn:
        if (cfg.knn_k < 1 || cfg.knn_k > ds.size())
            throw Error(Errc::range, "kNN k=" + std::to_string(cfg.knn_k) + " outside [1, " + std::to_string(ds.size()) + "]");
        return KnnModel{ds, cfg.knn_k};
    case LearnerKind::tree: return tree_train(ds, cfg.tree_max_depth, cfg.tree_min_leaf);
    case LearnerKind::mlp: return mlp_train(ds, cfg.mlp, seed);
    }
    throw Error(Errc::config, "unknown learner kind");
}

inline int predict(const Classifier& model, std::span<const double> x) {
    return std::visit(
        [&](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, OneVsAllModel>) return one_vs_all_predict(m, x);
            else if constexpr (std::is_same_v<T, KnnModel>) return knn_predict(m, x);
            else if constexpr (std::is_same_v<T, DecisionTree>) return tree_predict(m, x);
            else return mlp_predict(m, x);
        },
        model);
}

template <class Model>
std::vector<int> predict_all(const Model& model, const Dataset& ds) {
    std::vector<int> out(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) out[i] = predict(model, ds.row(i));
    return out;
}

// ---------------------------------------------------------------------------
// Binary (column) classifiers

using BinaryModel = std::variant<TrainedSvm, KnnModel, DecisionTree, MlpModel>;

/// Non-SVM learners see the problem as a 2-class Dataset, index 1 = positive.
inline Dataset as_two_class(const Matrix& features, std::span<const int> pm_labels) {
    Dataset ds;
    ds.features = features;
    ds.label_names = {"-1", "+1"};
    ds.labels.reserve(pm_labels.size());
    for (int y : pm_labels) ds.labels.push_back(y > 0 ? 1 : 0);
    return ds;
}

/// `gram` must be built over `features` with the resolved SVM kernel when given.
inline BinaryModel train_binary(const Matrix& features, std::span<const int> pm_labels, const LearnerConfig& cfg,
                                std::uint64_t seed, const GramMatrix* gram = nullptr) {
    detail::check_binary_labels(pm_labels);
    if (cfg.kind == LearnerKind::svm) {
        const auto params = cfg.svm_params(features.cols());
        BinaryLabeled bl{features, std::vector<int>(pm_labels.begin(), pm_labels.end())};
        if (gram) return svm_train(bl, params, *gram);
        return svm_train(bl, params);
    }
    auto ds = as_two_class(features, pm_labels);
    switch (cfg.kind) {
    case LearnerKind::knn:
        if (cfg.knn_k < 1 || cfg.knn_k > ds.size()) throw Error(Errc::range, "kNN k out of range");
        return KnnModel{std::move(ds), cfg.knn_k};
    case LearnerKind::tree: return tree_train(ds, cfg.tree_max_depth, cfg.tree_min_leaf);
    case LearnerKind::mlp: return mlp_train(ds, cfg.mlp, seed);
    default: break;
    }
    throw Error(Errc::config, "unknown learner kind");
}

/// Confidence that x is on the positive side.
inline double binary_confidence(const BinaryModel& model, std::span<const double> x) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TrainedSvm>) {
                return sigmoid(svm_decision(m, x));
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                const auto votes = knn_votes(m.train, m.k, x);
                return votes[1] / static_cast<double>(m.k);
            } else if constexpr (std::is_same_v<T, DecisionTree>) {
                return tree_leaf(m, x).proba[1];
            } else {
                const auto o = mlp_forward(m, x);
                const double s = o[0] + o[1];
                return s > 0.0 ? o[1] / s : 0.5;
            }
        },
        model);
}

/// Hard 0/1 output: 1 iff the model decides positive.
inline int binary_bit(const BinaryModel& model, std::span<const double> x) {
    return std::visit(
        [&](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TrainedSvm>) return svm_decision(m, x) > 0.0 ? 1 : 0;
            else if constexpr (std::is_same_v<T, KnnModel>) return knn_predict(m, x);
            else if constexpr (std::is_same_v<T, DecisionTree>) return tree_predict(m, x);
            else return mlp_predict(m, x);
        },
        model);
}

}  // namespace ecoc
