#pragma once

/*
 Experiment harness.

 run_experiment repeats, for r = 0..R-1:
   seed_r = master_seed + r
   stratified split of the dataset with seed_r
   optional PCA fit on the train side, applied to both sides
   each method trains with mix_seed(seed_r ^ hash(method name)) and is
   scored on the test side
 and reports per-method accuracy series, mean and standard error
 (sample standard deviation with n-1 divisor, over sqrt(R)).

 Because each method's seed depends only on the run and its own name,
 reordering methods in a config leaves every accuracy series unchanged,
 and the sweeps (code length, PCA components) vary exactly one setting
 across grid points.
*/

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ecoc/archive.hpp"
#include "ecoc/core.hpp"
#include "ecoc/dataset.hpp"
#include "ecoc/ecoc.hpp"
#include "ecoc/ensembles.hpp"
#include "ecoc/features.hpp"
#include "ecoc/learner.hpp"

namespace ecoc {

// ---------------------------------------------------------------------------
// Synthetic data

struct SyntheticSpec {
    std::size_t classes = 32;
    std::size_t per_class = 100;
    std::size_t dim = 64;
    double center_spread = 3.0;
    double noise_sigma = 1.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (classes < 1 || per_class < 1 || dim < 1) throw Error(Errc::config, "synthetic classes, per_class and dim must be >= 1");
        if (!(center_spread > 0.0)) throw Error(Errc::config, "synthetic center_spread must be > 0");
        if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw Error(Errc::config, "synthetic noise_sigma must be >= 0");
    }
    friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

/// Centers uniform in [-spread, spread]^d (all drawn first), then per_class
/// samples of each class in class order, center + N(0, sigma^2 I).
inline Dataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    Matrix centers(spec.classes, spec.dim);
    for (double& v : centers.data()) v = rng.uniform(-spec.center_spread, spec.center_spread);
    Dataset ds;
    ds.features = Matrix(spec.classes * spec.per_class, spec.dim);
    ds.labels.reserve(spec.classes * spec.per_class);
    for (std::size_t c = 0; c < spec.classes; ++c) {
        ds.label_names.push_back("c" + std::to_string(c));
        for (std::size_t s = 0; s < spec.per_class; ++s) {
            auto row = ds.features.row(ds.labels.size());
            for (std::size_t j = 0; j < spec.dim; ++j) row[j] = centers(c, j) + spec.noise_sigma * rng.normal();
            ds.labels.push_back(static_cast<int>(c));
        }
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Configuration

enum class MethodKind { svm, dt, knn, nn, bagging, boosting, ecoc };

inline std::string to_string(MethodKind k) {
    switch (k) {
    case MethodKind::svm: return "svm";
    case MethodKind::dt: return "dt";
    case MethodKind::knn: return "knn";
    case MethodKind::nn: return "nn";
    case MethodKind::bagging: return "bagging";
    case MethodKind::boosting: return "boosting";
    case MethodKind::ecoc: return "ecoc";
    }
    return "?";
}

inline MethodKind parse_method_kind(std::string_view s) {
    for (auto k : {MethodKind::svm, MethodKind::dt, MethodKind::knn, MethodKind::nn, MethodKind::bagging,
                   MethodKind::boosting, MethodKind::ecoc})
        if (s == to_string(k)) return k;
    throw Error(Errc::config, "unknown method '" + std::string(s) + "' (expected svm, dt, knn, nn, bagging, boosting or ecoc)");
}

/// One column of the report. `learner` is the model itself for the single
/// methods, the member learner for bagging/boosting and the PiC for ecoc.
struct MethodConfig {
    std::string name;
    MethodKind kind = MethodKind::svm;
    LearnerConfig learner;
    std::size_t k_count = 10;
    double subsample_fraction = 0.75;
    std::size_t code_length = 150;

    static MethodConfig defaults(MethodKind kind) {
        MethodConfig m;
        m.kind = kind;
        m.name = to_string(kind);
        switch (kind) {
        case MethodKind::dt: m.learner.kind = LearnerKind::tree; break;
        case MethodKind::knn: m.learner.kind = LearnerKind::knn; break;
        case MethodKind::nn: m.learner.kind = LearnerKind::mlp; break;
        default: m.learner.kind = LearnerKind::svm; break;
        }
        return m;
    }
};

struct CsvSource {
    std::string path;
};
struct ImageSource {
    std::string root;
    std::size_t image_size = 32;
};
using DatasetSource = std::variant<SyntheticSpec, CsvSource, ImageSource>;

struct ExperimentConfig {
    DatasetSource source = SyntheticSpec{};
    double train_fraction = 0.7;
    bool stratified = true;
    std::optional<std::size_t> pca_k = 20;
    std::vector<MethodConfig> methods;
    std::size_t runs = 10;
    std::uint64_t master_seed = 0;

    void validate() const {
        if (runs < 1) throw Error(Errc::config, "runs must be >= 1");
        if (methods.empty()) throw Error(Errc::config, "experiment needs at least one method");
        if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw Error(Errc::config, "train_fraction must be in (0, 1)");
        if (pca_k && *pca_k < 1) throw Error(Errc::config, "pca_k must be >= 1");
        std::set<std::string> names;
        for (const auto& m : methods) {
            if (m.name.empty()) throw Error(Errc::config, "method name is empty");
            if (!names.insert(m.name).second) throw Error(Errc::config, "duplicate method name '" + m.name + "'");
            if (m.k_count < 1) throw Error(Errc::config, "method '" + m.name + "': k_count must be >= 1");
            if (!(m.subsample_fraction > 0.0 && m.subsample_fraction <= 1.0))
                throw Error(Errc::config, "method '" + m.name + "': subsample_fraction must be in (0, 1]");
        }
        if (const auto* s = std::get_if<SyntheticSpec>(&source)) s->validate();
        if (const auto* s = std::get_if<ImageSource>(&source); s && s->image_size < 1)
            throw Error(Errc::config, "image_size must be >= 1");
    }
};

/// All seven methods of the comparison with their defaults.
inline std::vector<MethodConfig> default_methods() {
    std::vector<MethodConfig> out;
    for (auto k : {MethodKind::svm, MethodKind::dt, MethodKind::knn, MethodKind::nn, MethodKind::bagging,
                   MethodKind::boosting, MethodKind::ecoc})
        out.push_back(MethodConfig::defaults(k));
    return out;
}

/// The desk-scale synthetic benchmark: 32 classes x 100 samples in 64-d.
inline ExperimentConfig desk32_config() {
    ExperimentConfig cfg;
    cfg.methods = default_methods();
    return cfg;
}

// JSON form ------------------------------------------------------------------

inline Json to_json(const SyntheticSpec& s) {
    return {{"classes", s.classes}, {"per_class", s.per_class}, {"dim", s.dim},
            {"center_spread", s.center_spread}, {"noise_sigma", s.noise_sigma}, {"seed", s.seed}};
}

inline Json to_json(const MethodConfig& m) {
    return {{"name", m.name}, {"kind", to_string(m.kind)}, {"learner", to_json(m.learner)},
            {"k_count", m.k_count}, {"subsample_fraction", m.subsample_fraction}, {"code_length", m.code_length}};
}

inline Json to_json(const ExperimentConfig& c) {
    Json src;
    if (const auto* s = std::get_if<SyntheticSpec>(&c.source)) src = {{"synthetic", to_json(*s)}};
    else if (const auto* s = std::get_if<CsvSource>(&c.source)) src = {{"csv", s->path}};
    else {
        const auto& im = std::get<ImageSource>(c.source);
        src = {{"images", im.root}, {"image_size", im.image_size}};
    }
    Json methods = Json::array();
    for (const auto& m : c.methods) methods.push_back(to_json(m));
    return {{"dataset", src},
            {"split", {{"train_fraction", c.train_fraction}, {"stratified", c.stratified}}},
            {"pca_k", c.pca_k ? Json(*c.pca_k) : Json(nullptr)},
            {"methods", methods},
            {"runs", c.runs},
            {"master_seed", c.master_seed}};
}

namespace detail {

template <class F>
void config_keys(const Json& j, const char* what, F&& on_key) {
    if (!j.is_object()) throw Error(Errc::config, std::string(what) + " must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        try {
            if (!on_key(key, v)) throw Error(Errc::config, std::string("unknown ") + what + " key '" + key + "'");
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::config, std::string(what) + " key '" + key + "': " + e.what());
        }
    }
}

inline SyntheticSpec synthetic_from(const Json& j) {
    SyntheticSpec s;
    config_keys(j, "synthetic spec", [&](const std::string& k, const Json& v) {
        if (k == "classes") s.classes = v.get<std::size_t>();
        else if (k == "per_class") s.per_class = v.get<std::size_t>();
        else if (k == "dim") s.dim = v.get<std::size_t>();
        else if (k == "center_spread") s.center_spread = v.get<double>();
        else if (k == "noise_sigma") s.noise_sigma = v.get<double>();
        else if (k == "seed") s.seed = v.get<std::uint64_t>();
        else return false;
        return true;
    });
    return s;
}

inline MethodConfig method_from(const Json& j) {
    if (j.is_string()) return MethodConfig::defaults(parse_method_kind(j.get<std::string>()));
    if (!j.is_object() || !j.contains("kind")) throw Error(Errc::config, "method entry needs a 'kind'");
    auto m = MethodConfig::defaults(parse_method_kind(j.at("kind").get<std::string>()));
    config_keys(j, "method", [&](const std::string& k, const Json& v) {
        if (k == "kind") {
        } else if (k == "name") m.name = v.get<std::string>();
        else if (k == "learner") m.learner = learner_config_from(v, m.learner);
        else if (k == "k_count") m.k_count = v.get<std::size_t>();
        else if (k == "subsample_fraction") m.subsample_fraction = v.get<double>();
        else if (k == "code_length") m.code_length = v.get<std::size_t>();
        else return false;
        return true;
    });
    const bool single = m.kind == MethodKind::svm || m.kind == MethodKind::dt || m.kind == MethodKind::knn || m.kind == MethodKind::nn;
    if (single && m.learner.kind != MethodConfig::defaults(m.kind).learner.kind)
        throw Error(Errc::config, "method '" + m.name + "' cannot change its learner kind");
    return m;
}

}  // namespace detail

/// Unknown keys are config errors; omitted keys keep desk32 defaults.
inline ExperimentConfig experiment_config_from(const Json& j) {
    ExperimentConfig c = desk32_config();
    detail::config_keys(j, "experiment config", [&](const std::string& k, const Json& v) {
        if (k == "dataset") {
            if (!v.is_object() || v.empty()) throw Error(Errc::config, "dataset must name synthetic, csv or images");
            if (v.contains("synthetic")) c.source = detail::synthetic_from(v.at("synthetic"));
            else if (v.contains("csv")) c.source = CsvSource{v.at("csv").get<std::string>()};
            else if (v.contains("images"))
                c.source = ImageSource{v.at("images").get<std::string>(), v.value("image_size", std::size_t{32})};
            else throw Error(Errc::config, "dataset must name synthetic, csv or images");
        } else if (k == "split") {
            detail::config_keys(v, "split", [&](const std::string& sk, const Json& sv) {
                if (sk == "train_fraction") c.train_fraction = sv.get<double>();
                else if (sk == "stratified") c.stratified = sv.get<bool>();
                else return false;
                return true;
            });
        } else if (k == "pca_k") {
            c.pca_k = v.is_null() ? std::nullopt : std::optional<std::size_t>(v.get<std::size_t>());
        } else if (k == "methods") {
            if (!v.is_array()) throw Error(Errc::config, "methods must be an array");
            c.methods.clear();
            for (const auto& m : v) c.methods.push_back(detail::method_from(m));
        } else if (k == "runs") {
            c.runs = v.get<std::size_t>();
        } else if (k == "master_seed") {
            c.master_seed = v.get<std::uint64_t>();
        } else {
            return false;
        }
        return true;
    });
    c.validate();
    return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::config, "cannot open config '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::config, "config '" + path + "' is not valid JSON: " + e.what());
    }
    return experiment_config_from(j);
}

inline Dataset load_source(const DatasetSource& src) {
    if (const auto* s = std::get_if<SyntheticSpec>(&src)) return generate_synthetic(*s);
    if (const auto* s = std::get_if<CsvSource>(&src)) return load_csv(s->path);
    const auto& im = std::get<ImageSource>(src);
    return load_image_dir(im.root, im.image_size);
}

// ---------------------------------------------------------------------------
// Training one method

using MethodModel = std::variant<Classifier, BaggingModel, BoostModel, EcocModel>;

inline std::uint64_t method_seed(std::uint64_t run_seed, const std::string& name) {
    return mix_seed(run_seed ^ hash_name(name));
}

/// The ECOC code for a run is drawn from the method seed.
/// Random code for the ecoc method. Two classes admit a single usable column,
/// short of the minimum length 2, so they get the structured 2x2 code instead.
inline CodingMatrix method_code(std::size_t classes, std::size_t n, std::uint64_t seed) {
    if (classes == 2) return one_vs_all_code(2);
    return random_code(classes, n, seed);
}

inline MethodModel train_method(const MethodConfig& m, const Dataset& train, std::uint64_t seed) {
    switch (m.kind) {
    case MethodKind::svm:
    case MethodKind::dt:
    case MethodKind::knn:
    case MethodKind::nn: return train_classifier(train, m.learner, seed);
    case MethodKind::bagging: return bagging_train(train, m.k_count, m.learner, seed);
    case MethodKind::boosting: {
        BoostParams p;
        p.k_count = m.k_count;
        p.subsample_fraction = m.subsample_fraction;
        return adaboost_train(train, p, m.learner, seed);
    }
    case MethodKind::ecoc: return ecoc_train(train, method_code(train.classes(), m.code_length, seed), m.learner, seed);
    }
    throw Error(Errc::config, "unknown method kind");
}

inline int predict(const MethodModel& model, std::span<const double> x) {
    return std::visit([&](const auto& m) { return predict(m, x); }, model);
}

inline Json to_archive(const MethodModel& model) {
    return std::visit([](const auto& m) { return to_archive(m); }, model);
}

inline MethodModel method_model_from_archive(const Json& a) {
    const auto kind = archive_kind(a);
    if (kind == "bagging") return bagging_from_archive(a);
    if (kind == "boosting") return boost_from_archive(a);
    if (kind == "ecoc") return ecoc_from_archive(a);
    return classifier_from_archive(a);
}

/// A trained method plus the feature transform it expects.
struct Pipeline {
    MethodConfig method;
    std::optional<PcaModel> pca;
    std::vector<std::string> label_names;
    std::size_t input_dim = 0;
    MethodModel model;

    std::vector<double> transform(std::span<const double> x) const {
        if (x.size() != input_dim)
            throw Error(Errc::shape, "input has dimension " + std::to_string(x.size()) + ", model expects " +
                                         std::to_string(input_dim));
        if (pca) return pca_project(*pca, x);
        return {x.begin(), x.end()};
    }
    int predict(std::span<const double> x) const { return ecoc::predict(model, transform(x)); }
};

inline Pipeline train_pipeline(const MethodConfig& m, const Dataset& train, std::optional<std::size_t> pca_k,
                               std::uint64_t seed) {
    Pipeline p{m, std::nullopt, train.label_names, train.dim(), Classifier{}};
    if (pca_k) {
        if (*pca_k > train.dim())
            throw Error(Errc::config, "pca_k " + std::to_string(*pca_k) + " exceeds feature dimension " + std::to_string(train.dim()));
        p.pca = pca_fit(train, *pca_k);
        p.model = train_method(m, pca_transform(*p.pca, train), seed);
    } else {
        p.model = train_method(m, train, seed);
    }
    return p;
}

inline Json to_archive(const Pipeline& p) {
    return make_archive("pipeline", {{"method", to_json(p.method)},
                                     {"pca", p.pca ? to_archive(*p.pca) : Json(nullptr)},
                                     {"label_names", p.label_names},
                                     {"input_dim", p.input_dim},
                                     {"model", to_archive(p.model)}});
}

inline Pipeline pipeline_from_archive(const Json& a) {
    const auto& p = open_archive(a, "pipeline");
    try {
        Pipeline out{detail::method_from(p.at("method")), std::nullopt,
                     detail::field<std::vector<std::string>>(p, "label_names"),
                     detail::field<std::size_t>(p, "input_dim"), Classifier{}};
        if (!p.at("pca").is_null()) out.pca = pca_from_archive(p.at("pca"));
        out.model = method_model_from_archive(p.at("model"));
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::format, std::string("malformed pipeline archive: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Experiments

struct Summary {
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Standard error = sample sd (n-1 divisor) / sqrt(n); 0 for n = 1.
inline Summary summarize(std::span<const double> xs) {
    if (xs.empty()) throw Error(Errc::empty_input, "no values to summarize");
    Summary s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return s;
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    const double n = static_cast<double>(xs.size());
    s.standard_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return s;
}

struct MethodResult {
    std::string name;
    std::vector<double> accuracies;  // per run, in [0, 1]
    std::vector<std::uint64_t> seeds;  // per run
    double mean = 0.0;
    double standard_error = 0.0;
    double wall_seconds = 0.0;  // train + predict, summed over runs
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<std::uint64_t> run_seeds;
    std::vector<MethodResult> methods;
    std::size_t classes = 0;
    std::size_t dim = 0;

    bool single_run() const noexcept { return run_seeds.size() == 1; }
    const MethodResult& method(const std::string& name) const {
        for (const auto& m : methods)
            if (m.name == name) return m;
        throw Error(Errc::config, "report has no method '" + name + "'");
    }
};

namespace detail {

inline void check_ecoc_lengths(const ExperimentConfig& cfg, std::size_t classes) {
    for (const auto& m : cfg.methods)
        if (m.kind == MethodKind::ecoc && m.code_length < min_code_length(classes))
            throw Error(Errc::range, "method '" + m.name + "': code length " + std::to_string(m.code_length) +
                                         " is below the minimum " + std::to_string(min_code_length(classes)) + " for " +
                                         std::to_string(classes) + " classes");
}

}  // namespace detail

/// As run_experiment(cfg) on an already loaded dataset.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg, const Dataset& ds) {
    cfg.validate();
    ds.check();
    detail::check_ecoc_lengths(cfg, ds.classes());
    if (cfg.pca_k && *cfg.pca_k > ds.dim())
        throw Error(Errc::config, "pca_k " + std::to_string(*cfg.pca_k) + " exceeds feature dimension " + std::to_string(ds.dim()));

    ExperimentReport rep;
    rep.config = cfg;
    rep.classes = ds.classes();
    rep.dim = ds.dim();
    for (const auto& m : cfg.methods) rep.methods.push_back(MethodResult{m.name, {}, {}, 0.0, 0.0, 0.0});

    for (std::size_t r = 0; r < cfg.runs; ++r) {
        const std::uint64_t seed_r = cfg.master_seed + r;
        rep.run_seeds.push_back(seed_r);
        const std::string where = "run " + std::to_string(r);
        try {
            auto [train, test] = split(ds, SplitSpec{cfg.train_fraction, cfg.stratified, seed_r});
            if (cfg.pca_k) {
                const auto pca = pca_fit(train, *cfg.pca_k);
                train = pca_transform(pca, train);
                test = pca_transform(pca, test);
            }
            for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
                const auto& mc = cfg.methods[k];
                auto& res = rep.methods[k];
                const auto seed = method_seed(seed_r, mc.name);
                try {
                    const auto t0 = std::chrono::steady_clock::now();
                    const auto model = train_method(mc, train, seed);
                    const auto acc = accuracy(predict_all(model, test), test.labels);
                    res.wall_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                    res.accuracies.push_back(acc);
                    res.seeds.push_back(seed);
                } catch (const Error& e) {
                    throw Error(e.code(), "method '" + mc.name + "': " + e.what());
                }
            }
        } catch (const Error& e) {
            throw Error(e.code(), where + ", " + e.what());
        }
    }
    for (auto& m : rep.methods) {
        const auto s = summarize(m.accuracies);
        m.mean = s.mean;
        m.standard_error = s.standard_error;
    }
    return rep;
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    return run_experiment(cfg, load_source(cfg.source));
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepReport {
    std::string parameter;  // "code_length" or "pca_k"
    std::vector<std::size_t> grid;
    std::vector<ExperimentReport> points;

    /// max - min over grid points of the method's mean accuracy.
    double range(const std::string& method) const {
        double lo = 1e300, hi = -1e300;
        for (const auto& p : points) {
            const double m = p.method(method).mean;
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        return hi - lo;
    }
    std::vector<double> means(const std::string& method) const {
        std::vector<double> out;
        for (const auto& p : points) out.push_back(p.method(method).mean);
        return out;
    }
};

namespace detail {
inline void check_grid(const std::vector<std::size_t>& grid) {
    if (grid.empty()) throw Error(Errc::config, "sweep grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1]) throw Error(Errc::config, "sweep grid must be strictly increasing");
}
}  // namespace detail

inline SweepReport sweep_code_length(const ExperimentConfig& cfg, const std::vector<std::size_t>& grid, const Dataset& ds) {
    detail::check_grid(grid);
    cfg.validate();
    if (std::none_of(cfg.methods.begin(), cfg.methods.end(), [](const MethodConfig& m) { return m.kind == MethodKind::ecoc; }))
        throw Error(Errc::config, "code-length sweep needs an ecoc method");
    if (grid.front() < min_code_length(ds.classes()))
        throw Error(Errc::range, "code length " + std::to_string(grid.front()) + " is below the minimum " +
                                     std::to_string(min_code_length(ds.classes())));
    SweepReport out{"code_length", grid, {}};
    for (auto n : grid) {
        auto c = cfg;
        for (auto& m : c.methods)
            if (m.kind == MethodKind::ecoc) m.code_length = n;
        out.points.push_back(run_experiment(c, ds));
    }
    return out;
}

inline SweepReport sweep_code_length(const ExperimentConfig& cfg, const std::vector<std::size_t>& grid) {
    cfg.validate();
    return sweep_code_length(cfg, grid, load_source(cfg.source));
}

inline SweepReport sweep_features(const ExperimentConfig& cfg, const std::vector<std::size_t>& grid, const Dataset& ds) {
    detail::check_grid(grid);
    cfg.validate();
    if (!cfg.pca_k) throw Error(Errc::config, "feature sweep needs PCA enabled (pca_k set)");
    if (grid.front() < 1 || grid.back() > ds.dim())
        throw Error(Errc::config, "feature grid must lie within [1, " + std::to_string(ds.dim()) + "]");
    SweepReport out{"pca_k", grid, {}};
    for (auto k : grid) {
        auto c = cfg;
        c.pca_k = k;
        out.points.push_back(run_experiment(c, ds));
    }
    return out;
}

inline SweepReport sweep_features(const ExperimentConfig& cfg, const std::vector<std::size_t>& grid) {
    cfg.validate();
    return sweep_features(cfg, grid, load_source(cfg.source));
}

inline const std::vector<std::size_t>& default_code_grid() {
    static const std::vector<std::size_t> g{10, 30, 70, 150};
    return g;
}

inline const std::vector<std::size_t>& default_feature_grid() {
    static const std::vector<std::size_t> g{10, 15, 20, 25, 30};
    return g;
}

// ---------------------------------------------------------------------------
// Report emission

enum class ReportFormat { table, csv, json };

inline ReportFormat parse_report_format(std::string_view s) {
    if (s == "table") return ReportFormat::table;
    if (s == "csv") return ReportFormat::csv;
    if (s == "json") return ReportFormat::json;
    throw Error(Errc::config, "unknown format '" + std::string(s) + "' (expected table, csv or json)");
}

inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

/// Shortest text that parses back to the same double.
inline std::string format_exact(double v) {
    char buf[64];
    for (int p = 1; p <= 17; ++p) {
        std::snprintf(buf, sizeof buf, "%.*g", p, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

/// Features then the label name per row, every value round-trippable.
inline std::string dataset_to_csv(const Dataset& ds) {
    std::string out;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (double v : ds.row(i)) out += format_exact(v) + ",";
        out += ds.label_names[static_cast<std::size_t>(ds.labels[i])] + "\n";
    }
    return out;
}

/// "88.04 ± 0.107": percentages, mean to 2 and stderr to 3 decimals.
inline std::string format_cell(double mean_pct, double stderr_pct) {
    return format_fixed(mean_pct, 2) + " ± " + format_fixed(stderr_pct, 3);
}

namespace detail {

inline std::size_t display_width(const std::string& s) {
    std::size_t w = 0;
    for (unsigned char ch : s) w += (ch & 0xC0) != 0x80;
    return w;
}

inline std::string pad(const std::string& s, std::size_t width) {
    const auto w = display_width(s);
    return s + std::string(width > w ? width - w : 0, ' ');
}

inline std::string render_rows(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& r : rows) {
        widths.resize(std::max(widths.size(), r.size()));
        for (std::size_t i = 0; i < r.size(); ++i) widths[i] = std::max(widths[i], display_width(r[i]));
    }
    std::string out;
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i) line += (i + 1 < r.size() ? pad(r[i], widths[i] + 2) : r[i]);
        out += line + '\n';
    }
    return out;
}

inline Json method_json(const MethodResult& m, bool timing) {
    Json j{{"name", m.name}, {"accuracies", m.accuracies}, {"seeds", m.seeds},
           {"mean", m.mean}, {"standard_error", m.standard_error}};
    if (timing) j["wall_seconds"] = m.wall_seconds;
    return j;
}

inline Json report_json(const ExperimentReport& r, bool timing) {
    Json methods = Json::array();
    for (const auto& m : r.methods) methods.push_back(method_json(m, timing));
    Json ledger = Json::array();
    for (std::size_t i = 0; i < r.run_seeds.size(); ++i) {
        Json ms = Json::object();
        for (const auto& m : r.methods) ms[m.name] = m.seeds[i];
        ledger.push_back({{"run", i}, {"split_seed", r.run_seeds[i]}, {"method_seeds", ms}});
    }
    return {{"config", to_json(r.config)},
            {"classes", r.classes},
            {"dim", r.dim},
            {"runs", r.run_seeds.size()},
            {"single_run", r.single_run()},
            {"protocol", "each run is an independent stratified split seeded with master_seed + run"},
            {"seed_ledger", ledger},
            {"methods", methods}};
}

}  // namespace detail

inline std::string render_table(const ExperimentReport& r) {
    std::vector<std::vector<std::string>> rows{{"method", "accuracy % (mean ± stderr)", "runs", "seconds"}};
    for (const auto& m : r.methods)
        rows.push_back({m.name, format_cell(100.0 * m.mean, 100.0 * m.standard_error), std::to_string(m.accuracies.size()),
                        format_fixed(m.wall_seconds, 2)});
    std::string out = detail::render_rows(rows);
    out += "runs are independent stratified splits seeded with master_seed + run (master_seed " +
           std::to_string(r.config.master_seed) + ")\n";
    if (r.single_run()) out += "single run: standard error reported as 0\n";
    return out;
}

inline std::string render_table(const SweepReport& s) {
    std::vector<std::vector<std::string>> rows{{s.parameter}};
    for (const auto& m : s.points.front().methods) rows[0].push_back(m.name);
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        std::vector<std::string> row{std::to_string(s.grid[i])};
        for (const auto& m : s.points[i].methods) row.push_back(format_cell(100.0 * m.mean, 100.0 * m.standard_error));
        rows.push_back(std::move(row));
    }
    std::string out = detail::render_rows(rows);
    for (const auto& m : s.points.front().methods)
        out += m.name + " range (max - min of mean accuracy over the grid): " + format_fixed(100.0 * s.range(m.name), 3) + " pp\n";
    if (s.points.front().single_run()) out += "single run: standard error reported as 0\n";
    return out;
}

/// Columns: record,method,run,seed,value. One "run" row per (method, run),
/// then "mean" and "stderr" rows per method.
inline std::string render_csv(const ExperimentReport& r) {
    std::string out = "record,method,run,seed,value\n";
    for (const auto& m : r.methods)
        for (std::size_t i = 0; i < m.accuracies.size(); ++i)
            out += "run," + m.name + "," + std::to_string(i) + "," + std::to_string(m.seeds[i]) + "," + format_exact(m.accuracies[i]) + "\n";
    for (const auto& m : r.methods) {
        out += "mean," + m.name + ",,," + format_exact(m.mean) + "\n";
        out += "stderr," + m.name + ",,," + format_exact(m.standard_error) + "\n";
    }
    return out;
}

/// As the experiment csv with the swept parameter and its value in front.
inline std::string render_csv(const SweepReport& s) {
    std::string out = "parameter,grid_value,record,method,run,seed,value\n";
    for (std::size_t g = 0; g < s.points.size(); ++g) {
        const auto body = render_csv(s.points[g]);
        std::istringstream in(body);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) out += s.parameter + "," + std::to_string(s.grid[g]) + "," + line + "\n";
    }
    for (const auto& m : s.points.front().methods)
        out += s.parameter + ",,range," + m.name + ",,," + format_exact(s.range(m.name)) + "\n";
    return out;
}

inline Json report_to_json(const ExperimentReport& r, bool timing = true) {
    return {{"type", "experiment"}, {"report", detail::report_json(r, timing)}};
}

inline Json report_to_json(const SweepReport& s, bool timing = true) {
    Json points = Json::array();
    for (std::size_t i = 0; i < s.points.size(); ++i)
        points.push_back({{"value", s.grid[i]}, {"report", detail::report_json(s.points[i], timing)}});
    Json ranges = Json::object();
    for (const auto& m : s.points.front().methods) ranges[m.name] = s.range(m.name);
    return {{"type", "sweep"}, {"parameter", s.parameter}, {"grid", s.grid}, {"points", points},
            {"ranges", ranges}, {"range_definition", "max - min over grid points of mean accuracy"}};
}

template <class Report>
std::string render_report(const Report& r, ReportFormat f) {
    switch (f) {
    case ReportFormat::table: return render_table(r);
    case ReportFormat::csv: return render_csv(r);
    case ReportFormat::json: return report_to_json(r).dump(2) + "\n";
    }
    return {};
}

/// Writes to `path`, or to stdout when path is empty or "-".
template <class Report>
void emit_report(const Report& r, ReportFormat f, const std::string& path = {}) {
    const auto text = render_report(r, f);
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error(Errc::io, "cannot write report to '" + path + "'");
    out << text;
    if (!out) throw Error(Errc::io, "failed writing report to '" + path + "'");
}

}  // namespace ecoc
