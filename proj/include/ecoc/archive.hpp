#pragma once

/*
 JSON model archives.

   { "format_version": 1, "kind": "<kind>", "payload": { ... } }

 Kinds: pca, binary_svm, svm (one-vs-all), knn, tree, mlp, bagging,
 boosting, code, ecoc. Ensemble and ECOC payloads nest full member
 archives. Doubles are written with round-trip precision, so a model read
 back predicts bit-identically.
*/

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ecoc/core.hpp"
#include "ecoc/ecoc.hpp"
#include "ecoc/ensembles.hpp"
#include "ecoc/features.hpp"
#include "ecoc/learner.hpp"

namespace ecoc {

using Json = nlohmann::json;

inline constexpr int archive_format_version = 1;

namespace detail {

template <class T>
T field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw Error(Errc::format, std::string("archive field '") + key + "' is missing");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(Errc::format, std::string("archive field '") + key + "' has the wrong type");
    }
}

inline Json rows_json(const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return rows;
}

inline Matrix rows_matrix(const Json& rows, std::size_t cols) {
    if (!rows.is_array()) throw Error(Errc::format, "matrix rows must be an array");
    Matrix m(0, cols);
    for (const auto& r : rows) {
        const auto v = r.get<std::vector<double>>();
        if (v.size() != cols) throw Error(Errc::format, "matrix row has " + std::to_string(v.size()) + " values, expected " + std::to_string(cols));
        m.append_row(v);
    }
    return m;
}

inline Json dataset_json(const Dataset& ds) {
    return {{"dim", ds.dim()}, {"features", rows_json(ds.features)}, {"labels", ds.labels}, {"label_names", ds.label_names}};
}

inline Dataset dataset_from(const Json& j) {
    Dataset ds;
    ds.features = rows_matrix(j.at("features"), field<std::size_t>(j, "dim"));
    ds.labels = field<std::vector<int>>(j, "labels");
    ds.label_names = field<std::vector<std::string>>(j, "label_names");
    ds.check();
    return ds;
}

inline Json tree_node_json(const DecisionTree& t, std::size_t i) {
    const auto& n = t.nodes[i];
    if (n.is_leaf()) return {{"label", n.label}, {"proba", n.proba}};
    return {{"feature", n.feature},
            {"threshold", n.threshold},
            {"left", tree_node_json(t, static_cast<std::size_t>(n.left))},
            {"right", tree_node_json(t, static_cast<std::size_t>(n.right))}};
}

inline int tree_node_from(const Json& j, DecisionTree& t) {
    const auto idx = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    if (j.contains("feature")) {
        const int feature = field<int>(j, "feature");
        if (feature < 0 || static_cast<std::size_t>(feature) >= t.dim) throw Error(Errc::format, "tree split feature out of range");
        const double threshold = field<double>(j, "threshold");
        const int left = tree_node_from(j.at("left"), t);
        const int right = tree_node_from(j.at("right"), t);
        auto& n = t.nodes[static_cast<std::size_t>(idx)];
        n.feature = feature;
        n.threshold = threshold;
        n.left = left;
        n.right = right;
    } else {
        auto& n = t.nodes[static_cast<std::size_t>(idx)];
        n.label = field<int>(j, "label");
        n.proba = field<std::vector<double>>(j, "proba");
    }
    return idx;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Envelope

inline Json make_archive(const std::string& kind, Json payload) {
    return {{"format_version", archive_format_version}, {"kind", kind}, {"payload", std::move(payload)}};
}

/// Validates the envelope and returns the payload. `kind` empty accepts any.
inline const Json& open_archive(const Json& archive, const std::string& kind = {}) {
    if (!archive.is_object() || !archive.contains("format_version"))
        throw Error(Errc::format, "not a model archive (no format_version)");
    const auto& v = archive.at("format_version");
    if (!v.is_number_integer() || v.get<long long>() != archive_format_version)
        throw Error(Errc::version, "unsupported archive format_version " + v.dump() + " (this build reads " +
                                       std::to_string(archive_format_version) + ")");
    const auto k = detail::field<std::string>(archive, "kind");
    if (!kind.empty() && k != kind) throw Error(Errc::format, "archive kind is '" + k + "', expected '" + kind + "'");
    if (!archive.contains("payload")) throw Error(Errc::format, "archive has no payload");
    return archive.at("payload");
}

inline std::string archive_kind(const Json& archive) {
    open_archive(archive);
    return archive.at("kind").get<std::string>();
}

inline Json parse_archive_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::format, std::string("archive is not valid JSON: ") + e.what());
    }
}

inline Json read_archive(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io, "cannot open archive '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_archive_text(ss.str());
}

inline void write_archive(const Json& archive, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::io, "cannot write archive '" + path + "'");
    out << archive.dump() << '\n';
    if (!out) throw Error(Errc::io, "failed writing archive '" + path + "'");
}

// ---------------------------------------------------------------------------
// Learner configuration

inline Json to_json(const LearnerConfig& c) {
    Json j{{"kind", to_string(c.kind)},
           {"kernel", to_string(c.kernel)},
           {"svm_c", c.svm_c},
           {"svm_tol", c.svm_tol},
           {"knn_k", c.knn_k},
           {"tree_max_depth", c.tree_max_depth},
           {"tree_min_leaf", c.tree_min_leaf},
           {"mlp_hidden", c.mlp.hidden},
           {"mlp_lr", c.mlp.lr},
           {"mlp_epochs", c.mlp.epochs}};
    j["svm_gamma"] = c.svm_gamma ? Json(*c.svm_gamma) : Json(nullptr);
    return j;
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline LearnerConfig learner_config_from(const Json& j, LearnerConfig c = {}) {
    if (!j.is_object()) throw Error(Errc::config, "learner configuration must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "kind") c.kind = parse_learner_kind(v.get<std::string>());
            else if (key == "kernel") c.kernel = parse_kernel_kind(v.get<std::string>());
            else if (key == "svm_c") c.svm_c = v.get<double>();
            else if (key == "svm_gamma") c.svm_gamma = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
            else if (key == "svm_tol") c.svm_tol = v.get<double>();
            else if (key == "knn_k") c.knn_k = v.get<std::size_t>();
            else if (key == "tree_max_depth") c.tree_max_depth = v.get<std::size_t>();
            else if (key == "tree_min_leaf") c.tree_min_leaf = v.get<std::size_t>();
            else if (key == "mlp_hidden") c.mlp.hidden = v.get<std::size_t>();
            else if (key == "mlp_lr") c.mlp.lr = v.get<double>();
            else if (key == "mlp_epochs") c.mlp.epochs = v.get<std::size_t>();
            else throw Error(Errc::config, "unknown learner option '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::config, std::string("bad learner option: ") + e.what());
    }
    return c;
}

// ---------------------------------------------------------------------------
// Single models

inline Json to_archive(const PcaModel& m) {
    return make_archive("pca", {{"mean", m.mean},
                                {"components", m.components.data()},
                                {"eigenvalues", m.eigenvalues},
                                {"k", m.k()},
                                {"d", m.d()}});
}

inline PcaModel pca_from_archive(const Json& a) {
    const auto& p = open_archive(a, "pca");
    PcaModel m;
    const auto k = detail::field<std::size_t>(p, "k"), d = detail::field<std::size_t>(p, "d");
    m.mean = detail::field<std::vector<double>>(p, "mean");
    m.eigenvalues = detail::field<std::vector<double>>(p, "eigenvalues");
    auto comps = detail::field<std::vector<double>>(p, "components");
    if (m.mean.size() != d || m.eigenvalues.size() != k || comps.size() != k * d)
        throw Error(Errc::format, "pca archive sizes disagree with k and d");
    m.components = Matrix(k, d, std::move(comps));
    return m;
}

inline Json svm_payload(const TrainedSvm& m) {
    return {{"alphas", m.alphas},
            {"dim", m.dim()},
            {"sv_features", detail::rows_json(m.sv_features)},
            {"sv_labels", m.sv_labels},
            {"bias", m.bias},
            {"kernel", {{"kind", to_string(m.kernel.kind)}, {"gamma", m.kernel.gamma}}}};
}

inline TrainedSvm svm_from_payload(const Json& p) {
    TrainedSvm m;
    m.alphas = detail::field<std::vector<double>>(p, "alphas");
    m.sv_features = detail::rows_matrix(p.at("sv_features"), detail::field<std::size_t>(p, "dim"));
    m.sv_labels = detail::field<std::vector<int>>(p, "sv_labels");
    m.bias = detail::field<double>(p, "bias");
    const auto& k = p.at("kernel");
    m.kernel.kind = parse_kernel_kind(detail::field<std::string>(k, "kind"));
    m.kernel.gamma = detail::field<double>(k, "gamma");
    if (m.alphas.size() != m.sv_features.rows() || m.sv_labels.size() != m.alphas.size())
        throw Error(Errc::format, "svm archive has mismatched support vector arrays");
    return m;
}

inline Json to_archive(const TrainedSvm& m) { return make_archive("binary_svm", svm_payload(m)); }

inline Json to_archive(const OneVsAllModel& m) {
    Json models = Json::array();
    for (const auto& s : m.models()) models.push_back(svm_payload(s));
    return make_archive("svm", {{"models", models}});
}

inline Json to_archive(const KnnModel& m) {
    return make_archive("knn", {{"k", m.k}, {"train", detail::dataset_json(m.train)}});
}

inline Json to_archive(const DecisionTree& t) {
    return make_archive("tree", {{"dim", t.dim}, {"classes", t.classes}, {"root", detail::tree_node_json(t, 0)}});
}

inline Json to_archive(const MlpModel& m) {
    return make_archive("mlp", {{"dim", m.dim()},
                                {"hidden", m.hidden()},
                                {"outputs", m.outputs()},
                                {"w1", m.w1.data()},
                                {"b1", m.b1},
                                {"w2", m.w2.data()},
                                {"b2", m.b2}});
}

inline Json to_archive(const Classifier& c) {
    return std::visit([](const auto& m) { return to_archive(m); }, c);
}

inline Json to_archive(const BinaryModel& c) {
    return std::visit([](const auto& m) { return to_archive(m); }, c);
}

namespace detail {

inline KnnModel knn_from(const Json& p) {
    KnnModel m{dataset_from(p.at("train")), field<std::size_t>(p, "k")};
    if (m.k < 1 || m.k > m.train.size()) throw Error(Errc::format, "knn archive has k out of range");
    return m;
}

inline DecisionTree tree_from(const Json& p) {
    DecisionTree t;
    t.dim = field<std::size_t>(p, "dim");
    t.classes = field<std::size_t>(p, "classes");
    if (!p.contains("root")) throw Error(Errc::format, "tree archive has no root");
    tree_node_from(p.at("root"), t);
    return t;
}

inline MlpModel mlp_from(const Json& p) {
    const auto d = field<std::size_t>(p, "dim"), h = field<std::size_t>(p, "hidden"), o = field<std::size_t>(p, "outputs");
    auto w1 = field<std::vector<double>>(p, "w1");
    auto w2 = field<std::vector<double>>(p, "w2");
    MlpModel m{Matrix(h, d, std::move(w1)), field<std::vector<double>>(p, "b1"), Matrix(o, h, std::move(w2)),
               field<std::vector<double>>(p, "b2")};
    if (m.b1.size() != h || m.b2.size() != o) throw Error(Errc::format, "mlp archive bias sizes disagree");
    return m;
}

}  // namespace detail

inline Classifier classifier_from_archive(const Json& a) {
    const auto kind = archive_kind(a);
    const auto& p = a.at("payload");
    try {
        if (kind == "svm") {
            std::vector<TrainedSvm> models;
            for (const auto& s : p.at("models")) models.push_back(svm_from_payload(s));
            return OneVsAllModel(std::move(models));
        }
        if (kind == "knn") return detail::knn_from(p);
        if (kind == "tree") return detail::tree_from(p);
        if (kind == "mlp") return detail::mlp_from(p);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::format, std::string("malformed ") + kind + " archive: " + e.what());
    }
    throw Error(Errc::format, "archive kind '" + kind + "' is not a multiclass classifier");
}

inline BinaryModel binary_from_archive(const Json& a) {
    const auto kind = archive_kind(a);
    const auto& p = a.at("payload");
    try {
        if (kind == "binary_svm") return svm_from_payload(p);
        if (kind == "knn") return detail::knn_from(p);
        if (kind == "tree") return detail::tree_from(p);
        if (kind == "mlp") return detail::mlp_from(p);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::format, std::string("malformed ") + kind + " archive: " + e.what());
    }
    throw Error(Errc::format, "archive kind '" + kind + "' is not a binary classifier");
}

// ---------------------------------------------------------------------------
// Ensembles and codes

inline Json to_archive(const BaggingModel& m) {
    Json members = Json::array();
    for (const auto& c : m.members) members.push_back(to_archive(c));
    return make_archive("bagging", {{"classes", m.classes}, {"members", members}, {"full_set_fallbacks", m.full_set_fallbacks}});
}

inline BaggingModel bagging_from_archive(const Json& a) {
    const auto& p = open_archive(a, "bagging");
    BaggingModel m;
    m.classes = detail::field<std::size_t>(p, "classes");
    for (const auto& c : p.at("members")) m.members.push_back(classifier_from_archive(c));
    m.full_set_fallbacks = detail::field<std::vector<std::size_t>>(p, "full_set_fallbacks");
    return m;
}

inline Json to_archive(const BoostModel& m) {
    Json members = Json::array();
    for (const auto& c : m.members) members.push_back(to_archive(c));
    return make_archive("boosting", {{"classes", m.classes},
                                     {"members", members},
                                     {"weights", m.member_weights},
                                     {"failed_rounds", m.failed_rounds}});
}

inline BoostModel boost_from_archive(const Json& a) {
    const auto& p = open_archive(a, "boosting");
    BoostModel m;
    m.classes = detail::field<std::size_t>(p, "classes");
    for (const auto& c : p.at("members")) m.members.push_back(classifier_from_archive(c));
    m.member_weights = detail::field<std::vector<double>>(p, "weights");
    m.failed_rounds = detail::field<std::size_t>(p, "failed_rounds");
    if (m.member_weights.size() != m.members.size()) throw Error(Errc::format, "boosting archive weight count != member count");
    return m;
}

inline Json code_payload(const CodingMatrix& c) {
    return {{"m", c.m}, {"n", c.n}, {"rows", c.row_strings()}, {"structured", c.structured}};
}

inline CodingMatrix code_from_payload(const Json& p) {
    auto c = CodingMatrix::from_rows(detail::field<std::vector<std::string>>(p, "rows"),
                                     p.contains("structured") && p.at("structured").get<bool>());
    if (c.m != detail::field<std::size_t>(p, "m") || c.n != detail::field<std::size_t>(p, "n"))
        throw Error(Errc::format, "code archive m/n disagree with its rows");
    return c;
}

inline Json to_archive(const CodingMatrix& c) { return make_archive("code", code_payload(c)); }

inline CodingMatrix code_from_archive(const Json& a) { return code_from_payload(open_archive(a, "code")); }

inline Json to_archive(const EcocModel& m) {
    Json pics = Json::array();
    for (const auto& p : m.pics()) pics.push_back(to_archive(p));
    return make_archive("ecoc", {{"code", code_payload(m.code())},
                                 {"pic_kind", to_string(m.pic_config().kind)},
                                 {"pic_config", to_json(m.pic_config())},
                                 {"label_names", m.label_names()},
                                 {"pics", pics}});
}

inline EcocModel ecoc_from_archive(const Json& a) {
    const auto& p = open_archive(a, "ecoc");
    auto code = code_from_payload(p.at("code"));
    auto cfg = learner_config_from(p.at("pic_config"));
    std::vector<BinaryModel> pics;
    for (const auto& x : p.at("pics")) pics.push_back(binary_from_archive(x));
    return EcocModel(std::move(code), std::move(pics), detail::field<std::vector<std::string>>(p, "label_names"), cfg);
}

}  // namespace ecoc
