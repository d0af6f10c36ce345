#pragma once

/*
 Error-correcting output codes.

 A CodingMatrix gives every class an n-bit codeword. Training builds, for
 each column j, the bipartition S_j = {i : C_ij = 1} versus the rest and
 fits one binary "plug-in" classifier (PiC) on the whole training set
 relabeled +1/-1. Decoding evaluates all n PiCs and picks the class whose
 codeword is nearest: Hamming distance on hard bits, or L1 distance on
 confidences in [0, 1]. Ties go to the lowest class index.

 Codes produced by random_code satisfy:
   - rows pairwise distinct
   - no constant column, no two identical or complementary columns
   - n >= ceil(log2 m) + 1
 one_vs_all_code is flagged `structured` and exempt from the column rules.
*/

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ecoc/core.hpp"
#include "ecoc/learner.hpp"

namespace ecoc {

struct CodingMatrix {
    std::size_t m = 0;  // classes
    std::size_t n = 0;  // code length
    std::vector<std::uint8_t> bits;  // m x n row-major
    bool structured = false;

    std::uint8_t at(std::size_t i, std::size_t j) const { return bits[i * n + j]; }
    std::span<const std::uint8_t> row(std::size_t i) const { return {bits.data() + i * n, n}; }

    std::vector<std::uint8_t> column(std::size_t j) const {
        std::vector<std::uint8_t> c(m);
        for (std::size_t i = 0; i < m; ++i) c[i] = at(i, j);
        return c;
    }

    /// Rows given as '0'/'1' strings of equal length.
    static CodingMatrix from_rows(const std::vector<std::string>& rows, bool structured = false) {
        CodingMatrix code;
        code.m = rows.size();
        code.n = rows.empty() ? 0 : rows.front().size();
        code.structured = structured;
        for (const auto& r : rows) {
            if (r.size() != code.n) throw Error(Errc::shape, "codeword rows have different lengths");
            for (char ch : r) {
                if (ch != '0' && ch != '1') throw Error(Errc::parse, "codeword '" + r + "' has a non-binary character");
                code.bits.push_back(static_cast<std::uint8_t>(ch - '0'));
            }
        }
        return code;
    }

    std::vector<std::string> row_strings() const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < m; ++i) {
            std::string s;
            for (auto b : row(i)) s.push_back(static_cast<char>('0' + b));
            out.push_back(std::move(s));
        }
        return out;
    }

    friend bool operator==(const CodingMatrix&, const CodingMatrix&) = default;
};

/// ceil(log2 m) + 1
inline std::size_t min_code_length(std::size_t m) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < m) ++bits;
    return bits + 1;
}

inline std::size_t hamming_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size())
        throw Error(Errc::shape, "bit vectors have lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

inline std::size_t min_code_distance(const CodingMatrix& code) {
    if (code.m < 2) throw Error(Errc::range, "minimum distance needs at least 2 codewords");
    std::size_t best = code.n + 1;
    for (std::size_t a = 0; a < code.m; ++a)
        for (std::size_t b = a + 1; b < code.m; ++b) best = std::min(best, hamming_distance(code.row(a), code.row(b)));
    return best;
}

struct CodeViolation {
    enum class Kind { shape, too_short, duplicate_rows, constant_column, identical_columns, complementary_columns };
    Kind kind;
    std::vector<std::size_t> indices;  // offending rows or columns
    std::string message;
};

inline std::vector<CodeViolation> validate_code(const CodingMatrix& code) {
    using K = CodeViolation::Kind;
    std::vector<CodeViolation> out;
    if (code.bits.size() != code.m * code.n) {
        out.push_back({K::shape, {}, "bit count does not match m x n"});
        return out;
    }
    for (auto b : code.bits)
        if (b > 1) {
            out.push_back({K::shape, {}, "entries must be 0 or 1"});
            return out;
        }
    if (code.n < min_code_length(code.m))
        out.push_back({K::too_short, {}, "code length " + std::to_string(code.n) + " < ceil(log2 m) + 1 = " +
                                              std::to_string(min_code_length(code.m))});
    for (std::size_t a = 0; a < code.m; ++a)
        for (std::size_t b = a + 1; b < code.m; ++b)
            if (hamming_distance(code.row(a), code.row(b)) == 0)
                out.push_back({K::duplicate_rows, {a, b},
                               "rows " + std::to_string(a) + " and " + std::to_string(b) + " are identical"});
    if (code.structured) return out;

    std::vector<std::vector<std::uint8_t>> cols;
    for (std::size_t j = 0; j < code.n; ++j) cols.push_back(code.column(j));
    for (std::size_t j = 0; j < code.n; ++j) {
        const auto ones = static_cast<std::size_t>(std::count(cols[j].begin(), cols[j].end(), std::uint8_t{1}));
        if (ones == 0 || ones == code.m)
            out.push_back({K::constant_column, {j}, "column " + std::to_string(j) + " is constant"});
    }
    for (std::size_t a = 0; a < code.n; ++a)
        for (std::size_t b = a + 1; b < code.n; ++b) {
            const auto d = hamming_distance(cols[a], cols[b]);
            if (d == 0)
                out.push_back({K::identical_columns, {a, b},
                               "columns " + std::to_string(a) + " and " + std::to_string(b) + " are identical"});
            else if (d == code.m)
                out.push_back({K::complementary_columns, {a, b},
                               "columns " + std::to_string(a) + " and " + std::to_string(b) + " are complementary"});
        }
    return out;
}

/// Bernoulli(1/2) code satisfying the CodingMatrix invariants. A bad column
/// is redrawn up to 1000 times; duplicate rows restart the whole matrix (up
/// to 100 times).
inline CodingMatrix random_code(std::size_t m, std::size_t n, std::uint64_t seed) {
    if (m < 2) throw Error(Errc::range, "a code needs at least 2 classes");
    if (n < min_code_length(m))
        throw Error(Errc::range, "code length " + std::to_string(n) + " is below ceil(log2 " + std::to_string(m) +
                                     ") + 1 = " + std::to_string(min_code_length(m)));
    // distinct non-constant columns up to complement: 2^(m-1) - 1
    if (m <= 63 && n > (std::size_t{1} << (m - 1)) - 1)
        throw Error(Errc::generation_failure, std::to_string(m) + " classes admit at most " +
                                                  std::to_string((std::size_t{1} << (m - 1)) - 1) +
                                                  " distinct non-complementary columns, requested " + std::to_string(n));
    Rng rng(seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        CodingMatrix code{m, n, std::vector<std::uint8_t>(m * n), false};
        std::set<std::vector<std::uint8_t>> seen;  // columns normalized so bit 0 is 0
        for (std::size_t j = 0; j < n; ++j) {
            bool placed = false;
            for (int tries = 0; tries < 1000 && !placed; ++tries) {
                std::vector<std::uint8_t> col(m);
                std::size_t ones = 0;
                for (auto& b : col) ones += (b = rng.bit() ? 1 : 0);
                if (ones == 0 || ones == m) continue;
                auto key = col;
                if (key[0] == 1)
                    for (auto& b : key) b ^= 1;
                if (!seen.insert(std::move(key)).second) continue;
                for (std::size_t i = 0; i < m; ++i) code.bits[i * n + j] = col[i];
                placed = true;
            }
            if (!placed)
                throw Error(Errc::generation_failure, "could not draw a valid column " + std::to_string(j) + " for m=" +
                                                          std::to_string(m) + ", n=" + std::to_string(n));
        }
        bool rows_ok = true;
        for (std::size_t a = 0; a < m && rows_ok; ++a)
            for (std::size_t b = a + 1; b < m && rows_ok; ++b) rows_ok = hamming_distance(code.row(a), code.row(b)) > 0;
        if (rows_ok) return code;
    }
    throw Error(Errc::generation_failure, "could not draw distinct codewords for m=" + std::to_string(m) +
                                              ", n=" + std::to_string(n));
}

/// Identity pattern: class i owns column i.
inline CodingMatrix one_vs_all_code(std::size_t m) {
    if (m < 2) throw Error(Errc::range, "a code needs at least 2 classes");
    CodingMatrix code{m, m, std::vector<std::uint8_t>(m * m, 0), true};
    for (std::size_t i = 0; i < m; ++i) code.bits[i * m + i] = 1;
    return code;
}

// ---------------------------------------------------------------------------

struct DecodeResult {
    int label = 0;
    std::vector<double> distances;       // one per class
    std::vector<double> predicted_bits;  // hard bits or confidences
};

/// Nearest codeword in Hamming distance.
inline DecodeResult decode_hard(const CodingMatrix& code, std::span<const std::uint8_t> bits) {
    if (bits.size() != code.n) throw Error(Errc::shape, "bit vector length != code length");
    DecodeResult r;
    r.predicted_bits.assign(bits.begin(), bits.end());
    for (std::size_t i = 0; i < code.m; ++i) r.distances.push_back(static_cast<double>(hamming_distance(code.row(i), bits)));
    r.label = static_cast<int>(argmin_lowest(r.distances));
    return r;
}

/// Nearest codeword in L1 distance to a confidence vector.
inline DecodeResult decode_soft(const CodingMatrix& code, std::span<const double> confidences) {
    if (confidences.size() != code.n) throw Error(Errc::shape, "confidence vector length != code length");
    DecodeResult r;
    r.predicted_bits.assign(confidences.begin(), confidences.end());
    for (std::size_t i = 0; i < code.m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < code.n; ++j) s += std::abs(static_cast<double>(code.at(i, j)) - confidences[j]);
        r.distances.push_back(s);
    }
    r.label = static_cast<int>(argmin_lowest(r.distances));
    return r;
}

// ---------------------------------------------------------------------------

class EcocModel {
public:
    EcocModel() = default;
    EcocModel(CodingMatrix code, std::vector<BinaryModel> pics, std::vector<std::string> label_names,
              LearnerConfig pic_config)
        : code_(std::move(code)), pics_(std::move(pics)), label_names_(std::move(label_names)),
          pic_config_(pic_config) {
        if (pics_.size() != code_.n) throw Error(Errc::shape, "ECOC needs one classifier per code column");
        if (label_names_.size() != code_.m) throw Error(Errc::shape, "ECOC label names do not match code rows");
        build_caches();
    }

    const CodingMatrix& code() const noexcept { return code_; }
    const std::vector<BinaryModel>& pics() const noexcept { return pics_; }
    const std::vector<std::string>& label_names() const noexcept { return label_names_; }
    const LearnerConfig& pic_config() const noexcept { return pic_config_; }

    /// Hard bit of every column classifier.
    std::vector<std::uint8_t> bits(std::span<const double> x) const {
        std::vector<std::uint8_t> out(pics_.size());
        if (svm_bank_) {
            const auto f = svm_bank_->decisions(x);
            for (std::size_t j = 0; j < f.size(); ++j) out[j] = f[j] > 0.0 ? 1 : 0;
        } else if (knn_shared_) {
            const auto frac = knn_fractions(x);
            for (std::size_t j = 0; j < frac.size(); ++j) out[j] = frac[j] > 0.5 ? 1 : 0;
        } else {
            for (std::size_t j = 0; j < pics_.size(); ++j) out[j] = static_cast<std::uint8_t>(binary_bit(pics_[j], x));
        }
        return out;
    }

    /// Confidence in [0, 1] that x lies in each column's positive superclass.
    std::vector<double> confidences(std::span<const double> x) const {
        std::vector<double> out(pics_.size());
        if (svm_bank_) {
            const auto f = svm_bank_->decisions(x);
            for (std::size_t j = 0; j < f.size(); ++j) out[j] = sigmoid(f[j]);
        } else if (knn_shared_) {
            out = knn_fractions(x);
        } else {
            for (std::size_t j = 0; j < pics_.size(); ++j) out[j] = binary_confidence(pics_[j], x);
        }
        return out;
    }

private:
    void build_caches() {
        if (pics_.empty()) return;
        if (std::all_of(pics_.begin(), pics_.end(), [](const BinaryModel& p) { return std::holds_alternative<TrainedSvm>(p); })) {
            std::vector<TrainedSvm> svms;
            for (const auto& p : pics_) svms.push_back(std::get<TrainedSvm>(p));
            svm_bank_ = std::make_shared<const SvmBank>(svms);
            return;
        }
        if (std::all_of(pics_.begin(), pics_.end(), [](const BinaryModel& p) { return std::holds_alternative<KnnModel>(p); })) {
            const auto& first = std::get<KnnModel>(pics_.front());
            knn_shared_ = std::all_of(pics_.begin(), pics_.end(), [&](const BinaryModel& p) {
                const auto& k = std::get<KnnModel>(p);
                return k.k == first.k && k.train.features == first.train.features;
            });
        }
    }

    // Neighbors are shared by all columns when the training rows are.
    std::vector<double> knn_fractions(std::span<const double> x) const {
        const auto& first = std::get<KnnModel>(pics_.front());
        const auto& train = first.train;
        if (x.size() != train.dim()) throw Error(Errc::shape, "kNN input dimension mismatch");
        std::vector<std::pair<double, std::size_t>> dist(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) dist[i] = {squared_distance(x, train.row(i)), i};
        const auto k = first.k;
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        std::vector<double> out(pics_.size());
        for (std::size_t j = 0; j < pics_.size(); ++j) {
            const auto& labels = std::get<KnnModel>(pics_[j]).train.labels;
            double pos = 0.0;
            for (std::size_t t = 0; t < k; ++t) pos += labels[dist[t].second] == 1 ? 1.0 : 0.0;
            out[j] = pos / static_cast<double>(k);
        }
        return out;
    }

    CodingMatrix code_;
    std::vector<BinaryModel> pics_;
    std::vector<std::string> label_names_;
    LearnerConfig pic_config_;
    std::shared_ptr<const SvmBank> svm_bank_;
    bool knn_shared_ = false;
};

/// Column j trains on the full set relabeled by C_ij, seed + j.
inline EcocModel ecoc_train(const Dataset& ds, const CodingMatrix& code, const LearnerConfig& pic, std::uint64_t seed) {
    if (code.m != ds.classes())
        throw Error(Errc::shape, "code has " + std::to_string(code.m) + " rows but the dataset has " +
                                     std::to_string(ds.classes()) + " classes");
    if (const auto v = validate_code(code); !v.empty()) throw Error(Errc::config, "invalid coding matrix: " + v.front().message);
    const auto counts = ds.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c)
        if (counts[c] == 0) throw Error(Errc::label, "class '" + ds.label_names[c] + "' is absent from training data");

    std::unique_ptr<GramMatrix> gram;
    if (pic.kind == LearnerKind::svm)
        gram = std::make_unique<GramMatrix>(ds.features, pic.svm_params(ds.dim()).kernel);

    std::vector<BinaryModel> pics;
    pics.reserve(code.n);
    std::vector<int> y(ds.size());
    for (std::size_t j = 0; j < code.n; ++j) {
        for (std::size_t i = 0; i < ds.size(); ++i) y[i] = code.at(static_cast<std::size_t>(ds.labels[i]), j) ? 1 : -1;
        pics.push_back(train_binary(ds.features, y, pic, seed + j, gram.get()));
    }
    return EcocModel(code, std::move(pics), ds.label_names, pic);
}

inline DecodeResult ecoc_decode_hard(const EcocModel& model, std::span<const double> x) {
    return decode_hard(model.code(), model.bits(x));
}

inline DecodeResult ecoc_decode_soft(const EcocModel& model, std::span<const double> x) {
    return decode_soft(model.code(), model.confidences(x));
}

inline int predict(const EcocModel& model, std::span<const double> x) { return ecoc_decode_hard(model, x).label; }

/// sum_{k=0}^{floor(delta_min/2)} C(n,k) p^k (1-p)^(n-k): lower bound on the
/// probability of correct decoding with independent column errors <= p.
inline double correct_classification_bound(std::size_t n, std::size_t delta_min, double p) {
    if (n < 1 || delta_min < 1) throw Error(Errc::range, "code length and minimum distance must be >= 1");
    if (delta_min > n) throw Error(Errc::range, "minimum distance exceeds code length");
    if (!(p >= 0.0 && p < 0.5)) throw Error(Errc::range, "column error must satisfy 0 <= p < 0.5");
    double s = 0.0, coeff = 1.0;
    for (std::size_t k = 0; k <= delta_min / 2; ++k) {
        if (k > 0) coeff = coeff * static_cast<double>(n - k + 1) / static_cast<double>(k);
        s += coeff * std::pow(p, static_cast<double>(k)) * std::pow(1.0 - p, static_cast<double>(n - k));
    }
    return s;
}

}  // namespace ecoc
