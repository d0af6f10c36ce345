#pragma once

/*
 Core types shared by every module: the error type, a dense row-major
 matrix, the labeled Dataset, and the seeded random generator.

 All randomness goes through ecoc::Rng so that results are bit-identical
 for a fixed seed on any conforming platform (no std distributions, whose
 outputs are implementation-defined).
*/

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ecoc {

enum class Errc {
    config,                 // invalid configuration / validation
    range,                  // argument out of range
    version,                // unsupported archive version
    shape,                  // dimension mismatch
    format,                 // malformed input file
    parse,                  // unparseable value
    empty_input,
    degenerate_histogram,
    empty_content,
    stratification,
    io,
    degenerate_covariance,
    label,                  // missing or single class
    generation_failure,
    boost_failure,
    training,               // generic learner failure
};

inline const char* errc_name(Errc e) {
    switch (e) {
    case Errc::config: return "config error";
    case Errc::range: return "range error";
    case Errc::version: return "version error";
    case Errc::shape: return "shape error";
    case Errc::format: return "format error";
    case Errc::parse: return "parse error";
    case Errc::empty_input: return "empty-input error";
    case Errc::degenerate_histogram: return "degenerate-histogram error";
    case Errc::empty_content: return "empty-content error";
    case Errc::stratification: return "stratification error";
    case Errc::io: return "I/O error";
    case Errc::degenerate_covariance: return "degenerate-covariance error";
    case Errc::label: return "label error";
    case Errc::generation_failure: return "generation-failure error";
    case Errc::boost_failure: return "boost-failure error";
    case Errc::training: return "training error";
    }
    return "error";
}

/// Process exit code for an error category: 2 config/validation, 3 data, 4 training.
inline int exit_code(Errc e) {
    switch (e) {
    case Errc::config:
    case Errc::range:
    case Errc::version:
    case Errc::shape:
        return 2;
    case Errc::format:
    case Errc::parse:
    case Errc::empty_input:
    case Errc::degenerate_histogram:
    case Errc::empty_content:
    case Errc::stratification:
    case Errc::io:
        return 3;
    case Errc::degenerate_covariance:
    case Errc::label:
    case Errc::generation_failure:
    case Errc::boost_failure:
    case Errc::training:
        return 4;
    }
    return 1;
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// ---------------------------------------------------------------------------

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_)
            throw Error(Errc::shape, "matrix data length does not match rows*cols");
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    void append_row(std::span<const double> values) {
        if (rows_ == 0 && cols_ == 0) cols_ = values.size();
        if (values.size() != cols_) throw Error(Errc::shape, "appended row has wrong length");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

// ---------------------------------------------------------------------------

/// Feature matrix, one class index per row, and the class-name table.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> label_names;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t dim() const noexcept { return features.cols(); }
    std::size_t classes() const noexcept { return label_names.size(); }
    std::span<const double> row(std::size_t i) const { return features.row(i); }

    /// Throws if rows/labels disagree or a label is out of range.
    void check() const {
        if (features.rows() != labels.size())
            throw Error(Errc::shape, "feature rows (" + std::to_string(features.rows()) +
                                         ") != label count (" + std::to_string(labels.size()) + ")");
        for (int y : labels)
            if (y < 0 || static_cast<std::size_t>(y) >= label_names.size())
                throw Error(Errc::label, "class index " + std::to_string(y) + " out of range");
    }

    std::vector<std::size_t> class_counts() const {
        std::vector<std::size_t> counts(classes(), 0);
        for (int y : labels) ++counts[static_cast<std::size_t>(y)];
        return counts;
    }

    Dataset subset(std::span<const std::size_t> indices) const {
        Dataset out;
        out.label_names = label_names;
        out.features = Matrix(indices.size(), dim());
        out.labels.reserve(indices.size());
        for (std::size_t r = 0; r < indices.size(); ++r) {
            auto src = row(indices[r]);
            std::copy(src.begin(), src.end(), out.features.row(r).begin());
            out.labels.push_back(labels[indices[r]]);
        }
        return out;
    }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

// ---------------------------------------------------------------------------

/// SplitMix64 finalizer; used to derive independent seed streams.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a, for turning names into seed salts.
inline std::uint64_t hash_name(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Deterministic generator. Distributions are hand-rolled so the stream is
/// identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix_seed(seed)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), n > 0.
    std::size_t index(std::size_t n) {
        const unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * n;
        return static_cast<std::size_t>(m >> 64);
    }

    bool bit() { return (engine_() >> 63) != 0; }

    /// Standard normal via Box-Muller (one draw per call, no caching).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
    }

private:
    std::mt19937_64 engine_;
};

/// argmax with ties resolved to the lowest index.
inline std::size_t argmax_lowest(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

inline std::size_t argmin_lowest(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[best]) best = i;
    return best;
}

/// Fraction of positions where predicted == truth.
inline double accuracy(std::span<const int> predicted, std::span<const int> truth) {
    if (truth.empty()) return 0.0;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) ok += predicted[i] == truth[i];
    return static_cast<double>(ok) / static_cast<double>(truth.size());
}

}  // namespace ecoc
