#pragma once

/*
 Dataset ingestion and image preprocessing.

 CSV:    comma separated, no header, last column is the label token.
         Labels are indexed by order of first appearance.
 Images: <root>/<class>/<file>.pgm, P2 or P5 with maxval <= 255. Each image
         is binarized (Otsu), cropped to its ink bounding box and resampled
         to side x side by nearest neighbor; class indices follow the
         lexicographic order of the subdirectory names.
*/

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ecoc/core.hpp"

namespace ecoc {

struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

struct BinaryImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> bits;  // 1 = ink, 0 = background

    std::uint8_t at(std::size_t x, std::size_t y) const { return bits[y * width + x]; }
    std::size_t ink_count() const {
        return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
    }

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;
};

struct SplitSpec {
    double train_fraction = 0.7;
    bool stratified = true;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return cells;
}

inline bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail

/// Parses CSV text (see file header). `source` names the input in errors.
inline Dataset parse_csv(std::string_view text, const std::string& source = "<csv>") {
    Dataset ds;
    std::map<std::string, int, std::less<>> index_of;
    std::size_t row_no = 0;
    std::size_t width = 0;
    std::vector<double> values;

    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = detail::trim(text.substr(start, end - start));
        start = end + 1;
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        ++row_no;
        const auto cells = detail::split_commas(line);
        if (width == 0) {
            width = cells.size();
            if (width < 2)
                throw Error(Errc::format, source + " row " + std::to_string(row_no) +
                                              ": need at least one feature and a label");
        } else if (cells.size() != width) {
            throw Error(Errc::format, source + " row " + std::to_string(row_no) + ": expected " +
                                          std::to_string(width) + " columns, found " +
                                          std::to_string(cells.size()));
        }
        values.resize(width - 1);
        for (std::size_t c = 0; c + 1 < width; ++c) {
            if (!detail::parse_double(cells[c], values[c]))
                throw Error(Errc::parse, source + " row " + std::to_string(row_no) + " column " +
                                             std::to_string(c + 1) + ": not a number: '" +
                                             std::string(cells[c]) + "'");
        }
        const auto token = cells.back();
        if (token.empty())
            throw Error(Errc::format, source + " row " + std::to_string(row_no) + ": empty label");
        auto it = index_of.find(token);
        if (it == index_of.end()) {
            it = index_of.emplace(std::string(token), static_cast<int>(ds.label_names.size())).first;
            ds.label_names.emplace_back(token);
        }
        ds.features.append_row(values);
        ds.labels.push_back(it->second);
        if (end == text.size()) break;
    }
    if (row_no == 0) throw Error(Errc::empty_input, source + " contains no rows");
    return ds;
}

struct FeatureRows {
    Matrix features;
    std::vector<std::string> labels;  // empty when the input had no label column
};

/// Rows of `dim` numbers, optionally followed by a label token on every row.
inline FeatureRows parse_feature_csv(std::string_view text, std::size_t dim, const std::string& source = "<csv>") {
    FeatureRows out{Matrix(0, dim), {}};
    std::size_t row_no = 0;
    std::optional<bool> labeled;
    std::vector<double> values(dim);
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = detail::trim(text.substr(start, end - start));
        start = end + 1;
        if (line.empty()) continue;
        ++row_no;
        const auto cells = detail::split_commas(line);
        if (cells.size() != dim && cells.size() != dim + 1)
            throw Error(Errc::format, source + " row " + std::to_string(row_no) + ": expected " + std::to_string(dim) +
                                          " features (plus an optional label), found " + std::to_string(cells.size()) +
                                          " columns");
        const bool has_label = cells.size() == dim + 1;
        if (labeled && *labeled != has_label)
            throw Error(Errc::format, source + " row " + std::to_string(row_no) + ": label column present on some rows only");
        labeled = has_label;
        for (std::size_t c = 0; c < dim; ++c)
            if (!detail::parse_double(cells[c], values[c]))
                throw Error(Errc::parse, source + " row " + std::to_string(row_no) + " column " + std::to_string(c + 1) +
                                             ": not a number: '" + std::string(cells[c]) + "'");
        out.features.append_row(values);
        if (has_label) out.labels.emplace_back(cells.back());
    }
    if (row_no == 0) throw Error(Errc::empty_input, source + " contains no rows");
    return out;
}

inline Dataset load_csv(const std::filesystem::path& path) {
    return parse_csv(detail::read_file(path), path.string());
}

/// Parses a P2/P5 PGM; maxval below 255 is rescaled to [0, 255].
inline GrayImage parse_pgm(std::string_view bytes) {
    std::size_t pos = 0;
    auto skip_ws = [&] {
        for (;;) {
            while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
            if (pos < bytes.size() && bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
                continue;
            }
            return;
        }
    };
    auto read_uint = [&](const char* what) {
        skip_ws();
        std::size_t value = 0;
        const auto [ptr, ec] = std::from_chars(bytes.data() + pos, bytes.data() + bytes.size(), value);
        if (ec != std::errc() || ptr == bytes.data() + pos)
            throw Error(Errc::format, std::string("PGM: bad ") + what);
        pos = static_cast<std::size_t>(ptr - bytes.data());
        return value;
    };

    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5'))
        throw Error(Errc::format, "PGM: magic must be P2 or P5");
    const bool ascii = bytes[1] == '2';
    pos = 2;
    GrayImage img;
    img.width = read_uint("width");
    img.height = read_uint("height");
    const std::size_t maxval = read_uint("maxval");
    if (img.width == 0 || img.height == 0) throw Error(Errc::format, "PGM: zero dimension");
    if (maxval == 0 || maxval > 255) throw Error(Errc::format, "PGM: maxval must be in [1, 255]");

    const std::size_t n = img.width * img.height;
    img.pixels.resize(n);
    auto scale = [&](std::size_t v) {
        if (v > maxval) throw Error(Errc::format, "PGM: sample exceeds maxval");
        return static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
    };
    if (ascii) {
        for (std::size_t i = 0; i < n; ++i) img.pixels[i] = scale(read_uint("sample"));
    } else {
        if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos])))
            throw Error(Errc::format, "PGM: missing separator before raster");
        ++pos;
        if (bytes.size() - pos < n) throw Error(Errc::format, "PGM: truncated raster");
        for (std::size_t i = 0; i < n; ++i)
            img.pixels[i] = scale(static_cast<unsigned char>(bytes[pos + i]));
    }
    return img;
}

inline GrayImage read_pgm(const std::filesystem::path& path) {
    return parse_pgm(detail::read_file(path));
}

inline void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io, "cannot write " + path.string());
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
}

/// Otsu threshold: intensities below it are the dark class. Returns the
/// midpoint of the first plateau of maximal between-class variance.
inline int otsu_threshold(const GrayImage& img) {
    std::array<double, 256> hist{};
    for (auto p : img.pixels) hist[p] += 1.0;
    const int distinct = static_cast<int>(std::count_if(hist.begin(), hist.end(), [](double h) { return h > 0; }));
    if (distinct < 2) throw Error(Errc::degenerate_histogram, "image has a single intensity");

    const double total = static_cast<double>(img.pixels.size());
    double sum_all = 0.0;
    for (int i = 0; i < 256; ++i) sum_all += i * hist[static_cast<std::size_t>(i)];

    // t splits [0, t) | [t, 255]
    double w0 = 0.0, sum0 = 0.0, best = -1.0;
    int first = 1, last = 1;
    bool in_plateau = false;
    for (int t = 1; t < 256; ++t) {
        w0 += hist[static_cast<std::size_t>(t - 1)];
        sum0 += (t - 1) * hist[static_cast<std::size_t>(t - 1)];
        const double w1 = total - w0;
        double var = 0.0;
        if (w0 > 0 && w1 > 0) {
            const double d = sum0 / w0 - (sum_all - sum0) / w1;
            var = w0 * w1 * d * d;
        }
        const double eps = 1e-12 * std::max(1.0, best);
        if (var > best + eps) {
            best = var;
            first = last = t;
            in_plateau = true;
        } else if (in_plateau && std::abs(var - best) <= eps) {
            last = t;
        } else {
            in_plateau = false;
        }
    }
    return (first + last) / 2;
}

inline BinaryImage binarize(const GrayImage& img) {
    const int t = otsu_threshold(img);
    BinaryImage out{img.width, img.height, std::vector<std::uint8_t>(img.pixels.size())};
    for (std::size_t i = 0; i < img.pixels.size(); ++i) out.bits[i] = img.pixels[i] < t ? 1 : 0;
    return out;
}

inline BinaryImage crop_to_content(const BinaryImage& img) {
    std::size_t x0 = img.width, y0 = img.height, x1 = 0, y1 = 0;
    bool any = false;
    for (std::size_t y = 0; y < img.height; ++y)
        for (std::size_t x = 0; x < img.width; ++x)
            if (img.at(x, y)) {
                any = true;
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
    if (!any) throw Error(Errc::empty_content, "image has no ink pixels");
    BinaryImage out{x1 - x0 + 1, y1 - y0 + 1, {}};
    out.bits.reserve(out.width * out.height);
    for (std::size_t y = y0; y <= y1; ++y)
        for (std::size_t x = x0; x <= x1; ++x) out.bits.push_back(img.at(x, y));
    return out;
}

/// Nearest-neighbor resample to side x side: src = floor(dst * extent / side).
inline BinaryImage resize_nearest(const BinaryImage& img, std::size_t side) {
    if (side == 0) throw Error(Errc::range, "resize side must be >= 1");
    BinaryImage out{side, side, std::vector<std::uint8_t>(side * side)};
    for (std::size_t y = 0; y < side; ++y) {
        const std::size_t sy = y * img.height / side;
        for (std::size_t x = 0; x < side; ++x) out.bits[y * side + x] = img.at(x * img.width / side, sy);
    }
    return out;
}

/// binarize -> crop -> resize, flattened to {0,1} reals.
inline std::vector<double> image_features(const GrayImage& img, std::size_t side) {
    const auto bin = resize_nearest(crop_to_content(binarize(img)), side);
    return {bin.bits.begin(), bin.bits.end()};
}

inline Dataset load_image_dir(const std::filesystem::path& root, std::size_t side = 32) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw Error(Errc::io, root.string() + " is not a directory");
    if (side == 0) throw Error(Errc::range, "image size must be >= 1");

    std::vector<fs::path> class_dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) class_dirs.push_back(entry.path());
    std::sort(class_dirs.begin(), class_dirs.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    if (class_dirs.empty()) throw Error(Errc::empty_input, root.string() + " has no class subdirectories");

    Dataset ds;
    ds.features = Matrix(0, side * side);
    std::vector<std::string> failures;
    Errc first_code = Errc::format;
    for (std::size_t c = 0; c < class_dirs.size(); ++c) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(class_dirs[c])) {
            if (!entry.is_regular_file()) continue;
            auto ext = entry.path().extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
            if (ext == ".pgm") files.push_back(entry.path());
        }
        if (files.empty())
            throw Error(Errc::empty_input, "class directory " + class_dirs[c].string() + " has no PGM images");
        std::sort(files.begin(), files.end());
        ds.label_names.push_back(class_dirs[c].filename().string());
        for (const auto& file : files) {
            try {
                const auto row = image_features(read_pgm(file), side);
                ds.features.append_row(row);
                ds.labels.push_back(static_cast<int>(c));
            } catch (const Error& e) {
                if (failures.empty()) first_code = e.code();
                failures.push_back(file.string() + ": " + e.what());
            }
        }
    }
    if (!failures.empty()) {
        std::string msg = std::to_string(failures.size()) + " image(s) failed:";
        for (const auto& f : failures) msg += "\n  " + f;
        throw Error(first_code, msg);
    }
    return ds;
}

/// Train/test partition. Stratified: round-half-up(train_fraction * count)
/// per class, chosen by a seeded shuffle; both parts keep source order.
inline std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw Error(Errc::config, "train_fraction must be in (0, 1)");
    if (ds.size() == 0) throw Error(Errc::empty_input, "cannot split an empty dataset");

    Rng rng(spec.seed);
    std::vector<std::size_t> train_idx, test_idx;
    auto take = [&](std::vector<std::size_t> pool, const std::string& what) {
        const auto n_train = static_cast<std::size_t>(
            std::floor(spec.train_fraction * static_cast<double>(pool.size()) + 0.5));
        if (n_train == 0 || n_train >= pool.size())
            throw Error(Errc::stratification, what + ": " + std::to_string(pool.size()) +
                                                  " samples give " + std::to_string(n_train) +
                                                  " train / " + std::to_string(pool.size() - n_train) + " test");
        rng.shuffle(pool);
        train_idx.insert(train_idx.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_train));
        test_idx.insert(test_idx.end(), pool.begin() + static_cast<std::ptrdiff_t>(n_train), pool.end());
    };

    if (spec.stratified) {
        std::vector<std::vector<std::size_t>> by_class(ds.classes());
        for (std::size_t i = 0; i < ds.size(); ++i) by_class[static_cast<std::size_t>(ds.labels[i])].push_back(i);
        for (std::size_t c = 0; c < by_class.size(); ++c) {
            if (by_class[c].size() < 2)
                throw Error(Errc::stratification, "class '" + ds.label_names[c] + "' has " +
                                                      std::to_string(by_class[c].size()) + " sample(s); need >= 2");
            take(std::move(by_class[c]), "class '" + ds.label_names[c] + "'");
        }
    } else {
        std::vector<std::size_t> all(ds.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        take(std::move(all), "dataset");
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {ds.subset(train_idx), ds.subset(test_idx)};
}

}  // namespace ecoc
