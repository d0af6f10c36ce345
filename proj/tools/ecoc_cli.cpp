// ecoc: command line front end for the ECOC toolkit.
//
// Exit codes: 0 ok, 2 config/validation, 3 data, 4 training failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ecoc/archive.hpp"
#include "ecoc/bench.hpp"
#include "ecoc/dataset.hpp"
#include "ecoc/ecoc.hpp"

namespace fs = std::filesystem;
using namespace ecoc;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
    std::optional<std::size_t> pca_k;
    std::optional<std::size_t> code_length;
    std::optional<std::string> pic;
    std::optional<double> svm_c;
    std::optional<double> svm_gamma;
    std::optional<std::size_t> image_size;
    std::optional<double> train_fraction;
    std::string format = "table";
    std::string out;
};

void add_experiment_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "JSON experiment config");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--runs", o.runs, "repetitions R");
    cmd->add_option("--pca-k", o.pca_k, "PCA components (0 disables PCA)");
    cmd->add_option("--code-length", o.code_length, "ECOC code length n");
    cmd->add_option("--pic", o.pic, "ECOC column classifier")->check(CLI::IsMember({"svm", "knn", "tree", "mlp"}));
    cmd->add_option("--svm-c", o.svm_c, "SVM penalty C");
    cmd->add_option("--svm-gamma", o.svm_gamma, "RBF gamma (default 1/d)");
    cmd->add_option("--image-size", o.image_size, "side of normalized images");
    cmd->add_option("--train-fraction", o.train_fraction, "train share of each split");
}

void add_output_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--format", o.format, "report format")->check(CLI::IsMember({"table", "csv", "json"}));
    cmd->add_option("--out", o.out, "output path (default stdout)");
}

void apply_learner_overrides(LearnerConfig& l, const Options& o) {
    if (l.kind != LearnerKind::svm) return;
    if (o.svm_c) l.svm_c = *o.svm_c;
    if (o.svm_gamma) l.svm_gamma = *o.svm_gamma;
}

/// Config file (or the desk32 defaults) with command-line flags on top.
ExperimentConfig build_config(const Options& o) {
    auto cfg = o.config.empty() ? desk32_config() : load_experiment_config(o.config);
    if (o.seed) cfg.master_seed = *o.seed;
    if (o.runs) cfg.runs = *o.runs;
    if (o.pca_k) cfg.pca_k = *o.pca_k == 0 ? std::nullopt : std::optional<std::size_t>(*o.pca_k);
    if (o.train_fraction) cfg.train_fraction = *o.train_fraction;
    if (o.image_size) {
        if (auto* im = std::get_if<ImageSource>(&cfg.source)) im->image_size = *o.image_size;
    }
    for (auto& m : cfg.methods) {
        if (m.kind == MethodKind::ecoc) {
            if (o.code_length) m.code_length = *o.code_length;
            if (o.pic) m.learner.kind = parse_learner_kind(*o.pic);
        }
        apply_learner_overrides(m.learner, o);
    }
    cfg.validate();
    return cfg;
}

Dataset load_data_path(const std::string& path, std::size_t image_size) {
    if (fs::is_directory(path)) return load_image_dir(path, image_size);
    return load_csv(path);
}

void write_text(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error(Errc::io, "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error(Errc::io, "failed writing '" + path + "'");
}

std::vector<std::size_t> parse_grid(const std::string& text) {
    std::vector<std::size_t> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size() || v < 0) throw std::invalid_argument(item);
            grid.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw Error(Errc::config, "grid entry '" + item + "' is not a non-negative integer");
        }
    }
    return grid;
}

std::size_t side_for(const Pipeline& p, const Options& o) {
    if (o.image_size) return *o.image_size;
    const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(p.input_dim))));
    if (side * side != p.input_dim) throw Error(Errc::config, "model input is not a square image; pass --image-size");
    return side;
}

/// Rows to classify plus their label names when the input carries labels.
FeatureRows load_inputs(const std::string& path, const Pipeline& p, const Options& o) {
    if (fs::is_directory(path)) {
        auto ds = load_image_dir(path, side_for(p, o));
        FeatureRows rows{std::move(ds.features), {}};
        for (int y : ds.labels) rows.labels.push_back(ds.label_names[static_cast<std::size_t>(y)]);
        return rows;
    }
    if (fs::path(path).extension() == ".pgm") {
        const auto x = image_features(read_pgm(path), side_for(p, o));
        FeatureRows rows{Matrix(0, x.size()), {}};
        rows.features.append_row(x);
        return rows;
    }
    return parse_feature_csv(detail::read_file(path), p.input_dim, path);
}

// ---------------------------------------------------------------------------

int cmd_train(const Options& o, const std::string& method, const std::string& data) {
    auto cfg = build_config(o);
    MethodConfig mc = MethodConfig::defaults(parse_method_kind(method));
    bool found = false;
    for (const auto& m : cfg.methods)
        if (m.name == method) {
            mc = m;
            found = true;
        }
    if (!found) {
        if (mc.kind == MethodKind::ecoc) {
            if (o.code_length) mc.code_length = *o.code_length;
            if (o.pic) mc.learner.kind = parse_learner_kind(*o.pic);
        }
        apply_learner_overrides(mc.learner, o);
    }
    Dataset ds = data.empty() ? load_source(cfg.source)
                              : load_data_path(data, o.image_size.value_or(32));
    const std::uint64_t seed = method_seed(cfg.master_seed, mc.name);
    Pipeline p;
    if (o.train_fraction) {
        auto [train, test] = split(ds, SplitSpec{cfg.train_fraction, cfg.stratified, cfg.master_seed});
        p = train_pipeline(mc, train, cfg.pca_k, seed);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < test.size(); ++i) correct += p.predict(test.row(i)) == test.labels[i];
        std::cerr << "held-out accuracy: " << format_fixed(100.0 * static_cast<double>(correct) / static_cast<double>(test.size()), 2)
                  << "% on " << test.size() << " rows\n";
    } else {
        p = train_pipeline(mc, ds, cfg.pca_k, seed);
    }
    const auto text = to_archive(p).dump() + "\n";
    write_text(text, o.out);
    return 0;
}

int cmd_predict(const Options& o, const std::string& model, const std::string& input) {
    const auto p = pipeline_from_archive(read_archive(model));
    const auto rows = load_inputs(input, p, o);
    std::string text;
    for (std::size_t i = 0; i < rows.features.rows(); ++i)
        text += p.label_names[static_cast<std::size_t>(p.predict(rows.features.row(i)))] + "\n";
    write_text(text, o.out);
    return 0;
}

int cmd_evaluate(const Options& o, const std::string& model, const std::string& input) {
    const auto p = pipeline_from_archive(read_archive(model));
    const auto rows = load_inputs(input, p, o);
    if (rows.labels.empty()) throw Error(Errc::format, input + " has no label column to evaluate against");
    const std::size_t m = p.label_names.size();
    std::vector<std::vector<std::size_t>> confusion(m, std::vector<std::size_t>(m, 0));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < rows.features.rows(); ++i) {
        const auto it = std::find(p.label_names.begin(), p.label_names.end(), rows.labels[i]);
        if (it == p.label_names.end()) throw Error(Errc::label, "row " + std::to_string(i + 1) + " has label '" + rows.labels[i] + "' unknown to the model");
        const auto truth = static_cast<std::size_t>(it - p.label_names.begin());
        const auto pred = static_cast<std::size_t>(p.predict(rows.features.row(i)));
        ++confusion[truth][pred];
        correct += truth == pred;
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(rows.features.rows());
    const auto fmt = parse_report_format(o.format);
    std::string text;
    if (fmt == ReportFormat::json) {
        text = Json{{"accuracy", acc}, {"rows", rows.features.rows()}, {"labels", p.label_names}, {"confusion", confusion}}.dump(2) + "\n";
    } else if (fmt == ReportFormat::csv) {
        text = "true,predicted,count\n";
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b)
                if (confusion[a][b]) text += p.label_names[a] + "," + p.label_names[b] + "," + std::to_string(confusion[a][b]) + "\n";
        text += "accuracy,," + format_exact(acc) + "\n";
    } else {
        text = "accuracy: " + format_fixed(100.0 * acc, 2) + "% (" + std::to_string(correct) + "/" +
               std::to_string(rows.features.rows()) + ")\nconfusion (rows = true, columns = predicted):\n";
        std::vector<std::vector<std::string>> cells{{""}};
        for (const auto& n : p.label_names) cells[0].push_back(n);
        for (std::size_t a = 0; a < m; ++a) {
            cells.push_back({p.label_names[a]});
            for (std::size_t b = 0; b < m; ++b) cells.back().push_back(std::to_string(confusion[a][b]));
        }
        text += detail::render_rows(cells);
    }
    write_text(text, o.out);
    return 0;
}

int cmd_benchmark(const Options& o) {
    const auto cfg = build_config(o);
    emit_report(run_experiment(cfg), parse_report_format(o.format), o.out);
    return 0;
}

int cmd_sweep(const Options& o, bool code, const std::string& grid_text) {
    auto cfg = build_config(o);
    if (code) {
        const auto grid = grid_text.empty() ? default_code_grid() : parse_grid(grid_text);
        emit_report(sweep_code_length(cfg, grid), parse_report_format(o.format), o.out);
    } else {
        const auto grid = grid_text.empty() ? default_feature_grid() : parse_grid(grid_text);
        emit_report(sweep_features(cfg, grid), parse_report_format(o.format), o.out);
    }
    return 0;
}

int cmd_synth(const Options& o, SyntheticSpec spec) {
    if (!o.config.empty()) {
        const auto cfg = load_experiment_config(o.config);
        const auto* s = std::get_if<SyntheticSpec>(&cfg.source);
        if (!s) throw Error(Errc::config, "config dataset is not synthetic");
        spec = *s;
    }
    if (o.seed) spec.seed = *o.seed;
    write_text(dataset_to_csv(generate_synthetic(spec)), o.out);
    return 0;
}

int cmd_code(const Options& o, std::size_t classes, const std::string& in, bool ova, const std::string& save) {
    CodingMatrix code;
    if (!in.empty()) code = code_from_archive(read_archive(in));
    else if (ova) code = one_vs_all_code(classes);
    else code = random_code(classes, o.code_length.value_or(150), o.seed.value_or(0));

    const auto violations = validate_code(code);
    const auto dmin = code.m >= 2 ? min_code_distance(code) : 0;
    std::vector<double> ps{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45};
    const auto fmt = parse_report_format(o.format);
    std::string text;
    if (fmt == ReportFormat::json) {
        Json bounds = Json::array();
        for (double p : ps) bounds.push_back({{"p", p}, {"bound", dmin ? correct_classification_bound(code.n, dmin, p) : 0.0}});
        Json v = Json::array();
        for (const auto& x : violations) v.push_back(x.message);
        text = Json{{"code", code_payload(code)}, {"min_distance", dmin}, {"correctable", dmin ? (dmin - 1) / 2 : 0},
                    {"violations", v}, {"bound_table", bounds}}.dump(2) + "\n";
    } else if (fmt == ReportFormat::csv) {
        text = "p,bound\n";
        for (double p : ps) text += format_exact(p) + "," + format_exact(dmin ? correct_classification_bound(code.n, dmin, p) : 0.0) + "\n";
    } else {
        text = "classes " + std::to_string(code.m) + ", length " + std::to_string(code.n) + "\n";
        const auto rows = code.row_strings();
        for (std::size_t i = 0; i < rows.size(); ++i) text += "  " + std::to_string(i) + "  " + rows[i] + "\n";
        text += "min distance " + std::to_string(dmin) + ", corrects up to " + std::to_string(dmin ? (dmin - 1) / 2 : 0) + " column errors\n";
        if (violations.empty()) text += "valid\n";
        for (const auto& x : violations) text += "violation: " + x.message + "\n";
        if (dmin) {
            std::vector<std::vector<std::string>> cells{{"column error p", "P(correct) >="}};
            for (double p : ps) cells.push_back({format_fixed(p, 2), format_fixed(correct_classification_bound(code.n, dmin, p), 6)});
            text += detail::render_rows(cells);
        }
    }
    write_text(text, o.out);
    if (!save.empty()) write_archive(to_archive(code), save);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Error-correcting output code classifiers and benchmarks"};
    app.require_subcommand(1);
    Options o;

    std::string method, data, model, input, grid;
    auto* train = app.add_subcommand("train", "fit one method and write a model archive");
    train->add_option("method", method, "svm, dt, knn, nn, bagging, boosting or ecoc")->required();
    train->add_option("data", data, "CSV file or image directory (default: the config's dataset)");
    add_experiment_flags(train, o);
    train->add_option("--out", o.out, "archive path (default stdout)");

    auto* predict = app.add_subcommand("predict", "label the rows of a CSV, a PGM image or an image directory");
    predict->add_option("model", model)->required();
    predict->add_option("input", input)->required();
    predict->add_option("--image-size", o.image_size, "side of normalized images");
    predict->add_option("--out", o.out, "output path (default stdout)");

    auto* evaluate = app.add_subcommand("evaluate", "accuracy and confusion matrix on labeled data");
    evaluate->add_option("model", model)->required();
    evaluate->add_option("data", input)->required();
    evaluate->add_option("--image-size", o.image_size, "side of normalized images");
    add_output_flags(evaluate, o);

    auto* bench = app.add_subcommand("benchmark", "run an experiment config and report mean ± stderr per method");
    add_experiment_flags(bench, o);
    add_output_flags(bench, o);

    auto* sweep_code = app.add_subcommand("sweep-code", "ECOC accuracy over code lengths");
    add_experiment_flags(sweep_code, o);
    add_output_flags(sweep_code, o);
    sweep_code->add_option("--grid", grid, "comma separated code lengths (default 10,30,70,150)");

    auto* sweep_feat = app.add_subcommand("sweep-features", "accuracy over PCA component counts");
    add_experiment_flags(sweep_feat, o);
    add_output_flags(sweep_feat, o);
    sweep_feat->add_option("--grid", grid, "comma separated component counts (default 10,15,20,25,30)");

    SyntheticSpec spec;
    auto* synth = app.add_subcommand("synth", "write a synthetic Gaussian-blob dataset as CSV");
    synth->add_option("--config", o.config, "take the spec from a config's synthetic dataset");
    synth->add_option("--seed", o.seed, "generator seed");
    synth->add_option("--classes", spec.classes);
    synth->add_option("--per-class", spec.per_class);
    synth->add_option("--dim", spec.dim);
    synth->add_option("--center-spread", spec.center_spread);
    synth->add_option("--noise-sigma", spec.noise_sigma);
    synth->add_option("--out", o.out, "output path (default stdout)");

    std::size_t classes = 32;
    std::string code_in, code_save;
    bool ova = false;
    auto* code = app.add_subcommand("code", "generate or inspect a coding matrix");
    code->add_option("--classes", classes, "number of classes m");
    code->add_option("--code-length", o.code_length, "code length n (default 150)");
    code->add_option("--seed", o.seed, "generator seed");
    code->add_flag("--one-vs-all", ova, "identity code instead of a random one");
    code->add_option("--in", code_in, "inspect a saved code archive");
    code->add_option("--save", code_save, "write the code as an archive");
    add_output_flags(code, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (train->parsed()) return cmd_train(o, method, data);
        if (predict->parsed()) return cmd_predict(o, model, input);
        if (evaluate->parsed()) return cmd_evaluate(o, model, input);
        if (bench->parsed()) return cmd_benchmark(o);
        if (sweep_code->parsed()) return cmd_sweep(o, true, grid);
        if (sweep_feat->parsed()) return cmd_sweep(o, false, grid);
        if (synth->parsed()) return cmd_synth(o, spec);
        if (code->parsed()) return cmd_code(o, classes, code_in, ova, code_save);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
