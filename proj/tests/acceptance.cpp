// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "ecoc/bench.hpp"
#include "svm_oracle.hpp"

using namespace ecoc;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects failed checks; the first few are kept for the report line.
struct Checker {
    std::size_t checks = 0, failures = 0;
    std::vector<std::string> notes;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (ok) return;
        ++failures;
        if (notes.size() < 3) notes.push_back(what);
    }
    void near(double got, double want, double tol, const std::string& what) {
        expect(std::abs(got - want) <= tol, what + ": got " + format_exact(got) + ", want " + format_exact(want));
    }
    Outcome outcome(const std::string& summary) const {
        std::string d = summary;
        if (failures) {
            d += "; " + std::to_string(failures) + "/" + std::to_string(checks) + " checks failed";
            for (const auto& n : notes) d += "; " + n;
        }
        return {failures == 0, d};
    }
};

std::string pp(double fraction) { return format_fixed(100.0 * fraction, 2); }

// --- criterion 1 ---

Outcome majority_error() {
    Checker c;
    c.near(majority_error_prob(3, 0.1), 0.028, 1e-12, "q(3, 0.1)");
    c.near(majority_error_prob(5, 0.2), 0.05792, 1e-12, "q(5, 0.2)");
    std::mt19937_64 gen(20240101);
    const int trials = 100000;
    double worst = 0.0;
    for (unsigned n : {3u, 5u, 7u, 9u})
        for (double p : {0.1, 0.2, 0.3}) {
            std::bernoulli_distribution err(p);
            int majority_wrong = 0;
            for (int t = 0; t < trials; ++t) {
                unsigned wrong = 0;
                for (unsigned k = 0; k < n; ++k) wrong += err(gen) ? 1 : 0;
                majority_wrong += 2 * wrong > n ? 1 : 0;
            }
            const double q = majority_error_prob(n, p);
            const double se = std::sqrt(q * (1 - q) / trials);
            const double z = std::abs(majority_wrong / double(trials) - q) / se;
            worst = std::max(worst, z);
            c.expect(z <= 3.0, "n=" + std::to_string(n) + " p=" + format_exact(p) + " z=" + format_fixed(z, 2));
        }
    return c.outcome("q(3,0.1)=" + format_exact(majority_error_prob(3, 0.1)) + ", q(5,0.2)=" +
                     format_exact(majority_error_prob(5, 0.2)) + ", Monte Carlo max |z| " + format_fixed(worst, 2) + " over 12 cells");
}

// --- criterion 2 ---

Outcome bound() {
    Checker c;
    c.near(correct_classification_bound(10, 1, 0.1), 0.348678, 1e-6, "bound(10,1,0.1)");
    c.near(correct_classification_bound(10, 5, 0.1), 0.929809, 1e-6, "bound(10,5,0.1)");
    for (std::size_t n : {10u, 31u})
        for (double p : {0.01, 0.05, 0.1, 0.2, 0.3, 0.45})
            for (std::size_t d = 2; d <= n; ++d)
                c.expect(correct_classification_bound(n, d, p) >= correct_classification_bound(n, d - 1, p),
                         "monotone n=" + std::to_string(n) + " d=" + std::to_string(d));

    std::mt19937_64 gen(77);
    const int trials = 100000;
    double worst = 1e300;
    for (const auto& code : {random_code(8, 10, 1), random_code(8, 31, 2), random_code(32, 31, 3)}) {
        const auto dmin = min_code_distance(code);
        for (double p : {0.05, 0.1, 0.2, 0.3}) {
            std::bernoulli_distribution flip(p);
            std::uniform_int_distribution<std::size_t> pick(0, code.m - 1);
            std::vector<std::uint8_t> word(code.n);
            int correct = 0;
            for (int t = 0; t < trials; ++t) {
                const auto i = pick(gen);
                for (std::size_t j = 0; j < code.n; ++j) word[j] = static_cast<std::uint8_t>(code.at(i, j) ^ (flip(gen) ? 1 : 0));
                correct += decode_hard(code, word).label == static_cast<int>(i) ? 1 : 0;
            }
            const double rate = correct / double(trials);
            const double se = std::sqrt(std::max(rate * (1 - rate), 1e-12) / trials);
            const double b = correct_classification_bound(code.n, dmin, p);
            worst = std::min(worst, (rate - b) / se);
            c.expect(rate >= b - 3 * se, "m=" + std::to_string(code.m) + " n=" + std::to_string(code.n) + " p=" + format_exact(p) +
                                             " rate " + format_exact(rate) + " < bound " + format_exact(b));
        }
    }
    return c.outcome("bound(10,1,0.1)=" + format_fixed(correct_classification_bound(10, 1, 0.1), 6) + ", bound(10,5,0.1)=" +
                     format_fixed(correct_classification_bound(10, 5, 0.1), 6) +
                     ", simulated rate minus bound at least " + format_fixed(worst, 1) + " sigma");
}

// --- criterion 3 ---

Outcome news_code() {
    Checker c;
    const std::vector<std::string> names{"politics", "sports", "business", "arts"};
    const auto code = CodingMatrix::from_rows({"0110110001", "0001111100", "1010101101", "1000011010"}, true);
    std::vector<std::uint8_t> word;
    for (char ch : std::string("1010111101")) word.push_back(static_cast<std::uint8_t>(ch - '0'));
    const auto r = decode_hard(code, word);
    const std::string label = names.at(static_cast<std::size_t>(r.label));
    c.expect(label == "business", "decoded " + label);
    c.expect(r.distances[static_cast<std::size_t>(r.label)] == 1.0, "distance to winner");
    std::size_t brute = code.n;
    for (std::size_t a = 0; a < code.m; ++a)
        for (std::size_t b = 0; b < code.m; ++b) {
            if (a == b) continue;
            std::size_t d = 0;
            for (std::size_t j = 0; j < code.n; ++j) d += code.at(a, j) != code.at(b, j);
            brute = std::min(brute, d);
        }
    c.expect(min_code_distance(code) == 5 && brute == 5, "min distance " + std::to_string(min_code_distance(code)));
    return c.outcome("1010111101 -> " + label + " at distance " + format_exact(r.distances[static_cast<std::size_t>(r.label)]) +
                     ", min distance " + std::to_string(min_code_distance(code)) + " (brute force " + std::to_string(brute) + ")");
}

// --- criterion 4 ---

Outcome error_correction() {
    Checker c;
    std::size_t codes = 0, words = 0;
    for (std::size_t m = 2; m <= 8; ++m)
        for (std::size_t n = min_code_length(m); n <= 12; ++n) {
            if (m <= 4 && n > (std::size_t{1} << (m - 1)) - 1) continue;  // no valid random code exists
            for (std::uint64_t seed = 0; seed < 20; ++seed) {
                const auto code = random_code(m, n, seed);
                ++codes;
                const std::size_t t = (min_code_distance(code) - 1) / 2;
                std::vector<std::uint8_t> word(n);
                for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
                    if (static_cast<std::size_t>(std::popcount(mask)) > t) continue;
                    for (std::size_t i = 0; i < m; ++i) {
                        for (std::size_t j = 0; j < n; ++j) word[j] = static_cast<std::uint8_t>(code.at(i, j) ^ (mask >> j & 1u));
                        ++words;
                        if (decode_hard(code, word).label != static_cast<int>(i))
                            c.expect(false, "m=" + std::to_string(m) + " n=" + std::to_string(n) + " seed " + std::to_string(seed));
                    }
                }
            }
        }
    c.expect(words > 0, "nothing checked");
    return c.outcome(std::to_string(codes) + " codes, " + std::to_string(words) + " corrupted words, " +
                     std::to_string(c.failures) + " decoding failures");
}

// --- criterion 5 ---

BinaryLabeled relabel(const Dataset& ds, const std::function<bool(int)>& positive) {
    BinaryLabeled b{ds.features, std::vector<int>(ds.size())};
    for (std::size_t i = 0; i < ds.size(); ++i) b.labels[i] = positive(ds.labels[i]) ? 1 : -1;
    return b;
}

Outcome svm() {
    Checker c;
    SvmParams lin;
    lin.kernel = {KernelKind::linear, 1.0};
    lin.c = 10.0;
    BinaryLabeled two{Matrix(2, 1, std::vector<double>{-1, 1}), {-1, 1}};
    const auto m = svm_train(two, lin);
    c.expect(m.alphas.size() == 2, "two support vectors");
    if (m.alphas.size() == 2) {
        c.near(m.alphas[0], 0.5, 1e-6, "alpha_1");
        c.near(m.alphas[1], 0.5, 1e-6, "alpha_2");
    }
    c.near(m.bias, 0.0, 1e-6, "b");

    Rng rng(2024);
    double worst_gap = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        BinaryLabeled data{Matrix(0, 2), {}};
        for (std::size_t i = 0; i < 6; ++i) {
            data.features.append_row(std::vector<double>{rng.normal(), rng.normal()});
            data.labels.push_back(i % 2 ? 1 : -1);
        }
        SvmParams p;
        p.kernel = {KernelKind::rbf, 0.5 + rng.uniform()};
        p.c = trial % 2 ? 1.0 : 10.0;
        const GramMatrix g(data.features, p.kernel);
        const auto sol = smo_solve(g, data.labels, p);
        const double gap = std::abs(dual_objective(sol.alphas, data.labels, g) - oracle::dual_oracle(g, data.labels, p.c));
        worst_gap = std::max(worst_gap, gap);
        c.expect(gap <= 1e-6, "6-point trial " + std::to_string(trial) + " gap " + format_exact(gap));
        const auto t = svm_train(data, p);
        c.expect(kkt_audit(t, data, p.c).ok(p.tol), "KKT 6-point trial " + std::to_string(trial));
    }

    // every SVM trained for one desk32 split: one-vs-all and all 150 ECOC columns
    const auto cfg = desk32_config();
    const auto ds = load_source(cfg.source);
    auto [train, test] = split(ds, SplitSpec{cfg.train_fraction, cfg.stratified, cfg.master_seed});
    train = pca_transform(pca_fit(train, *cfg.pca_k), train);
    LearnerConfig learner;
    const auto p = learner.svm_params(train.dim());
    std::size_t audited = 0;
    double worst_kkt = 0.0;
    const auto audit = [&](const TrainedSvm& model, const BinaryLabeled& data, const std::string& what) {
        const auto rep = kkt_audit(model, data, p.c);
        worst_kkt = std::max(worst_kkt, rep.max_violation);
        ++audited;
        c.expect(rep.ok(p.tol), what + " violation " + format_exact(rep.max_violation));
    };
    const auto ova = one_vs_all_train(train, p);
    for (std::size_t k = 0; k < ova.classes(); ++k)
        audit(ova.models()[k], relabel(train, [k](int y) { return y == static_cast<int>(k); }), "one-vs-all " + std::to_string(k));
    const auto code = random_code(train.classes(), 150, 1);
    const auto ecoc = ecoc_train(train, code, learner, 1);
    for (std::size_t j = 0; j < code.n; ++j)
        audit(std::get<TrainedSvm>(ecoc.pics()[j]), relabel(train, [&](int y) { return code.at(static_cast<std::size_t>(y), j) == 1; }),
              "ecoc column " + std::to_string(j));

    return c.outcome("two-point alpha (" + format_fixed(m.alphas.at(0), 6) + ", " + format_fixed(m.alphas.at(1), 6) + "), b " +
                     format_fixed(m.bias, 6) + "; max dual gap " + format_exact(worst_gap) + " over 10 problems; " +
                     std::to_string(audited + 10) + " models audited, max KKT violation " + format_exact(worst_kkt));
}

// --- criterion 6 ---

Matrix random_orthonormal(std::size_t d, Rng& rng) {
    Matrix q(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<double> v(d);
        for (auto& x : v) x = rng.normal();
        for (std::size_t k = 0; k < i; ++k) {
            const double proj = dot(v, q.row(k));
            for (std::size_t j = 0; j < d; ++j) v[j] -= proj * q(k, j);
        }
        const double nrm = std::sqrt(dot(v, v));
        for (std::size_t j = 0; j < d; ++j) q(i, j) = v[j] / nrm;
    }
    return q;
}

Outcome pca() {
    Checker c;
    Dataset line;
    line.features = Matrix(4, 2, std::vector<double>{1, 1, 2, 2, 3, 3, 4, 4});
    line.labels = {0, 0, 0, 0};
    line.label_names = {"x"};
    const auto one = pca_fit(line, 1);
    c.near(one.components(0, 0), 1 / std::sqrt(2.0), 1e-8, "line component x");
    c.near(one.components(0, 1), 1 / std::sqrt(2.0), 1e-8, "line component y");

    Rng rng(6);
    double worst_trace = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 50, d = 7;
        Dataset ds;
        ds.features = Matrix(n, d);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) ds.features(i, j) = rng.normal() * static_cast<double>(j + 1);
        ds.labels.assign(n, 0);
        ds.label_names = {"x"};
        const auto model = pca_fit(ds, d);
        std::vector<double> mean(d, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) mean[j] += ds.features(i, j) / n;
        double trace = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) trace += (ds.features(i, j) - mean[j]) * (ds.features(i, j) - mean[j]) / (n - 1);
        for (double e : model.eigenvalues) sum += e;
        worst_trace = std::max(worst_trace, std::abs(sum - trace) / trace);
        c.expect(std::abs(sum - trace) <= 1e-6 * trace, "trace identity trial " + std::to_string(trial));
    }

    double worst_eig = 0.0;
    for (std::size_t d = 1; d <= 4; ++d)
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
                double plus = 0.0, minus = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    plus = std::max(plus, std::abs(r.vectors(k, j) - q(k, j)));
                    minus = std::max(minus, std::abs(r.vectors(k, j) + q(k, j)));
                }
                const double err = std::max(std::abs(r.values[k] - lambda[k]), std::min(plus, minus));
                worst_eig = std::max(worst_eig, err);
                c.expect(err <= 1e-8, "eigenpair d=" + std::to_string(d) + " trial " + std::to_string(trial));
            }
        }
    return c.outcome("line component (" + format_fixed(one.components(0, 0), 10) + ", " + format_fixed(one.components(0, 1), 10) +
                     "), max trace relative error " + format_exact(worst_trace) + ", max eigenpair error " + format_exact(worst_eig));
}

// --- criteria 7 to 10 ---

ExperimentConfig desk32_with(std::vector<MethodKind> kinds) {
    auto cfg = desk32_config();
    std::vector<MethodConfig> keep;
    for (auto k : kinds)
        for (const auto& m : cfg.methods)
            if (m.kind == k) keep.push_back(m);
    cfg.methods = keep;
    return cfg;
}

struct Trends {
    std::string table1, code_sweep, feature_sweep;  // JSON without timing
};

Outcome table1(const Dataset& ds, Trends& keep) {
    const auto cfg = desk32_with({MethodKind::svm, MethodKind::ecoc});
    const auto r = run_experiment(cfg, ds);
    keep.table1 = report_to_json(r, false).dump();
    const double ecoc = r.method("ecoc").mean, svm = r.method("svm").mean;
    const auto& e = r.method("ecoc");
    const auto& s = r.method("svm");
    return {ecoc >= svm - 0.005, "R=" + std::to_string(cfg.runs) + ", ecoc(svm, n=150) " + format_cell(100 * ecoc, 100 * e.standard_error) +
                                     " vs one-vs-all svm " + format_cell(100 * svm, 100 * s.standard_error) + ", margin " +
                                     format_fixed(100 * (ecoc - svm), 2) + " pp (needs >= -0.50)"};
}

Outcome code_sweep(const Dataset& ds, Trends& keep) {
    const auto cfg = desk32_with({MethodKind::ecoc});
    const auto s = sweep_code_length(cfg, {10, 30, 70, 150}, ds);
    keep.code_sweep = report_to_json(s, false).dump();
    const auto means = s.means("ecoc");
    bool shared = true;
    for (const auto& p : s.points) shared = shared && p.method("ecoc").seeds == s.points[0].method("ecoc").seeds;
    bool near_monotone = true;
    for (std::size_t i = 1; i < means.size(); ++i) near_monotone = near_monotone && means[i] >= means[i - 1] - 0.01;
    std::string series;
    for (std::size_t i = 0; i < means.size(); ++i) series += (i ? ", " : "") + std::to_string(s.grid[i]) + ":" + pp(means[i]);
    return {shared && near_monotone && means.back() >= means.front(),
            "ecoc mean % by n {" + series + "}; n=150 minus n=10 " + format_fixed(100 * (means.back() - means.front()), 2) +
                " pp; non-decreasing within 1 pp: " + (near_monotone ? "yes" : "no") + "; shared seeds: " + (shared ? "yes" : "no")};
}

Outcome feature_sweep(const Dataset& ds, Trends& keep) {
    const auto cfg = desk32_with({MethodKind::svm, MethodKind::ecoc});
    const auto s = sweep_features(cfg, default_feature_grid(), ds);
    keep.feature_sweep = report_to_json(s, false).dump();
    const double er = s.range("ecoc"), sr = s.range("svm");
    std::string series;
    for (std::size_t i = 0; i < s.grid.size(); ++i)
        series += (i ? ", " : "") + std::to_string(s.grid[i]) + ":" + pp(s.means("ecoc")[i]) + "/" + pp(s.means("svm")[i]);
    return {er <= sr, "mean % ecoc/svm by pca_k {" + series + "}; range ecoc " + format_fixed(100 * er, 2) + " pp vs svm " +
                          format_fixed(100 * sr, 2) + " pp"};
}

// --- criterion 11 ---

Outcome gradient_and_entropy() {
    Checker c;
    Rng rng(11);
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Dataset ds;
        ds.features = Matrix(0, 2);
        ds.label_names = {"a", "b"};
        for (int i = 0; i < 4; ++i) {
            ds.features.append_row(std::vector<double>{rng.uniform(-1, 1), rng.uniform(-1, 1)});
            ds.labels.push_back(i % 2);
        }
        auto m = mlp_init(2, 2, 2, seed);
        const auto analytic = mlp_flatten(mlp_gradient(m, ds));
        const auto theta = mlp_flatten(m);
        const double h = 1e-5;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            auto probe = theta;
            probe[i] = theta[i] + h;
            mlp_unflatten(m, probe);
            const double up = mlp_loss(m, ds);
            probe[i] = theta[i] - h;
            mlp_unflatten(m, probe);
            const double down = mlp_loss(m, ds);
            const double numeric = (up - down) / (2 * h);
            const double rel = std::abs(numeric - analytic[i]) / std::max({std::abs(numeric), std::abs(analytic[i]), 1e-3});
            worst = std::max(worst, rel);
            c.expect(rel <= 1e-6, "seed " + std::to_string(seed) + " parameter " + std::to_string(i));
        }
        mlp_unflatten(m, theta);
    }
    c.near(entropy({5, 5}), 1.0, 1e-6, "H[5,5]");
    c.near(entropy({3, 1}), 0.811278, 1e-6, "H[3,1]");
    return c.outcome("max relative gradient error " + format_exact(worst) + " over 20 random 2-2-2 nets; H[5,5]=" +
                     format_fixed(entropy({5, 5}), 6) + ", H[3,1]=" + format_fixed(entropy({3, 1}), 6));
}

// --- criterion 12 ---

Outcome image_path() {
    Checker c;
    const auto ds = load_image_dir(ECOC_MICRO_DIR, 32);
    c.expect(ds.size() == 10 && ds.classes() == 2 && ds.dim() == 32 * 32, "corpus shape");
    for (std::size_t i = 0; i < ds.size(); ++i) {
        bool binary = true, top = false, left = false;
        for (std::size_t j = 0; j < ds.dim(); ++j) {
            const double v = ds.row(i)[j];
            binary = binary && (v == 0.0 || v == 1.0);
            if (j < 32) top = top || v == 1.0;
            if (j % 32 == 0) left = left || v == 1.0;
        }
        c.expect(binary, "row " + std::to_string(i) + " not binary");
        c.expect(top && left, "row " + std::to_string(i) + " not cropped to ink");
    }
    std::vector<std::string> trained;
    for (auto kind : {MethodKind::svm, MethodKind::dt, MethodKind::knn, MethodKind::nn, MethodKind::bagging, MethodKind::boosting,
                      MethodKind::ecoc}) {
        try {
            const auto model = train_method(MethodConfig::defaults(kind), ds, 5);
            for (std::size_t i = 0; i < ds.size(); ++i) predict(model, ds.row(i));
            trained.push_back(to_string(kind));
        } catch (const Error& e) {
            c.expect(false, to_string(kind) + ": " + e.what());
        }
    }
    auto knn = MethodConfig::defaults(MethodKind::knn);
    knn.learner.knn_k = 1;
    const auto model = train_method(knn, ds, 0);
    std::size_t right = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) right += predict(model, ds.row(i)) == ds.labels[i];
    c.expect(right == ds.size(), "1-NN training accuracy");
    std::string names;
    for (const auto& t : trained) names += (names.empty() ? "" : ",") + t;
    return c.outcome(std::to_string(ds.size()) + " images -> " + std::to_string(ds.dim()) + " binary features; trained {" + names +
                     "}; 1-NN training accuracy " + std::to_string(right) + "/" + std::to_string(ds.size()));
}

}  // namespace

int main() {
    int failed = 0;
    const auto run = [&](int id, double limit_seconds, const std::function<Outcome()>& body) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::string timing = format_fixed(secs, 1) + " s";
        if (limit_seconds > 0) {
            timing += ", limit " + format_fixed(limit_seconds, 0) + " s";
            if (secs >= limit_seconds) {
                o.pass = false;
                o.detail += "; runtime over limit";
            }
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %d: %s [%s]\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), timing.c_str());
        std::fflush(stdout);
    };

    run(1, 10, majority_error);
    run(2, 30, bound);
    run(3, 0, news_code);
    run(4, 120, error_correction);
    run(5, 30, svm);
    run(6, 0, pca);

    const auto ds = load_source(desk32_config().source);
    Trends first, second;
    run(7, 300, [&] { return table1(ds, first); });
    run(8, 600, [&] { return code_sweep(ds, first); });
    run(9, 600, [&] { return feature_sweep(ds, first); });
    run(10, 0, [&] {
        table1(ds, second);
        code_sweep(ds, second);
        feature_sweep(ds, second);
        const bool same_t = !first.table1.empty() && first.table1 == second.table1;
        const bool same_c = !first.code_sweep.empty() && first.code_sweep == second.code_sweep;
        const bool same_f = !first.feature_sweep.empty() && first.feature_sweep == second.feature_sweep;
        return Outcome{same_t && same_c && same_f, std::string("rerun with master seed ") + std::to_string(desk32_config().master_seed) +
                                                       ": experiment " + (same_t ? "identical" : "DIFFERS") + ", code sweep " +
                                                       (same_c ? "identical" : "DIFFERS") + ", feature sweep " +
                                                       (same_f ? "identical" : "DIFFERS") + " (JSON reports without timing)"};
    });
    run(11, 0, gradient_and_entropy);
    run(12, 0, image_path);

    std::printf("%s: %d of 12 criteria failed\n", failed ? "FAIL" : "PASS", failed);
    return failed ? 1 : 0;
}
