#pragma once

/*
 Bagging, resampling AdaBoost.M1, plurality voting and the analytic
 majority-vote error probability.
*/

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ecoc/core.hpp"
#include "ecoc/learner.hpp"

namespace ecoc {

using SampleWeights = std::vector<double>;

/// Throws unless weights are nonnegative and sum to 1 within 1e-9.
inline void check_weights(std::span<const double> w) {
    double s = 0.0;
    for (double x : w) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw Error(Errc::range, "sample weights must be finite and >= 0");
        s += x;
    }
    if (std::abs(s - 1.0) > 1e-9) throw Error(Errc::range, "sample weights sum to " + std::to_string(s) + ", not 1");
}

/// `count` draws with replacement, P(i) proportional to w_i (inverse CDF).
inline Dataset weighted_sample(const Dataset& ds, std::span<const double> w, std::size_t count, std::uint64_t seed) {
    if (ds.size() == 0) throw Error(Errc::empty_input, "cannot sample from an empty dataset");
    if (count == 0) throw Error(Errc::range, "sample count must be >= 1");
    if (count > ds.size()) throw Error(Errc::range, "sample count exceeds dataset size");
    if (w.size() != ds.size()) throw Error(Errc::shape, "weight vector length != dataset size");
    check_weights(w);

    std::vector<double> cumulative(w.size());
    std::partial_sum(w.begin(), w.end(), cumulative.begin());
    const double total = cumulative.back();
    Rng rng(seed);
    std::vector<std::size_t> picks(count);
    for (auto& p : picks) {
        const double u = rng.uniform() * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) --it;
        // skip trailing zero-weight entries that share the final cumulative value
        while (w[static_cast<std::size_t>(it - cumulative.begin())] == 0.0 && it != cumulative.begin()) --it;
        p = static_cast<std::size_t>(it - cumulative.begin());
    }
    return ds.subset(picks);
}

/// l draws with replacement from an l-row dataset; uniform weighted_sample.
inline Dataset bootstrap_sample(const Dataset& ds, std::uint64_t seed) {
    if (ds.size() == 0) throw Error(Errc::empty_input, "cannot bootstrap an empty dataset");
    const SampleWeights w(ds.size(), 1.0 / static_cast<double>(ds.size()));
    return weighted_sample(ds, w, ds.size(), seed);
}

/// Trains one ensemble member on a replicate.
using MemberTrainer = std::function<Classifier(const Dataset& replicate, std::uint64_t seed)>;

inline MemberTrainer learner_trainer(const LearnerConfig& cfg) {
    return [cfg](const Dataset& d, std::uint64_t seed) { return train_classifier(d, cfg, seed); };
}

namespace detail {
inline bool covers_all_classes(const Dataset& d) {
    for (auto c : d.class_counts())
        if (c == 0) return false;
    return true;
}

/// Plurality with lowest-index tie break.
inline int weighted_vote(std::span<const int> votes, std::span<const double> weights, std::size_t classes) {
    std::vector<double> tally(classes, 0.0);
    for (std::size_t k = 0; k < votes.size(); ++k) tally[static_cast<std::size_t>(votes[k])] += weights[k];
    return static_cast<int>(argmax_lowest(tally));
}
}  // namespace detail

// ---------------------------------------------------------------------------

struct BaggingModel {
    std::vector<Classifier> members;
    std::size_t classes = 0;
    // members whose replicate lacked a class and were trained on the full set
    std::vector<std::size_t> full_set_fallbacks;

    std::size_t k_count() const noexcept { return members.size(); }
};

/// Member k trains on bootstrap_sample(ds, seed ^ k).
inline BaggingModel bagging_train(const Dataset& ds, std::size_t k_count, const MemberTrainer& train,
                                  std::uint64_t seed) {
    if (ds.size() == 0) throw Error(Errc::empty_input, "cannot bag an empty dataset");
    if (k_count < 1) throw Error(Errc::config, "bagging needs K >= 1");
    BaggingModel model;
    model.classes = ds.classes();
    for (std::size_t k = 0; k < k_count; ++k) {
        const auto member_seed = seed ^ static_cast<std::uint64_t>(k);
        auto replicate = bootstrap_sample(ds, member_seed);
        if (!detail::covers_all_classes(replicate)) {
            model.full_set_fallbacks.push_back(k);
            model.members.push_back(train(ds, member_seed));
        } else {
            model.members.push_back(train(replicate, member_seed));
        }
    }
    return model;
}

inline BaggingModel bagging_train(const Dataset& ds, std::size_t k_count, const LearnerConfig& base, std::uint64_t seed) {
    return bagging_train(ds, k_count, learner_trainer(base), seed);
}

inline int bagging_vote(std::span<const int> votes, std::size_t classes) {
    const std::vector<double> ones(votes.size(), 1.0);
    return detail::weighted_vote(votes, ones, classes);
}

inline int predict(const BaggingModel& model, std::span<const double> x) {
    std::vector<int> votes;
    votes.reserve(model.members.size());
    for (const auto& m : model.members) votes.push_back(predict(m, x));
    return bagging_vote(votes, model.classes);
}

inline int bagging_predict(const BaggingModel& model, std::span<const double> x) { return predict(model, x); }

// ---------------------------------------------------------------------------

struct BoostModel {
    std::vector<Classifier> members;
    std::vector<double> member_weights;
    std::size_t classes = 0;
    std::size_t failed_rounds = 0;  // discarded resamples with error >= 0.5
};

struct BoostParams {
    std::size_t k_count = 10;
    double subsample_fraction = 0.75;
    std::size_t max_consecutive_failures = 5;
};

/// One AdaBoost.M1 reweighting step. Returns the member weight
/// 1/2 ln((1 - eps) / eps) with eps clamped to >= 1e-10.
inline double adaboost_reweight(std::vector<double>& w, const std::vector<bool>& wrong, double eps) {
    const double e = std::max(eps, 1e-10);
    const double alpha = 0.5 * std::log((1.0 - e) / e);
    const double up = std::exp(alpha), down = std::exp(-alpha);
    double z = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] *= wrong[i] ? up : down;
        z += w[i];
    }
    for (double& x : w) x /= z;
    return alpha;
}

inline int predict(const BoostModel& model, std::span<const double> x) {
    std::vector<int> votes;
    votes.reserve(model.members.size());
    for (const auto& m : model.members) votes.push_back(predict(m, x));
    return detail::weighted_vote(votes, model.member_weights, model.classes);
}

inline int adaboost_predict(const BoostModel& model, std::span<const double> x) { return predict(model, x); }

/// Optional per-round observer: (round, weights after update, member weight).
using BoostObserver = std::function<void(std::size_t, const std::vector<double>&, double)>;

/// AdaBoost.M1 by resampling. Each attempt draws from its own seed stream;
/// a replicate the learner rejects for missing classes counts as a failed
/// attempt, like one with weighted error >= 0.5.
inline BoostModel adaboost_train(const Dataset& ds, const BoostParams& params, const MemberTrainer& train,
                                 std::uint64_t seed, const BoostObserver& observe = {}) {
    const std::size_t l = ds.size();
    if (l == 0) throw Error(Errc::empty_input, "cannot boost on an empty dataset");
    if (params.k_count < 1) throw Error(Errc::config, "boosting needs K >= 1");
    if (!(params.subsample_fraction > 0.0 && params.subsample_fraction <= 1.0))
        throw Error(Errc::config, "subsample_fraction must be in (0, 1]");
    const auto sub = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(params.subsample_fraction * static_cast<double>(l) + 0.5)));

    BoostModel model;
    model.classes = ds.classes();
    std::vector<double> w(l, 1.0 / static_cast<double>(l));
    std::vector<bool> wrong(l);
    std::size_t attempt = 0, consecutive = 0;
    while (model.members.size() < params.k_count) {
        const std::uint64_t s = mix_seed(seed ^ mix_seed(attempt++));
        auto replicate = weighted_sample(ds, w, sub, s);
        bool ok = true;
        double eps = 1.0;
        std::optional<Classifier> member;
        try {
            member = train(replicate, s);
        } catch (const Error& e) {
            if (e.code() != Errc::label) throw;
            ok = false;
        }
        if (ok) {
            eps = 0.0;
            for (std::size_t i = 0; i < l; ++i) {
                wrong[i] = predict(*member, ds.row(i)) != ds.labels[i];
                if (wrong[i]) eps += w[i];
            }
            ok = eps < 0.5;
        }
        if (!ok) {
            ++model.failed_rounds;
            if (++consecutive >= params.max_consecutive_failures) {
                if (model.members.empty())
                    throw Error(Errc::boost_failure, "no round reached weighted error < 0.5 (0 rounds completed, " +
                                                         std::to_string(consecutive) + " consecutive failures)");
                break;
            }
            continue;
        }
        consecutive = 0;
        if (eps <= 1e-10) {
            model.members.push_back(std::move(*member));
            model.member_weights.push_back(0.5 * std::log((1.0 - 1e-10) / 1e-10));
            break;
        }
        const double alpha = adaboost_reweight(w, wrong, eps);
        model.members.push_back(std::move(*member));
        model.member_weights.push_back(alpha);
        if (observe) observe(model.members.size(), w, alpha);
    }
    return model;
}

inline BoostModel adaboost_train(const Dataset& ds, const BoostParams& params, const LearnerConfig& base,
                                 std::uint64_t seed) {
    return adaboost_train(ds, params, learner_trainer(base), seed);
}

// ---------------------------------------------------------------------------

/// C(n, k) as a double.
inline double binomial_coefficient(unsigned n, unsigned k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (unsigned i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

/// P(a strict majority of n independent members err), each with error p.
inline double majority_error_prob(unsigned n, double p) {
    if (n == 0 || n % 2 == 0) throw Error(Errc::range, "majority_error_prob needs an odd member count");
    if (!(p >= 0.0 && p < 0.5)) throw Error(Errc::range, "individual error must satisfy 0 <= p < 0.5");
    double s = 0.0;
    for (unsigned k = (n + 1) / 2; k <= n; ++k)
        s += binomial_coefficient(n, k) * std::pow(p, static_cast<double>(k)) *
             std::pow(1.0 - p, static_cast<double>(n - k));
    return s;
}

}  // namespace ecoc
