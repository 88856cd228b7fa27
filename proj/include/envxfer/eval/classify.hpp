#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "envxfer/corpus/split.hpp"
#include "envxfer/eval/architectures.hpp"
#include "envxfer/nn/train.hpp"

namespace envxfer::eval {

/// Classifier inputs with labels and the corpus clip id each came from.
struct LabeledSet {
    std::vector<nn::Tensor> inputs;
    std::vector<std::size_t> labels;
    std::vector<std::string> ids;
    std::size_t n_classes = 0;

    std::size_t size() const noexcept { return inputs.size(); }
};

struct ClassifierRun {
    nn::Model model;
    double accuracy = 0.0;  // held-out test accuracy
    std::vector<nn::EpochStats> history;
    int best_epoch = 0;
    corpus::Split split;
};

inline constexpr std::size_t kMinClipsPerClass = 10;

namespace detail {

inline nn::Dataset subset(const LabeledSet& s, const std::vector<std::size_t>& idx) {
    nn::Dataset d;
    for (std::size_t i : idx) {
        d.inputs.push_back(s.inputs[i]);
        d.labels.push_back(s.labels[i]);
    }
    return d;
}

inline void check_labeled(const LabeledSet& s) {
    if (s.labels.size() != s.size() || s.ids.size() != s.size())
        throw DataError("classifier: labels or ids do not match inputs");
    if (s.n_classes < 2) throw DataError("classifier: need at least 2 classes");
    std::map<std::size_t, std::size_t> counts;
    for (std::size_t l : s.labels) {
        if (l >= s.n_classes) throw DataError("classifier: label " + std::to_string(l) + " out of range");
        ++counts[l];
    }
    if (counts.size() < 2) throw DataError("classifier: data covers fewer than 2 classes");
    for (const auto& [label, n] : counts)
        if (n < kMinClipsPerClass)
            throw DataError("classifier: class " + std::to_string(label) + " has " + std::to_string(n) +
                            " clips, need at least " + std::to_string(kMinClipsPerClass));
}

}  // namespace detail

/// Seeded 80/20 train/test split with 10% of the training part held out for
/// model selection. `cfg.seed` drives initialisation, shuffling and dropout.
inline ClassifierRun train_base_classifier(const LabeledSet& s, const nn::TrainConfig& cfg, std::uint64_t split_seed) {
    detail::check_labeled(s);
    ClassifierRun run{make_classifier(s.n_classes, cfg.seed, s.inputs.front().shape), 0.0, {}, 0,
                      corpus::split(s.size(), 0.8, 0.1, split_seed)};
    auto result = nn::train(run.model, detail::subset(s, run.split.train), detail::subset(s, run.split.val), cfg,
                            nn::LossKind::cross_entropy);
    run.model = std::move(result.model);
    run.history = std::move(result.history);
    run.best_epoch = result.best_epoch;
    run.accuracy = nn::evaluate(run.model, detail::subset(s, run.split.test), nn::LossKind::cross_entropy).accuracy;
    return run;
}

/// Generated clips labelled with their content class; `sources` lists the
/// corpus clip ids each one was derived from.
struct Augmentation {
    std::vector<nn::Tensor> inputs;
    std::vector<std::size_t> labels;
    std::vector<std::vector<std::string>> sources;

    std::size_t size() const noexcept { return inputs.size(); }
};

struct AugmentedRun {
    ClassifierRun run;
    double base_accuracy = 0.0;
    double value = 0.0;  // run.accuracy - base_accuracy
};

/// Retrains from scratch on the base training part plus `aug`, with the same
/// validation and test parts and the same seeds as `base`.
inline AugmentedRun retrain_with_augmentation(const LabeledSet& s, const ClassifierRun& base, const Augmentation& aug,
                                              const nn::TrainConfig& cfg) {
    detail::check_labeled(s);
    if (aug.labels.size() != aug.size() || aug.sources.size() != aug.size())
        throw DataError("augmentation: labels or sources do not match inputs");
    std::set<std::string> test_ids;
    for (std::size_t i : base.split.test) test_ids.insert(s.ids[i]);
    for (std::size_t i = 0; i < aug.size(); ++i) {
        if (aug.labels[i] >= s.n_classes) throw DataError("augmentation: label out of range");
        for (const auto& src : aug.sources[i])
            if (test_ids.count(src))
                throw DataError("augmentation: generated clip " + std::to_string(i) + " derives from test clip '" +
                                src + "'");
    }

    auto train = detail::subset(s, base.split.train);
    train.inputs.insert(train.inputs.end(), aug.inputs.begin(), aug.inputs.end());
    train.labels.insert(train.labels.end(), aug.labels.begin(), aug.labels.end());

    AugmentedRun out;
    out.run.split = base.split;
    auto result = nn::train(make_classifier(s.n_classes, cfg.seed, s.inputs.front().shape), train,
                            detail::subset(s, base.split.val), cfg, nn::LossKind::cross_entropy);
    out.run.model = std::move(result.model);
    out.run.history = std::move(result.history);
    out.run.best_epoch = result.best_epoch;
    out.run.accuracy =
        nn::evaluate(out.run.model, detail::subset(s, base.split.test), nn::LossKind::cross_entropy).accuracy;
    out.base_accuracy = base.accuracy;
    out.value = out.run.accuracy - out.base_accuracy;
    return out;
}

struct ConditionAccuracy {
    double content = 0.0;
    double style = 0.0;
    std::vector<std::size_t> predictions;
};

/// Fraction of clips predicted as their content class, and as their style
/// class, from one forward pass per clip.
inline ConditionAccuracy condition_accuracy(const nn::Model& model, const std::vector<nn::Tensor>& inputs,
                                            const std::vector<std::size_t>& content_labels,
                                            const std::vector<std::size_t>& style_labels) {
    if (inputs.empty()) throw DataError("condition accuracy: empty set");
    if (content_labels.size() != inputs.size() || style_labels.size() != inputs.size())
        throw DataError("condition accuracy: labels do not match inputs");
    ConditionAccuracy a;
    std::size_t hc = 0, hs = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const std::size_t p = nn::argmax(nn::predict(model, inputs[i]));
        a.predictions.push_back(p);
        hc += p == content_labels[i];
        hs += p == style_labels[i];
    }
    a.content = double(hc) / double(inputs.size());
    a.style = double(hs) / double(inputs.size());
    return a;
}

}  // namespace envxfer::eval
