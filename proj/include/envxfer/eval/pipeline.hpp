#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "envxfer/audio/standardize.hpp"
#include "envxfer/corpus/pairs.hpp"
#include "envxfer/corpus/synth.hpp"
#include "envxfer/eval/autoencoder.hpp"
#include "envxfer/eval/classify.hpp"
#include "envxfer/eval/frontend.hpp"
#include "envxfer/eval/report.hpp"
#include "envxfer/mixing/mix.hpp"
#include "envxfer/parallel.hpp"
#include "envxfer/transfer/sweep.hpp"

namespace envxfer::eval {

struct PipelineConfig {
    int sample_rate = audio::kCanonicalRate;
    double seconds = audio::kCanonicalSeconds;
    dsp::StftParams stft{};
    transfer::TransferConfig transfer{};
    double mix_gain_db = 0.0;
    nn::TrainConfig classifier{};
    nn::TrainConfig autoencoder{};
    std::size_t n_pairs = 50;
    std::uint64_t pair_seed = 0;
    std::uint64_t split_seed = 0;
    bool retrain = true;
    std::size_t workers = 0;
};

inline LabeledSet classifier_set(const std::vector<corpus::LabeledClip>& clips, const dsp::StftParams& p) {
    LabeledSet s;
    s.inputs.resize(clips.size());
    parallel_for(clips.size(), [&](std::size_t i) { s.inputs[i] = clip_to_classifier_input(clips[i].audio, p); });
    for (const auto& c : clips) {
        if (c.class_id < 0) throw DataError("classifier set: negative class id for '" + c.id + "'");
        s.labels.push_back(std::size_t(c.class_id));
        s.ids.push_back(c.id);
        s.n_classes = std::max(s.n_classes, std::size_t(c.class_id) + 1);
    }
    return s;
}

inline std::vector<nn::Tensor> autoencoder_inputs(const std::vector<corpus::LabeledClip>& clips,
                                                  const dsp::StftParams& p) {
    std::vector<nn::Tensor> out(clips.size());
    parallel_for(clips.size(), [&](std::size_t i) { out[i] = clip_to_autoencoder_input(clips[i].audio, p); });
    return out;
}

/// Cross-class (content clip, style clip) pairs with their labels and sources.
struct PairSet {
    std::vector<transfer::ClipPair> clips;
    std::vector<std::string> content_ids;
    std::vector<std::string> style_ids;
    std::vector<std::size_t> content_labels;
    std::vector<std::size_t> style_labels;

    std::size_t size() const noexcept { return clips.size(); }
};

/// Draws pairs among clips whose ids are not in `exclude`, standardized to
/// the configured rate and length.
inline PairSet draw_pairs(const std::vector<corpus::LabeledClip>& clips, std::size_t n, std::uint64_t seed, int rate,
                          double seconds, const std::set<std::string>& exclude = {}) {
    std::vector<corpus::Recording> fg, bg;
    for (const auto& c : clips) {
        if (exclude.count(c.id)) continue;
        auto r = corpus::as_recording(c);
        r.audio = audio::standardize(c.audio, rate, seconds);
        (c.role == corpus::Role::content ? fg : bg).push_back(std::move(r));
    }
    const std::size_t window = audio::standard_length(rate, seconds);
    PairSet s;
    for (const auto& p : corpus::make_pairs(fg, bg, n, seed, window)) {
        auto audio = corpus::cut_pair(p, fg, bg, window, rate, seconds);
        const auto& c = fg[p.content_index];
        const auto& st = bg[p.style_index];
        s.clips.push_back({"pair_" + std::to_string(s.size()), std::move(audio.content), std::move(audio.style)});
        s.content_ids.push_back(c.id);
        s.style_ids.push_back(st.id);
        s.content_labels.push_back(std::size_t(c.class_id));
        s.style_labels.push_back(std::size_t(st.class_id));
    }
    return s;
}

inline std::vector<audio::Waveform> mix_pairs(const PairSet& pairs, double gain_db) {
    std::vector<audio::Waveform> out;
    for (const auto& p : pairs.clips) out.push_back(mixing::mix(p.content, p.style, gain_db));
    return out;
}

/// Embedding-space preservation of each generated clip relative to its mix.
inline std::vector<Preservation> preservation_for(const nn::Model& ae, const PairSet& pairs,
                                                  const std::vector<audio::Waveform>& generated,
                                                  const std::vector<audio::Waveform>& mixed,
                                                  const dsp::StftParams& p) {
    if (generated.size() != pairs.size() || mixed.size() != pairs.size())
        throw UsageError("preservation: output count does not match pair count");
    std::vector<Preservation> out(pairs.size());
    auto e = [&](const audio::Waveform& w) { return embed(ae, clip_to_autoencoder_input(w, p)); };
    parallel_for(pairs.size(), [&](std::size_t i) {
        out[i] = preservation_ratios(e(generated[i]), e(pairs.clips[i].content), e(pairs.clips[i].style),
                                     e(mixed[i]));
    });
    return out;
}

struct EvaluationRun {
    EvalReport report;
    ClassifierRun classifier;
    AutoencoderRun autoencoder;
    std::optional<AugmentedRun> augmented;
    PairSet pairs;
    std::vector<transfer::SweepRecord> transfers;
};

/// Trains the base classifier and the autoencoder on the corpus, generates
/// transfer and mix outputs for pairs drawn outside the classifier's test
/// split, and scores both conditions.
inline EvaluationRun run_evaluation(const std::vector<corpus::LabeledClip>& clips, const PipelineConfig& cfg) {
    cfg.transfer.validate();
    std::vector<corpus::LabeledClip> std_clips = clips;
    for (auto& c : std_clips) c.audio = audio::standardize(c.audio, cfg.sample_rate, cfg.seconds);

    EvaluationRun run;
    const auto labeled = classifier_set(std_clips, cfg.stft);
    run.classifier = train_base_classifier(labeled, cfg.classifier, cfg.split_seed);
    run.autoencoder = train_autoencoder(autoencoder_inputs(std_clips, cfg.stft), cfg.autoencoder, cfg.split_seed);

    std::set<std::string> test_ids;
    for (std::size_t i : run.classifier.split.test) test_ids.insert(labeled.ids[i]);
    run.pairs = draw_pairs(std_clips, cfg.n_pairs, cfg.pair_seed, cfg.sample_rate, cfg.seconds, test_ids);

    run.transfers = transfer::alpha_sweep(run.pairs.clips, {cfg.transfer.alpha}, cfg.transfer, cfg.stft, cfg.workers);
    std::vector<audio::Waveform> generated;
    for (const auto& r : run.transfers) generated.push_back(r.result.generated);
    const auto mixed = mix_pairs(run.pairs, cfg.mix_gain_db);

    std::vector<nn::Tensor> xt, xm;
    for (std::size_t i = 0; i < run.pairs.size(); ++i) {
        xt.push_back(clip_to_classifier_input(generated[i], cfg.stft));
        xm.push_back(clip_to_classifier_input(mixed[i], cfg.stft));
    }
    const auto at = condition_accuracy(run.classifier.model, xt, run.pairs.content_labels, run.pairs.style_labels);
    const auto am = condition_accuracy(run.classifier.model, xm, run.pairs.content_labels, run.pairs.style_labels);
    const auto pres = preservation_for(run.autoencoder.model, run.pairs, generated, mixed, cfg.stft);

    auto& rep = run.report;
    rep.p0 = run.classifier.accuracy;
    rep.pt_content = at.content;
    rep.pt_style = at.style;
    rep.pm_content = am.content;
    rep.pm_style = am.style;
    for (std::size_t i = 0; i < run.pairs.size(); ++i)
        rep.pairs.push_back({run.pairs.clips[i].id, run.pairs.content_ids[i], run.pairs.style_ids[i],
                             run.pairs.content_labels[i], run.pairs.style_labels[i], cfg.transfer.alpha,
                             cfg.transfer.filter_width, at.predictions[i], am.predictions[i], pres[i]});

    if (cfg.retrain) {
        Augmentation aug;
        aug.inputs = xt;
        aug.labels = run.pairs.content_labels;
        for (std::size_t i = 0; i < run.pairs.size(); ++i)
            aug.sources.push_back({run.pairs.content_ids[i], run.pairs.style_ids[i]});
        run.augmented = retrain_with_augmentation(labeled, run.classifier, aug, cfg.classifier);
        rep.retrained = true;
        rep.p1 = run.augmented->run.accuracy;
        rep.value = run.augmented->value;
    }
    return run;
}

}  // namespace envxfer::eval
