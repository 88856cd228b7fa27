#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "envxfer/corpus/split.hpp"
#include "envxfer/eval/architectures.hpp"
#include "envxfer/nn/train.hpp"

namespace envxfer::eval {

struct AutoencoderRun {
    nn::Model model;
    std::vector<nn::EpochStats> history;
    double test_mse = 0.0;
    corpus::Split split;
};

/// Reconstruction training on a seeded 80/20 split. Model selection uses the
/// training loss; the held-out 20% is only scored.
inline AutoencoderRun train_autoencoder(const std::vector<nn::Tensor>& inputs, const nn::TrainConfig& cfg,
                                        std::uint64_t split_seed, DecoderOutput out = DecoderOutput::sigmoid) {
    if (inputs.size() < 2) throw DataError("autoencoder: need at least 2 clips");
    AutoencoderRun run{make_autoencoder(cfg.seed, out, inputs.front().shape), {}, 0.0,
                       corpus::split(inputs.size(), 0.8, 0.1, split_seed)};
    nn::Dataset train, test;
    for (const auto* part : {&run.split.train, &run.split.val})
        for (std::size_t i : *part) {
            train.inputs.push_back(inputs[i]);
            train.targets.push_back(inputs[i]);
        }
    for (std::size_t i : run.split.test) {
        test.inputs.push_back(inputs[i]);
        test.targets.push_back(inputs[i]);
    }
    auto result = nn::train(run.model, train, {}, cfg, nn::LossKind::mse);
    run.model = std::move(result.model);
    run.history = std::move(result.history);
    run.test_mse = test.empty() ? 0.0 : nn::evaluate(run.model, test, nn::LossKind::mse).loss;
    return run;
}

/// Flattened encoder output (960 values).
inline std::vector<double> embed(const nn::Model& ae, const nn::Tensor& input) {
    if (ae.size() <= kEncoderLayers) throw UsageError("embed: model is not an autoencoder");
    const auto cache = nn::forward(ae, input);
    const auto& latent = cache.activations[kEncoderLayers].data;
    return {latent.begin(), latent.end()};
}

inline double embedding_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DataError("embedding distance: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

struct Preservation {
    double d_x_content = 0.0;
    double d_x_style = 0.0;
    double d_z_content = 0.0;
    double d_z_style = 0.0;
    double ratio_content = 0.0;  // NaN when d_z_content is zero
    double ratio_style = 0.0;    // NaN when d_z_style is zero
    bool flagged = false;        // a denominator was zero
};

/// Distances of the transfer output x and the mix z to the content and style
/// clips, from their embeddings.
inline Preservation preservation_ratios(const std::vector<double>& x, const std::vector<double>& xc,
                                        const std::vector<double>& xs, const std::vector<double>& z) {
    Preservation p;
    p.d_x_content = embedding_distance(x, xc);
    p.d_x_style = embedding_distance(x, xs);
    p.d_z_content = embedding_distance(z, xc);
    p.d_z_style = embedding_distance(z, xs);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    p.ratio_content = p.d_z_content > 0.0 ? p.d_x_content / p.d_z_content : nan;
    p.ratio_style = p.d_z_style > 0.0 ? p.d_x_style / p.d_z_style : nan;
    p.flagged = !(p.d_z_content > 0.0 && p.d_z_style > 0.0);
    return p;
}

}  // namespace envxfer::eval
