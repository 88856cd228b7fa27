#pragma once

#include <string>
#include <vector>

#include "envxfer/eval/frontend.hpp"
#include "envxfer/nn/model.hpp"

namespace envxfer::eval {

inline constexpr std::size_t kClassifierFlatten = 6656;
inline constexpr std::size_t kLatentSize = 15 * 8 * 8;
inline constexpr double kDropoutRates[3] = {0.15, 0.2, 0.5};

inline std::vector<nn::LayerSpec> classifier_layers(std::size_t n_classes) {
    using nn::LayerSpec;
    return {LayerSpec::conv2d_valid(3, 32), LayerSpec::relu(),          LayerSpec::conv2d_valid(3, 32),
            LayerSpec::relu(),              LayerSpec::maxpool2(),      LayerSpec::dropout(kDropoutRates[0]),
            LayerSpec::conv2d_valid(3, 64), LayerSpec::relu(),          LayerSpec::conv2d_valid(3, 64),
            LayerSpec::relu(),              LayerSpec::maxpool2(),      LayerSpec::dropout(kDropoutRates[1]),
            LayerSpec::flatten(),           LayerSpec::dense(64),       LayerSpec::relu(),
            LayerSpec::dropout(kDropoutRates[2]), LayerSpec::dense(n_classes), LayerSpec::softmax()};
}

/// Index of the flatten layer in classifier_layers().
inline constexpr std::size_t kClassifierFlattenLayer = 12;

inline nn::Model make_classifier(std::size_t n_classes, std::uint64_t seed,
                                 const nn::Shape& input = {kClassifierRows, kClassifierCols, 1}) {
    if (n_classes < 2) throw UsageError("classifier: need at least 2 classes");
    nn::Model m(input, classifier_layers(n_classes), seed);
    const auto flat = m.shape_after(kClassifierFlattenLayer);
    if (nn::shape_size(flat) != kClassifierFlatten)
        throw UsageError("classifier: input " + nn::shape_string(input) + " flattens to " +
                         std::to_string(nn::shape_size(flat)) + " values, expected " +
                         std::to_string(kClassifierFlatten));
    return m;
}

enum class DecoderOutput { sigmoid, channel_softmax };

inline std::vector<nn::LayerSpec> autoencoder_layers(DecoderOutput out = DecoderOutput::sigmoid) {
    using nn::LayerSpec;
    return {LayerSpec::conv2d_same(3, 16), LayerSpec::relu(), LayerSpec::maxpool2(),
            LayerSpec::conv2d_same(3, 8),  LayerSpec::relu(), LayerSpec::maxpool2(),
            LayerSpec::conv2d_same(3, 8),  LayerSpec::relu(), LayerSpec::upsample2(),
            LayerSpec::conv2d_same(3, 16), LayerSpec::relu(), LayerSpec::upsample2(),
            LayerSpec::conv2d_same(3, 2),
            out == DecoderOutput::sigmoid ? LayerSpec::sigmoid() : LayerSpec::softmax()};
}

/// Number of layers in the encoder; the latent is the output of layer
/// kEncoderLayers - 1.
inline constexpr std::size_t kEncoderLayers = 6;

inline nn::Model make_autoencoder(std::uint64_t seed, DecoderOutput out = DecoderOutput::sigmoid,
                                  const nn::Shape& input = {kAutoencoderRows, kAutoencoderCols, 2}) {
    nn::Model m(input, autoencoder_layers(out), seed);
    if (nn::shape_size(m.shape_after(kEncoderLayers - 1)) != kLatentSize)
        throw UsageError("autoencoder: input " + nn::shape_string(input) + " gives latent " +
                         nn::shape_string(m.shape_after(kEncoderLayers - 1)) + ", expected (15x8x8)");
    if (m.output_shape() != input) throw UsageError("autoencoder: output shape differs from input shape");
    return m;
}

}  // namespace envxfer::eval
