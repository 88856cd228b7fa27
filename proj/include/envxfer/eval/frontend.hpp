#pragma once

#include "envxfer/audio/waveform.hpp"
#include "envxfer/dsp/magnitude.hpp"
#include "envxfer/dsp/stft.hpp"
#include "envxfer/nn/tensor.hpp"

namespace envxfer::eval {

inline constexpr std::size_t kClassifierRows = 64, kClassifierCols = 44;
inline constexpr std::size_t kAutoencoderRows = 60, kAutoencoderCols = 32;

/// Log-magnitude spectrogram resized to 64x44 (frequency x time), scaled to [0, 1].
inline nn::Tensor clip_to_classifier_input(const audio::Waveform& w, const dsp::StftParams& p = {}) {
    auto g = dsp::resize_grid(dsp::log_magnitude(dsp::stft(w, p)), kClassifierRows, kClassifierCols);
    return g.reshaped({kClassifierRows, kClassifierCols, 1});
}

/// Channel 0: log-magnitude at 60x32 scaled to [0, 1]. Channel 1: its
/// difference along time (last column zero), scaled to [0, 1].
inline nn::Tensor clip_to_autoencoder_input(const audio::Waveform& w, const dsp::StftParams& p = {}) {
    const auto g = dsp::resize_grid(dsp::log_magnitude(dsp::stft(w, p)), kAutoencoderRows, kAutoencoderCols);
    std::vector<double> delta(g.size(), 0.0);
    for (std::size_t r = 0; r < kAutoencoderRows; ++r)
        for (std::size_t c = 0; c + 1 < kAutoencoderCols; ++c)
            delta[r * kAutoencoderCols + c] = g.data[r * kAutoencoderCols + c + 1] - g.data[r * kAutoencoderCols + c];
    dsp::normalize_unit_range(delta);
    nn::Tensor out({kAutoencoderRows, kAutoencoderCols, 2});
    for (std::size_t i = 0; i < g.size(); ++i) {
        out.data[2 * i] = g.data[i];
        out.data[2 * i + 1] = delta[i];
    }
    return out;
}

}  // namespace envxfer::eval
