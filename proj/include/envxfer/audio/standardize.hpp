#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "envxfer/audio/waveform.hpp"
#include "envxfer/error.hpp"

namespace envxfer::audio {

/// Linear-interpolation resampling; output length is round(len * target / source).
inline Waveform resample_linear(const Waveform& w, int target_rate) {
    if (w.empty()) throw DataError("resample: empty waveform");
    if (target_rate <= 0) throw UsageError("resample: target rate must be positive");
    if (target_rate == w.sample_rate()) return w;
    const auto in = w.samples();
    const double ratio = double(w.sample_rate()) / target_rate;
    const auto n_out = std::size_t(std::llround(double(in.size()) / ratio));
    std::vector<double> out(n_out, 0.0);
    for (std::size_t i = 0; i < n_out; ++i) {
        const double t = double(i) * ratio;
        const auto k = std::size_t(t);
        if (k + 1 >= in.size()) {
            out[i] = k < in.size() ? in[k] : in.back();
            continue;
        }
        const double frac = t - double(k);
        out[i] = in[k] + frac * (in[k + 1] - in[k]);
    }
    return {std::move(out), target_rate};
}

inline std::size_t standard_length(int target_rate, double target_seconds) {
    return std::size_t(std::llround(double(target_rate) * target_seconds));
}

/// Resamples, then zero-pads or truncates at the end to exactly
/// round(target_rate * target_seconds) samples.
inline Waveform standardize(const Waveform& w, int target_rate = kCanonicalRate,
                            double target_seconds = kCanonicalSeconds) {
    if (target_rate <= 0 || !(target_seconds > 0.0))
        throw UsageError("standardize: target rate and duration must be positive");
    if (w.empty()) throw DataError("standardize: empty waveform");
    auto resampled = resample_linear(w, target_rate);
    std::vector<double> out(resampled.data());
    out.resize(standard_length(target_rate, target_seconds), 0.0);
    return {std::move(out), target_rate};
}

/// Cuts `length` samples starting at `offset`, zero-padding past the end.
inline Waveform window(const Waveform& w, std::size_t offset, std::size_t length) {
    std::vector<double> out(length, 0.0);
    const auto in = w.samples();
    for (std::size_t i = 0; i < length && offset + i < in.size(); ++i) out[i] = in[offset + i];
    return {std::move(out), w.sample_rate()};
}

}  // namespace envxfer::audio
