#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "envxfer/audio/waveform.hpp"
#include "envxfer/error.hpp"

namespace envxfer::mixing {

inline constexpr double kMixPeak = 0.95;

struct MixResult {
    audio::Waveform waveform;
    bool content_silent = false;
    bool style_silent = false;
    bool peak_limited = false;

    bool silent() const noexcept { return content_silent && style_silent; }
};

/// Overlays style onto content. Both are brought to a shared RMS (the mean of
/// the non-silent input levels), style is offset by `style_gain_db`, and the
/// sum is scaled down to kMixPeak if it would exceed it.
inline MixResult mix_flagged(const audio::Waveform& content, const audio::Waveform& style, double style_gain_db = 0.0) {
    if (content.sample_rate() != style.sample_rate())
        throw DataError("mix: sample rates differ (" + std::to_string(content.sample_rate()) + " vs " +
                        std::to_string(style.sample_rate()) + ")");
    if (content.size() != style.size())
        throw DataError("mix: lengths differ (" + std::to_string(content.size()) + " vs " +
                        std::to_string(style.size()) + "); standardize first");
    if (!std::isfinite(style_gain_db)) throw UsageError("mix: style gain must be finite");
    if (!content.all_finite() || !style.all_finite()) throw DataError("mix: non-finite input sample");

    MixResult r;
    const double rc = content.rms(), rs = style.rms();
    r.content_silent = rc == 0.0;
    r.style_silent = rs == 0.0;
    if (r.silent()) {
        r.waveform = audio::Waveform(std::vector<double>(content.size(), 0.0), content.sample_rate());
        return r;
    }
    const double target = r.content_silent ? rs : r.style_silent ? rc : 0.5 * (rc + rs);
    const double gc = r.content_silent ? 0.0 : target / rc;
    const double gs = r.style_silent ? 0.0 : target / rs * std::pow(10.0, style_gain_db / 20.0);

    // Scale into separate buffers before summing so a fused multiply-add
    // cannot make the result depend on argument order.
    std::vector<double> out(content.size()), scaled(style.size());
    const auto c = content.samples(), s = style.samples();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = gc * c[i];
    for (std::size_t i = 0; i < out.size(); ++i) scaled[i] = gs * s[i];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += scaled[i];
    audio::Waveform sum(std::move(out), content.sample_rate());
    r.peak_limited = sum.peak() > kMixPeak;
    r.waveform = audio::peak_limit(sum, kMixPeak);
    return r;
}

inline audio::Waveform mix(const audio::Waveform& content, const audio::Waveform& style, double style_gain_db = 0.0) {
    return mix_flagged(content, style, style_gain_db).waveform;
}

}  // namespace envxfer::mixing
