#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "envxfer/error.hpp"

namespace envxfer::audio {

inline constexpr int kCanonicalRate = 22050;
inline constexpr double kCanonicalSeconds = 4.0;

/// Mono sample sequence plus its sample rate.
class Waveform {
public:
    Waveform() = default;
    Waveform(std::vector<double> samples, int sample_rate)
        : samples_(std::move(samples)), rate_(sample_rate) {
        if (rate_ <= 0) throw DataError("waveform: sample rate must be positive");
    }

    std::span<const double> samples() const noexcept { return samples_; }
    const std::vector<double>& data() const noexcept { return samples_; }
    int sample_rate() const noexcept { return rate_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    double seconds() const noexcept { return rate_ > 0 ? double(samples_.size()) / rate_ : 0.0; }

    double peak() const noexcept {
        double p = 0.0;
        for (double s : samples_) p = std::max(p, std::abs(s));
        return p;
    }

    double rms() const noexcept {
        if (samples_.empty()) return 0.0;
        double acc = 0.0;
        for (double s : samples_) acc += s * s;
        return std::sqrt(acc / double(samples_.size()));
    }

    bool all_finite() const noexcept {
        return std::all_of(samples_.begin(), samples_.end(), [](double s) { return std::isfinite(s); });
    }

    friend bool operator==(const Waveform&, const Waveform&) = default;

private:
    std::vector<double> samples_;
    int rate_ = kCanonicalRate;
};

/// Scales so the absolute peak equals `target` when it currently exceeds it.
inline Waveform peak_limit(const Waveform& w, double target) {
    const double p = w.peak();
    if (p <= target || p == 0.0) return w;
    std::vector<double> out(w.data());
    const double g = target / p;
    // Clamp absorbs the rounding of p * (target / p), which can land one ulp above target.
    for (double& s : out) s = std::clamp(s * g, -target, target);
    return {std::move(out), w.sample_rate()};
}

}  // namespace envxfer::audio
