#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "envxfer/audio/waveform.hpp"
#include "envxfer/dsp/magnitude.hpp"
#include "envxfer/dsp/stft.hpp"
#include "envxfer/error.hpp"

namespace envxfer::dsp {

inline constexpr int kDefaultGriffinLimIterations = 100;

struct GriffinLimResult {
    audio::Waveform waveform;
    /// consistency[i] = || |stft(x_{i+1})| - m ||_F / ||m||_F
    std::vector<double> consistency;
    bool silent = false;
};

/// Relative Frobenius mismatch between a spectrogram's magnitude and a target.
inline double spectral_consistency(const Eigen::MatrixXcd& frames, const Eigen::MatrixXd& target) {
    const double denom = target.norm();
    if (denom == 0.0) return 0.0;
    return (frames.cwiseAbs() - target).norm() / denom;
}

/// Alternating projections between the target magnitude and the set of
/// consistent spectrograms. The first iterate uses uniform random phase drawn
/// from `seed`; the consistency trace is non-increasing.
inline GriffinLimResult griffin_lim(const MagnitudeGrid& m, const StftParams& p, int iterations, std::uint64_t seed,
                                    int sample_rate = audio::kCanonicalRate) {
    if (m.domain != MagnitudeDomain::linear) throw UsageError("griffin_lim: magnitude must be linear-domain");
    if (iterations < 1) throw UsageError("griffin_lim: iterations must be >= 1");
    if (std::size_t(m.values.rows()) != p.n_bins())
        throw DataError("griffin_lim: magnitude has " + std::to_string(m.values.rows()) + " bins, expected " +
                        std::to_string(p.n_bins()));
    if (!satisfies_cola(p)) throw UsageError("griffin_lim: stft parameters violate constant overlap-add");
    if ((m.values.array() < 0.0).any() || !m.values.allFinite())
        throw DataError("griffin_lim: magnitude must be finite and non-negative");

    const auto n_frames = std::size_t(m.values.cols());
    GriffinLimResult result;
    if (m.values.isZero(0.0)) {
        result.waveform = audio::Waveform(std::vector<double>(signal_length(n_frames, p), 0.0), sample_rate);
        result.consistency.assign(std::size_t(iterations), 0.0);
        result.silent = true;
        return result;
    }

    const Stft engine(p);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
    Eigen::MatrixXcd spec(m.values.rows(), m.values.cols());
    for (Eigen::Index t = 0; t < spec.cols(); ++t)
        for (Eigen::Index k = 0; k < spec.rows(); ++k) spec(k, t) = std::polar(m.values(k, t), phase_dist(rng));

    ComplexSpectrogram estimate;
    std::vector<double> x;
    result.consistency.reserve(std::size_t(iterations));
    for (int i = 0; i < iterations; ++i) {
        x = engine.synthesize(spec);
        engine.analyze(x, sample_rate, estimate);
        result.consistency.push_back(spectral_consistency(estimate.frames, m.values));
        if (i + 1 == iterations) break;
        for (Eigen::Index t = 0; t < spec.cols(); ++t) {
            for (Eigen::Index k = 0; k < spec.rows(); ++k) {
                const cplx e = estimate.frames(k, t);
                const double a = std::abs(e);
                spec(k, t) = a > 0.0 ? m.values(k, t) * (e / a) : cplx(m.values(k, t), 0.0);
            }
        }
    }
    result.waveform = audio::Waveform(std::move(x), sample_rate);
    return result;
}

}  // namespace envxfer::dsp
