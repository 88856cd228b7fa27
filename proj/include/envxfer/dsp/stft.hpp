#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "envxfer/audio/waveform.hpp"
#include "envxfer/dsp/fft.hpp"
#include "envxfer/error.hpp"

namespace envxfer::dsp {

enum class WindowKind { hann, rectangular };

inline std::string to_string(WindowKind k) { return k == WindowKind::hann ? "hann" : "rectangular"; }

inline WindowKind window_from_string(const std::string& s) {
    if (s == "hann") return WindowKind::hann;
    if (s == "rectangular") return WindowKind::rectangular;
    throw UsageError("unknown window '" + s + "'");
}

struct StftParams {
    std::size_t window_size = 1024;
    std::size_t hop = 256;
    WindowKind window = WindowKind::hann;

    std::size_t n_bins() const noexcept { return window_size / 2 + 1; }
    friend bool operator==(const StftParams&, const StftParams&) = default;
};

/// Periodic window of the requested kind.
inline std::vector<double> make_window(const StftParams& p) {
    std::vector<double> w(p.window_size, 1.0);
    if (p.window == WindowKind::hann) {
        for (std::size_t n = 0; n < p.window_size; ++n)
            w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(n) / double(p.window_size));
    }
    return w;
}

/// True when the squared window overlap-adds to a constant at this hop, which
/// is the condition for exact weighted overlap-add resynthesis.
inline bool satisfies_cola(const StftParams& p) {
    if (p.hop == 0 || p.hop > p.window_size || p.window_size % p.hop != 0) return false;
    const auto w = make_window(p);
    double lo = INFINITY, hi = 0.0;
    for (std::size_t n = 0; n < p.hop; ++n) {
        double acc = 0.0;
        for (std::size_t k = n; k < p.window_size; k += p.hop) acc += w[k] * w[k];
        lo = std::min(lo, acc);
        hi = std::max(hi, acc);
    }
    return lo > 0.0 && (hi - lo) <= 1e-10 * hi;
}

inline void validate(const StftParams& p) {
    if (!is_power_of_two(p.window_size))
        throw UsageError("stft: window size " + std::to_string(p.window_size) + " is not a power of two");
    if (p.hop == 0 || p.hop > p.window_size)
        throw UsageError("stft: hop must satisfy 0 < hop <= window size");
}

/// n_bins x n_frames complex matrix; column t is the windowed DFT of frame t.
struct ComplexSpectrogram {
    Eigen::MatrixXcd frames;
    StftParams params;
    int sample_rate = audio::kCanonicalRate;

    std::size_t n_bins() const noexcept { return std::size_t(frames.rows()); }
    std::size_t n_frames() const noexcept { return std::size_t(frames.cols()); }
};

inline std::size_t frame_count(std::size_t n_samples, const StftParams& p) {
    return n_samples < p.window_size ? 0 : 1 + (n_samples - p.window_size) / p.hop;
}

inline std::size_t signal_length(std::size_t n_frames, const StftParams& p) {
    return n_frames == 0 ? 0 : (n_frames - 1) * p.hop + p.window_size;
}

/// Reusable analysis/synthesis engine; holds the FFT plan and window.
class Stft {
public:
    explicit Stft(const StftParams& p) : params_(p), fft_((validate(p), p.window_size)), window_(make_window(p)) {}

    const StftParams& params() const noexcept { return params_; }
    const std::vector<double>& window() const noexcept { return window_; }

    void analyze(std::span<const double> x, int rate, ComplexSpectrogram& out) const {
        const std::size_t n = params_.window_size;
        if (x.size() < n)
            throw DataError("stft: waveform of " + std::to_string(x.size()) + " samples is shorter than one window (" +
                            std::to_string(n) + ")");
        const std::size_t frames = frame_count(x.size(), params_);
        out.params = params_;
        out.sample_rate = rate;
        out.frames.resize(Eigen::Index(params_.n_bins()), Eigen::Index(frames));
        buffer_.resize(n);
        for (std::size_t t = 0; t < frames; ++t) {
            const double* seg = x.data() + t * params_.hop;
            for (std::size_t i = 0; i < n; ++i) buffer_[i] = cplx(seg[i] * window_[i], 0.0);
            fft_.forward(buffer_);
            for (std::size_t k = 0; k < params_.n_bins(); ++k) out.frames(Eigen::Index(k), Eigen::Index(t)) = buffer_[k];
        }
    }

    /// Least-squares weighted overlap-add: x[n] = sum_t w f_t / sum_t w^2.
    std::vector<double> synthesize(const Eigen::MatrixXcd& frames) const {
        const std::size_t n = params_.window_size;
        const std::size_t n_frames = std::size_t(frames.cols());
        std::vector<double> out(signal_length(n_frames, params_), 0.0);
        std::vector<double> norm(out.size(), 0.0);
        buffer_.resize(n);
        for (std::size_t t = 0; t < n_frames; ++t) {
            const std::size_t bins = params_.n_bins();
            for (std::size_t k = 0; k < bins; ++k) buffer_[k] = frames(Eigen::Index(k), Eigen::Index(t));
            // Real signal: rebuild the negative frequencies by conjugate symmetry.
            buffer_[0] = cplx(buffer_[0].real(), 0.0);
            buffer_[n / 2] = cplx(buffer_[n / 2].real(), 0.0);
            for (std::size_t k = 1; k < n / 2; ++k) buffer_[n - k] = std::conj(buffer_[k]);
            fft_.inverse(buffer_);
            const std::size_t base = t * params_.hop;
            for (std::size_t i = 0; i < n; ++i) {
                out[base + i] += window_[i] * buffer_[i].real() / double(n);
                norm[base + i] += window_[i] * window_[i];
            }
        }
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = norm[i] > 1e-10 ? out[i] / norm[i] : 0.0;
        return out;
    }

private:
    StftParams params_;
    Fft fft_;
    std::vector<double> window_;
    mutable std::vector<cplx> buffer_;
};

inline ComplexSpectrogram stft(const audio::Waveform& w, const StftParams& p) {
    ComplexSpectrogram s;
    Stft(p).analyze(w.samples(), w.sample_rate(), s);
    return s;
}

inline audio::Waveform istft(const ComplexSpectrogram& s) {
    if (!satisfies_cola(s.params))
        throw UsageError("istft: window " + to_string(s.params.window) + "/" + std::to_string(s.params.window_size) +
                         " at hop " + std::to_string(s.params.hop) + " violates constant overlap-add");
    if (std::size_t(s.frames.rows()) != s.params.n_bins())
        throw DataError("istft: spectrogram has " + std::to_string(s.frames.rows()) + " bins, expected " +
                        std::to_string(s.params.n_bins()));
    return {Stft(s.params).synthesize(s.frames), s.sample_rate};
}

}  // namespace envxfer::dsp
