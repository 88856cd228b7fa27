#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "envxfer/audio/standardize.hpp"
#include "envxfer/audio/wav.hpp"
#include "envxfer/corpus/recording.hpp"
#include "envxfer/csv.hpp"
#include "envxfer/error.hpp"

namespace envxfer::corpus {

enum class Role { content, style };

inline const char* to_string(Role r) { return r == Role::content ? "content" : "style"; }

inline Role role_from_string(const std::string& s) {
    if (s == "content") return Role::content;
    if (s == "style") return Role::style;
    throw DataError("unknown role '" + s + "'");
}

struct SynthConfig {
    int content_classes = 2;
    int style_classes = 2;
    int clips_per_class = 50;
    int sample_rate = audio::kCanonicalRate;
    double seconds = audio::kCanonicalSeconds;
    std::uint64_t seed = 0;

    void validate() const {
        if (content_classes < 2 || style_classes < 2)
            throw UsageError("synth corpus: need at least 2 content and 2 style classes");
        if (content_classes > 4 || style_classes > 4)
            throw UsageError("synth corpus: at most 4 content and 4 style classes");
        if (clips_per_class < 1) throw UsageError("synth corpus: clips_per_class must be positive");
        if (sample_rate < 8000) throw UsageError("synth corpus: sample rate must be at least 8000");
        if (!(seconds > 0.0)) throw UsageError("synth corpus: duration must be positive");
    }
};

/// Nominal generator parameters; per-clip values are jittered around these.
struct PulseClass {
    double f0;
    double rate_hz;
};
struct TextureClass {
    double center_hz;
};

inline PulseClass pulse_class(int k) {
    static constexpr PulseClass t[] = {{200, 2.0}, {560, 5.0}, {340, 3.2}, {900, 7.5}};
    return t[k];
}
inline TextureClass texture_class(int k) {
    static constexpr TextureClass t[] = {{300}, {1800}, {700}, {3000}};
    return t[k];
}

struct LabeledClip {
    std::string id;
    int class_id = 0;
    std::string class_name;
    Role role = Role::content;
    audio::Waveform audio;
};

namespace detail {

// Two cascaded RBJ band-pass biquads.
inline void bandpass(std::vector<double>& x, double center, double q, int rate) {
    const double w0 = 2.0 * M_PI * center / rate;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    const double b0 = alpha / a0, b2 = -alpha / a0;
    const double a1 = -2.0 * std::cos(w0) / a0, a2 = (1.0 - alpha) / a0;
    for (int pass = 0; pass < 2; ++pass) {
        double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
        for (double& v : x) {
            const double y = b0 * v + b2 * x2 - a1 * y1 - a2 * y2;
            x2 = x1;
            x1 = v;
            y2 = y1;
            y1 = y;
            v = y;
        }
    }
}

inline std::vector<double> pulse_train(const PulseClass& c, std::size_t n, int rate, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> floor_noise(0.0, 0.003);
    const double f0 = c.f0 * (0.95 + 0.1 * u(rng));
    const double period = 1.0 / (c.rate_hz * (0.92 + 0.16 * u(rng)));
    const double decay = 0.035 * (0.8 + 0.4 * u(rng));
    const double length = std::min(0.6 * period, 0.15);
    std::vector<double> x(n);
    for (double& v : x) v = floor_noise(rng);
    for (double onset = u(rng) * period; onset < double(n) / rate; onset += period) {
        const double amp = 0.7 + 0.3 * u(rng);
        const double phase = 2.0 * M_PI * u(rng);
        const auto first = std::size_t(onset * rate);
        const auto last = std::min(n, std::size_t((onset + length) * rate));
        for (std::size_t i = first; i < last; ++i) {
            const double t = double(i) / rate - onset;
            const double env = amp * std::exp(-t / decay) * std::min(1.0, t / 0.002);
            double s = 0.0;
            for (int h = 1; h <= 4; ++h)
                if (h * f0 < 0.45 * rate) s += std::sin(2.0 * M_PI * h * f0 * t + h * phase) / h;
            x[i] += env * s;
        }
    }
    return x;
}

inline std::vector<double> texture(const TextureClass& c, std::size_t n, int rate, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    const double center = std::min(c.center_hz * (0.92 + 0.16 * u(rng)), 0.4 * rate);
    const double drift_hz = 0.1 + 0.3 * u(rng);
    const double drift_phase = 2.0 * M_PI * u(rng);
    std::vector<double> x(n);
    for (double& v : x) v = g(rng);
    bandpass(x, center, 2.0, rate);
    for (std::size_t i = 0; i < n; ++i)
        x[i] *= 1.0 + 0.15 * std::sin(2.0 * M_PI * drift_hz * double(i) / rate + drift_phase);
    return x;
}

inline void scale_to(std::vector<double>& x, double target_peak) {
    double p = 0.0;
    for (double v : x) p = std::max(p, std::abs(v));
    if (p > 0.0)
        for (double& v : x) v *= target_peak / p;
}

}  // namespace detail

/// Content classes are repeating harmonic pulses (class ids 0..C-1); style
/// classes are band-limited noise beds (class ids C..C+S-1).
inline std::vector<LabeledClip> synth_corpus(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t n = audio::standard_length(cfg.sample_rate, cfg.seconds);
    std::vector<LabeledClip> out;
    const int total = cfg.content_classes + cfg.style_classes;
    for (int k = 0; k < total; ++k) {
        const bool content = k < cfg.content_classes;
        const int local = content ? k : k - cfg.content_classes;
        const std::string name = std::string(content ? "pulse_" : "texture_") + char('a' + local);
        for (int i = 0; i < cfg.clips_per_class; ++i) {
            // Each clip has its own stream so clip i does not depend on clips_per_class.
            std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ULL + std::uint64_t(k) * 100003ULL + std::uint64_t(i));
            auto x = content ? detail::pulse_train(pulse_class(local), n, cfg.sample_rate, rng)
                             : detail::texture(texture_class(local), n, cfg.sample_rate, rng);
            std::uniform_real_distribution<double> level(0.5, 0.9);
            detail::scale_to(x, level(rng));
            char id[32];
            std::snprintf(id, sizeof id, "%s_%03d", name.c_str(), i);
            out.push_back({id, k, name, content ? Role::content : Role::style, audio::Waveform(std::move(x), cfg.sample_rate)});
        }
    }
    return out;
}

inline Recording as_recording(const LabeledClip& c) {
    return {c.id, c.class_id, c.class_name, c.role == Role::content ? Salience::foreground : Salience::background, 1,
            c.audio};
}

inline const char* kLabelsFile = "labels.csv";

/// Writes one WAV per clip plus labels.csv (file, class, role).
inline void save_corpus(const std::filesystem::path& dir, const std::vector<LabeledClip>& clips) {
    std::filesystem::create_directories(dir);
    CsvWriter labels({"file", "class", "class_id", "role"});
    for (const auto& c : clips) {
        const std::string file = c.id + ".wav";
        audio::write_wav(dir / file, c.audio);
        labels.row({file, c.class_name, std::to_string(c.class_id), to_string(c.role)});
    }
    labels.save(dir / kLabelsFile);
}

inline std::vector<LabeledClip> load_corpus(const std::filesystem::path& dir) {
    const auto t = read_csv(dir / kLabelsFile);
    const auto cf = t.column("file"), cc = t.column("class"), cr = t.column("role");
    const bool has_id = t.has_column("class_id");
    std::vector<LabeledClip> out;
    std::vector<std::string> names;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& f = t.rows[r];
        LabeledClip c;
        c.id = std::filesystem::path(f[cf]).stem().string();
        c.class_name = f[cc];
        c.role = role_from_string(f[cr]);
        if (has_id) {
            const auto& v = f[t.column("class_id")];
            auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), c.class_id);
            if (ec != std::errc() || end != v.data() + v.size())
                throw DataError("labels line " + std::to_string(t.line_numbers[r]) + ": bad class_id '" + v + "'");
        } else {
            auto it = std::find(names.begin(), names.end(), c.class_name);
            c.class_id = int(it - names.begin());
            if (it == names.end()) names.push_back(c.class_name);
        }
        c.audio = audio::read_wav(dir / f[cf]);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace envxfer::corpus
