#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "envxfer/audio/standardize.hpp"
#include "envxfer/corpus/recording.hpp"
#include "envxfer/error.hpp"

namespace envxfer::corpus {

/// A content window from a foreground recording paired with a style window
/// from a background recording of a different class. Offsets are in samples
/// of the recordings' own rate.
struct PairSpec {
    std::size_t content_index = 0;
    std::size_t style_index = 0;
    std::size_t content_offset = 0;
    std::size_t style_offset = 0;
    int content_class = 0;
    int style_class = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const PairSpec&, const PairSpec&) = default;
};

inline std::size_t window_positions(const Recording& r, std::size_t window) {
    return r.audio.size() > window ? r.audio.size() - window + 1 : 1;
}

/// Draws `n` distinct cross-class (content window, style window) pairs.
/// `window` is the window length in samples.
inline std::vector<PairSpec> make_pairs(const std::vector<Recording>& fg, const std::vector<Recording>& bg,
                                        std::size_t n, std::uint64_t seed, std::size_t window) {
    if (window == 0) throw UsageError("make_pairs: window length must be positive");
    // Style candidates for each content recording, and the number of distinct
    // pairs available in total.
    std::vector<std::vector<std::size_t>> partners(fg.size());
    long double capacity = 0;
    for (std::size_t i = 0; i < fg.size(); ++i)
        for (std::size_t j = 0; j < bg.size(); ++j)
            if (fg[i].class_id != bg[j].class_id) {
                partners[i].push_back(j);
                capacity += (long double)window_positions(fg[i], window) * window_positions(bg[j], window);
            }
    if (capacity < (long double)n)
        throw DataError("make_pairs: only " + std::to_string((unsigned long long)capacity) +
                        " distinct cross-class pairs available, " + std::to_string(n) + " requested");

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < fg.size(); ++i)
        if (!partners[i].empty()) eligible.push_back(i);

    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t bound) { return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng); };
    std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> seen;
    std::vector<PairSpec> out;
    out.reserve(n);
    while (out.size() < n) {
        PairSpec p;
        p.content_index = eligible[pick(eligible.size())];
        const auto& ps = partners[p.content_index];
        p.style_index = ps[pick(ps.size())];
        p.content_offset = pick(window_positions(fg[p.content_index], window));
        p.style_offset = pick(window_positions(bg[p.style_index], window));
        if (!seen.insert({p.content_index, p.content_offset, p.style_index, p.style_offset}).second) continue;
        p.content_class = fg[p.content_index].class_id;
        p.style_class = bg[p.style_index].class_id;
        p.seed = seed;
        out.push_back(p);
    }
    return out;
}

struct PairAudio {
    audio::Waveform content;
    audio::Waveform style;
};

/// Cuts both windows and standardizes them to `rate` and `seconds`.
inline PairAudio cut_pair(const PairSpec& p, const std::vector<Recording>& fg, const std::vector<Recording>& bg,
                          std::size_t window, int rate, double seconds) {
    if (p.content_index >= fg.size() || p.style_index >= bg.size()) throw UsageError("cut_pair: index out of range");
    const auto& c = fg[p.content_index].audio;
    const auto& s = bg[p.style_index].audio;
    return {audio::standardize(audio::window(c, p.content_offset, window), rate, seconds),
            audio::standardize(audio::window(s, p.style_offset, window), rate, seconds)};
}

}  // namespace envxfer::corpus
