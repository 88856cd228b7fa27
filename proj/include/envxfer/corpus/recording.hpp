#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "envxfer/audio/standardize.hpp"
#include "envxfer/audio/wav.hpp"
#include "envxfer/corpus/metadata.hpp"
#include "envxfer/parallel.hpp"

namespace envxfer::corpus {

/// A continuous piece of labelled audio: a reconstructed source recording or a
/// synthetic clip.
struct Recording {
    std::string id;
    int class_id = 0;
    std::string class_name;
    Salience salience = Salience::foreground;
    std::size_t clip_count = 1;
    audio::Waveform audio;
};

struct Reconstruction {
    std::vector<Recording> foreground;
    std::vector<Recording> background;
    std::size_t clips_used = 0;
    std::vector<std::string> skipped;  // files missing from the audio root
};

inline std::filesystem::path clip_path(const std::filesystem::path& root, const ClipRecord& r) {
    return root / ("fold" + std::to_string(r.fold)) / r.file;
}

/// Groups clips by (source, salience), orders them by start time and joins
/// them end to end. Every clip is resampled to `rate` first. Missing files are
/// skipped and listed; a group with no readable clip yields no recording.
inline Reconstruction reconstruct_recordings(const std::vector<ClipRecord>& records, const std::filesystem::path& root,
                                             int rate = audio::kCanonicalRate, std::size_t workers = 1) {
    std::map<std::pair<std::int64_t, int>, std::vector<const ClipRecord*>> groups;
    for (const auto& r : records) groups[{r.source_id, int(r.salience)}].push_back(&r);

    std::vector<std::vector<const ClipRecord*>> ordered;
    ordered.reserve(groups.size());
    for (auto& [key, clips] : groups) {
        std::stable_sort(clips.begin(), clips.end(), [](const ClipRecord* a, const ClipRecord* b) {
            return std::tie(a->start, a->file) < std::tie(b->start, b->file);
        });
        ordered.push_back(clips);
    }

    struct Slot {
        Recording rec;
        std::vector<std::string> missing;
        bool any = false;
    };
    std::vector<Slot> slots(ordered.size());
    parallel_for(
        ordered.size(),
        [&](std::size_t g) {
            auto& s = slots[g];
            const auto& clips = ordered[g];
            std::vector<double> joined;
            for (const ClipRecord* c : clips) {
                const auto path = clip_path(root, *c);
                if (!std::filesystem::exists(path)) {
                    s.missing.push_back(path.string());
                    continue;
                }
                const auto w = audio::resample_linear(audio::read_wav(path), rate);
                joined.insert(joined.end(), w.data().begin(), w.data().end());
                if (!s.any) {
                    s.rec.class_id = c->class_id;
                    s.rec.class_name = c->class_name;
                    s.rec.salience = c->salience;
                    s.rec.clip_count = 0;
                    s.any = true;
                }
                ++s.rec.clip_count;
            }
            s.rec.id = std::to_string(clips.front()->source_id) + "-" + std::to_string(int(clips.front()->salience));
            if (s.any) s.rec.audio = audio::Waveform(std::move(joined), rate);
        },
        workers);

    Reconstruction out;
    for (auto& s : slots) {
        out.skipped.insert(out.skipped.end(), s.missing.begin(), s.missing.end());
        if (!s.any) continue;
        out.clips_used += s.rec.clip_count;
        (s.rec.salience == Salience::foreground ? out.foreground : out.background).push_back(std::move(s.rec));
    }
    return out;
}

}  // namespace envxfer::corpus
