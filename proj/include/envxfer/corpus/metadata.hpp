#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "envxfer/csv.hpp"
#include "envxfer/error.hpp"

namespace envxfer::corpus {

enum class Salience { foreground = 1, background = 2 };

inline const char* to_string(Salience s) { return s == Salience::foreground ? "foreground" : "background"; }

/// One row of the UrbanSound8K metadata table.
struct ClipRecord {
    std::string file;
    std::int64_t source_id = 0;
    double start = 0.0;
    double end = 0.0;
    Salience salience = Salience::foreground;
    int fold = 1;
    int class_id = 0;
    std::string class_name;

    friend bool operator==(const ClipRecord&, const ClipRecord&) = default;
};

inline constexpr std::array<const char*, 8> kMetadataColumns{"slice_file_name", "fsID", "start", "end",
                                                             "salience", "fold", "classID", "class"};

namespace detail {

template <class T>
T parse_field(const std::string& s, const char* column, std::size_t line) {
    T v{};
    const auto* b = s.data();
    const auto* e = s.data() + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e || s.empty())
        throw DataError("metadata line " + std::to_string(line) + ": cannot parse " + column + " '" + s + "'");
    return v;
}

}  // namespace detail

inline std::vector<ClipRecord> parse_metadata(const CsvTable& t) {
    std::array<std::size_t, kMetadataColumns.size()> col{};
    for (std::size_t i = 0; i < kMetadataColumns.size(); ++i) col[i] = t.column(kMetadataColumns[i]);
    std::vector<ClipRecord> out;
    out.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& f = t.rows[r];
        const std::size_t line = t.line_numbers[r];
        ClipRecord c;
        c.file = f[col[0]];
        c.source_id = detail::parse_field<std::int64_t>(f[col[1]], "fsID", line);
        c.start = detail::parse_field<double>(f[col[2]], "start", line);
        c.end = detail::parse_field<double>(f[col[3]], "end", line);
        const int sal = detail::parse_field<int>(f[col[4]], "salience", line);
        c.fold = detail::parse_field<int>(f[col[5]], "fold", line);
        c.class_id = detail::parse_field<int>(f[col[6]], "classID", line);
        c.class_name = f[col[7]];
        if (c.file.empty()) throw DataError("metadata line " + std::to_string(line) + ": empty file name");
        if (!(c.end > c.start))
            throw DataError("metadata line " + std::to_string(line) + ": end must exceed start");
        if (sal != 1 && sal != 2)
            throw DataError("metadata line " + std::to_string(line) + ": salience must be 1 or 2");
        if (c.class_id < 0 || c.class_id >= 10)
            throw DataError("metadata line " + std::to_string(line) + ": classID out of range");
        c.salience = Salience(sal);
        out.push_back(std::move(c));
    }
    return out;
}

inline std::vector<ClipRecord> parse_metadata(const std::filesystem::path& csv) { return parse_metadata(read_csv(csv)); }

struct SalienceCounts {
    std::size_t foreground = 0;
    std::size_t background = 0;
    std::size_t total() const { return foreground + background; }
    friend bool operator==(const SalienceCounts&, const SalienceCounts&) = default;
};

/// Clip counts per class id.
inline std::map<int, SalienceCounts> count_by_class(const std::vector<ClipRecord>& records) {
    std::map<int, SalienceCounts> m;
    for (const auto& r : records) {
        auto& c = m[r.class_id];
        (r.salience == Salience::foreground ? c.foreground : c.background) += 1;
    }
    return m;
}

struct ReferenceClass {
    int class_id;
    const char* name;
    SalienceCounts counts;
};

/// Published per-class clip counts of the UrbanSound8K release.
inline const std::array<ReferenceClass, 10>& urbansound8k_reference() {
    static const std::array<ReferenceClass, 10> t{{
        {0, "air_conditioner", {569, 431}},
        {1, "car_horn", {153, 276}},
        {2, "children_playing", {588, 412}},
        {3, "dog_bark", {645, 355}},
        {4, "drilling", {902, 98}},
        {5, "engine_idling", {916, 84}},
        {6, "gun_shot", {304, 70}},
        {7, "jackhammer", {731, 269}},
        {8, "siren", {269, 660}},
        {9, "street_music", {625, 375}},
    }};
    return t;
}

inline constexpr std::size_t kUrbanSoundClips = 8732;
inline constexpr std::size_t kUrbanSoundForegroundRecordings = 933;
inline constexpr std::size_t kUrbanSoundBackgroundRecordings = 404;

}  // namespace envxfer::corpus
