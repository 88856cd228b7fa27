#pragma once

// RIFF/WAVE reading (PCM16, float32; mono or stereo) and PCM16 writing.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "envxfer/audio/waveform.hpp"
#include "envxfer/error.hpp"

namespace envxfer::audio {

enum class WavErrorCode {
    missing_file,
    malformed_header,
    unsupported_encoding,
    unwritable_path,
    non_finite_sample,
    out_of_range_sample,
};

inline const char* to_string(WavErrorCode c) {
    switch (c) {
        case WavErrorCode::missing_file: return "missing file";
        case WavErrorCode::malformed_header: return "malformed RIFF header";
        case WavErrorCode::unsupported_encoding: return "unsupported encoding";
        case WavErrorCode::unwritable_path: return "unwritable path";
        case WavErrorCode::non_finite_sample: return "non-finite sample";
        case WavErrorCode::out_of_range_sample: return "sample outside [-1, 1]";
    }
    return "unknown";
}

class WavError : public DataError {
public:
    WavError(WavErrorCode code, const std::string& detail)
        : DataError(std::string("wav: ") + to_string(code) + ": " + detail), code_(code) {}
    WavErrorCode code() const noexcept { return code_; }

private:
    WavErrorCode code_;
};

namespace detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
           std::uint32_t(p[3]) << 24;
}
inline std::uint16_t read_u16le(const unsigned char* p) {
    return std::uint16_t(p[0] | p[1] << 8);
}
inline void put_u32le(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
}
inline void put_u16le(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(v & 0xff);
    out.push_back((v >> 8) & 0xff);
}

}  // namespace detail

inline Waveform decode_wav(const std::vector<unsigned char>& bytes, const std::string& name) {
    using detail::read_u16le;
    using detail::read_u32le;
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw WavError(WavErrorCode::malformed_header, name + ": not a RIFF/WAVE file");

    bool have_fmt = false;
    std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
    std::uint32_t rate = 0;
    const unsigned char* data = nullptr;
    std::size_t data_size = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* hdr = bytes.data() + pos;
        const std::uint32_t chunk = read_u32le(hdr + 4);
        const std::size_t body = pos + 8;
        if (body + chunk > bytes.size()) {
            // Tolerate a truncated data chunk (common with streamed writers).
            if (std::memcmp(hdr, "data", 4) == 0) {
                data = bytes.data() + body;
                data_size = bytes.size() - body;
                break;
            }
            throw WavError(WavErrorCode::malformed_header, name + ": chunk overruns file");
        }
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (chunk < 16) throw WavError(WavErrorCode::malformed_header, name + ": short fmt chunk");
            format = read_u16le(bytes.data() + body);
            channels = read_u16le(bytes.data() + body + 2);
            rate = read_u32le(bytes.data() + body + 4);
            block_align = read_u16le(bytes.data() + body + 12);
            bits = read_u16le(bytes.data() + body + 14);
            if (format == 0xFFFE && chunk >= 26) format = read_u16le(bytes.data() + body + 24);
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            data = bytes.data() + body;
            data_size = chunk;
        }
        pos = body + chunk + (chunk & 1u);
    }
    if (!have_fmt) throw WavError(WavErrorCode::malformed_header, name + ": missing fmt chunk");
    if (data == nullptr) throw WavError(WavErrorCode::malformed_header, name + ": missing data chunk");
    if (rate == 0) throw WavError(WavErrorCode::malformed_header, name + ": zero sample rate");
    if (channels < 1 || channels > 2)
        throw WavError(WavErrorCode::unsupported_encoding,
                       name + ": " + std::to_string(channels) + " channels");
    const bool pcm16 = format == 1 && bits == 16;
    const bool f32 = format == 3 && bits == 32;
    if (!pcm16 && !f32)
        throw WavError(WavErrorCode::unsupported_encoding,
                       name + ": format " + std::to_string(format) + " with " + std::to_string(bits) +
                           " bits");
    const std::size_t bytes_per_sample = bits / 8;
    if (block_align != bytes_per_sample * channels)
        throw WavError(WavErrorCode::malformed_header, name + ": inconsistent block alignment");

    const std::size_t frames = data_size / block_align;
    std::vector<double> out(frames);
    for (std::size_t f = 0; f < frames; ++f) {
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c) {
            const unsigned char* p = data + f * block_align + c * bytes_per_sample;
            if (pcm16) {
                acc += double(std::int16_t(read_u16le(p))) / 32768.0;
            } else {
                acc += double(std::bit_cast<float>(read_u32le(p)));
            }
        }
        out[f] = acc / channels;
    }
    return {std::move(out), int(rate)};
}

inline Waveform read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw WavError(WavErrorCode::missing_file, path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_wav(bytes, path.string());
}

/// Mono PCM16 at the waveform's rate. Samples must already lie in [-1, 1].
inline std::vector<unsigned char> encode_wav(const Waveform& w) {
    using detail::put_u16le;
    using detail::put_u32le;
    for (double s : w.samples()) {
        if (!std::isfinite(s)) throw WavError(WavErrorCode::non_finite_sample, "cannot encode");
        if (std::abs(s) > 1.0)
            throw WavError(WavErrorCode::out_of_range_sample, "value " + std::to_string(s));
    }
    const std::uint32_t data_bytes = std::uint32_t(w.size() * 2);
    std::vector<unsigned char> out;
    out.reserve(44 + data_bytes);
    const char* riff = "RIFF";
    out.insert(out.end(), riff, riff + 4);
    put_u32le(out, 36 + data_bytes);
    const char* wave = "WAVEfmt ";
    out.insert(out.end(), wave, wave + 8);
    put_u32le(out, 16);
    put_u16le(out, 1);
    put_u16le(out, 1);
    put_u32le(out, std::uint32_t(w.sample_rate()));
    put_u32le(out, std::uint32_t(w.sample_rate()) * 2);
    put_u16le(out, 2);
    put_u16le(out, 16);
    const char* data = "data";
    out.insert(out.end(), data, data + 4);
    put_u32le(out, data_bytes);
    for (double s : w.samples()) {
        const long q = std::lround(s * 32768.0);
        put_u16le(out, std::uint16_t(std::int16_t(std::clamp(q, -32768L, 32767L))));
    }
    return out;
}

inline void write_wav(const std::filesystem::path& path, const Waveform& w) {
    const auto bytes = encode_wav(w);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw WavError(WavErrorCode::unwritable_path, path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw WavError(WavErrorCode::unwritable_path, path.string());
}

}  // namespace envxfer::audio
