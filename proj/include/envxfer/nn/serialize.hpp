#pragma once

// Model container: magic, u64 LE byte length of a UTF-8 header, the header
// (seed, input shape, one layer spec per line), then every parameter block as
// little-endian float64 in layer order. A JSON sidecar mirrors shapes and seed.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "envxfer/error.hpp"
#include "envxfer/nn/model.hpp"

namespace envxfer::nn {

inline constexpr char kModelMagic[8] = {'E', 'N', 'V', 'X', 'M', 'D', 'L', '1'};

inline std::string model_header(const Model& m) {
    std::ostringstream os;
    os << "seed " << m.seed() << '\n' << "input";
    for (auto d : m.input_shape()) os << ' ' << d;
    os << '\n';
    for (const auto& l : m.layers()) os << l.spec.to_text() << '\n';
    return os.str();
}

inline std::vector<unsigned char> encode_model(const Model& m) {
    std::vector<unsigned char> out(kModelMagic, kModelMagic + 8);
    const std::string header = model_header(m);
    auto put_u64 = [&](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out.push_back((v >> (8 * i)) & 0xff);
    };
    put_u64(header.size());
    out.insert(out.end(), header.begin(), header.end());
    for (const auto& l : m.layers())
        for (const auto& p : l.params)
            for (double v : p.data) put_u64(std::bit_cast<std::uint64_t>(v));
    return out;
}

inline Model decode_model(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kModelMagic, 8) != 0)
        throw DataError("model: bad magic");
    auto get_u64 = [&](std::size_t at) {
        if (at + 8 > bytes.size()) throw DataError("model: truncated file");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(bytes[at + i]) << (8 * i);
        return v;
    };
    const std::uint64_t header_len = get_u64(8);
    if (16 + header_len > bytes.size()) throw DataError("model: truncated header");
    std::istringstream is(std::string(bytes.begin() + 16, bytes.begin() + 16 + long(header_len)));
    std::string line, word;
    std::uint64_t seed = 0;
    Shape input;
    std::vector<LayerSpec> specs;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        ls >> word;
        if (word == "seed") {
            ls >> seed;
        } else if (word == "input") {
            std::size_t d;
            while (ls >> d) input.push_back(d);
        } else {
            specs.push_back(LayerSpec::from_text(line));
        }
    }
    Model m(input, specs, seed);
    std::size_t at = 16 + header_len;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.layer(i).params.empty()) continue;
        for (auto& p : m.params(i))
            for (double& v : p.data) {
                v = std::bit_cast<double>(get_u64(at));
                at += 8;
            }
    }
    if (at != bytes.size()) throw DataError("model: trailing bytes after parameters");
    return m;
}

inline nlohmann::json model_sidecar(const Model& m) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : m.layers()) {
        nlohmann::json pj = nlohmann::json::array();
        for (const auto& p : l.params) pj.push_back(p.shape);
        layers.push_back({{"spec", l.spec.to_text()},
                          {"input_shape", l.input_shape},
                          {"output_shape", l.output_shape},
                          {"param_shapes", pj}});
    }
    return {{"format", "envxfer-model-1"},
            {"seed", m.seed()},
            {"input_shape", m.input_shape()},
            {"parameter_count", m.parameter_count()},
            {"layers", layers}};
}

inline void save_model(const std::filesystem::path& path, const Model& m) {
    const auto bytes = encode_model(m);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("model: cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    std::ofstream side(path.string() + ".json", std::ios::trunc);
    if (!side) throw DataError("model: cannot write sidecar for " + path.string());
    side << model_sidecar(m).dump(2) << '\n';
}

inline Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("model: cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_model(bytes);
}

}  // namespace envxfer::nn
