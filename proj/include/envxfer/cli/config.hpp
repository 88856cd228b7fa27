#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "envxfer/corpus/synth.hpp"
#include "envxfer/dsp/stft.hpp"
#include "envxfer/eval/pipeline.hpp"
#include "envxfer/nn/optimizer.hpp"
#include "envxfer/nn/train.hpp"
#include "envxfer/transfer/config.hpp"

namespace envxfer::cli {

using Json = nlohmann::ordered_json;

struct CorpusSection {
    std::string dir;          // synthetic corpus directory (labels.csv + WAVs)
    std::string metadata;     // UrbanSound8K metadata CSV
    std::string audio_root;   // UrbanSound8K audio directory holding fold1..fold10
    corpus::SynthConfig synth{};
};

struct SweepSection {
    std::vector<double> alphas{0.0, 0.1, 0.2, 0.5, 0.9};
    std::vector<std::size_t> widths{2, 4, 8, 16};
};

struct RunConfig {
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    int sample_rate = audio::kCanonicalRate;
    double seconds = audio::kCanonicalSeconds;
    dsp::StftParams stft{};
    transfer::TransferConfig transfer{};
    double mix_gain_db = 0.0;
    nn::TrainConfig classifier{};
    nn::TrainConfig autoencoder{};
    std::size_t pairs = 50;
    std::uint64_t pair_seed = 0;
    std::uint64_t split_seed = 0;
    bool retrain = true;
    CorpusSection corpus{};
    SweepSection sweep{};

    RunConfig() {
        classifier.seed = 1;
        autoencoder.seed = 2;
    }

    eval::PipelineConfig pipeline() const {
        eval::PipelineConfig p;
        p.sample_rate = sample_rate;
        p.seconds = seconds;
        p.stft = stft;
        p.transfer = transfer;
        p.mix_gain_db = mix_gain_db;
        p.classifier = classifier;
        p.autoencoder = autoencoder;
        p.n_pairs = pairs;
        p.pair_seed = pair_seed;
        p.split_seed = split_seed;
        p.retrain = retrain;
        p.workers = workers;
        return p;
    }
};

namespace detail {

/// Reads members of one JSON object and rejects any key it was not asked for.
class Section {
public:
    Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw UsageError("config: '" + name() + "' must be an object");
    }

    template <class T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw UsageError("config: '" + qualified(key) + "' has the wrong type");
        }
    }

    Section child(const char* key) {
        seen_.insert(key);
        static const Json empty = Json::object();
        return Section(j_.contains(key) ? j_.at(key) : empty, qualified(key));
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw UsageError("config: unknown key '" + qualified(k) + "'");
    }

private:
    std::string name() const { return path_.empty() ? "<root>" : path_; }
    std::string qualified(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    const Json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline void read_train(Section s, nn::TrainConfig& t) {
    std::string opt = nn::to_string(t.optimizer);
    s.read("epochs", t.epochs);
    s.read("batch_size", t.batch_size);
    s.read("optimizer", opt);
    s.read("lr", t.learning_rate);
    s.read("seed", t.seed);
    s.read("patience", t.patience);
    s.finish();
    t.optimizer = nn::optimizer_from_string(opt);
}

inline Json train_json(const nn::TrainConfig& t) {
    return {{"epochs", t.epochs},       {"batch_size", t.batch_size}, {"optimizer", nn::to_string(t.optimizer)},
            {"lr", t.learning_rate},    {"seed", t.seed},             {"patience", t.patience}};
}

}  // namespace detail

inline RunConfig config_from_json(const Json& j) {
    RunConfig c;
    detail::Section root(j, "");
    root.read("seed", c.seed);
    root.read("workers", c.workers);
    {
        auto s = root.child("audio");
        s.read("rate", c.sample_rate);
        s.read("seconds", c.seconds);
        s.finish();
    }
    {
        auto s = root.child("stft");
        std::string win = dsp::to_string(c.stft.window);
        s.read("window_size", c.stft.window_size);
        s.read("hop", c.stft.hop);
        s.read("window", win);
        s.finish();
        c.stft.window = dsp::window_from_string(win);
    }
    {
        auto s = root.child("transfer");
        auto& t = c.transfer;
        std::string init = transfer::to_string(t.init);
        s.read("alpha", t.alpha);
        s.read("n_filters", t.n_filters);
        s.read("filter_width", t.filter_width);
        s.read("iterations", t.iterations);
        s.read("lr", t.learning_rate);
        s.read("init", init);
        s.read("net_seed", t.net_seed);
        s.read("init_seed", t.init_seed);
        s.read("griffin_lim_seed", t.griffin_lim_seed);
        s.read("griffin_lim_iterations", t.griffin_lim_iterations);
        s.finish();
        t.init = transfer::init_mode_from_string(init);
    }
    {
        auto s = root.child("mix");
        s.read("gain_db", c.mix_gain_db);
        s.finish();
    }
    {
        auto s = root.child("train");
        detail::read_train(s.child("classifier"), c.classifier);
        detail::read_train(s.child("autoencoder"), c.autoencoder);
        s.finish();
    }
    {
        auto s = root.child("eval");
        s.read("pairs", c.pairs);
        s.read("pair_seed", c.pair_seed);
        s.read("split_seed", c.split_seed);
        s.read("retrain", c.retrain);
        s.finish();
    }
    {
        auto s = root.child("corpus");
        s.read("dir", c.corpus.dir);
        s.read("metadata", c.corpus.metadata);
        s.read("audio_root", c.corpus.audio_root);
        auto y = s.child("synth");
        auto& sy = c.corpus.synth;
        y.read("content_classes", sy.content_classes);
        y.read("style_classes", sy.style_classes);
        y.read("clips_per_class", sy.clips_per_class);
        y.read("seed", sy.seed);
        y.finish();
        s.finish();
    }
    {
        auto s = root.child("sweep");
        s.read("alphas", c.sweep.alphas);
        s.read("widths", c.sweep.widths);
        s.finish();
    }
    root.finish();
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("config: cannot open " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("config: " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

/// Every field, including defaults, so a run can be repeated from its echo.
inline Json config_to_json(const RunConfig& c) {
    const auto& t = c.transfer;
    return {
        {"seed", c.seed},
        {"workers", c.workers},
        {"audio", {{"rate", c.sample_rate}, {"seconds", c.seconds}}},
        {"stft",
         {{"window_size", c.stft.window_size}, {"hop", c.stft.hop}, {"window", dsp::to_string(c.stft.window)}}},
        {"transfer",
         {{"alpha", t.alpha},
          {"n_filters", t.n_filters},
          {"filter_width", t.filter_width},
          {"iterations", t.iterations},
          {"lr", t.learning_rate},
          {"init", transfer::to_string(t.init)},
          {"net_seed", t.net_seed},
          {"init_seed", t.init_seed},
          {"griffin_lim_seed", t.griffin_lim_seed},
          {"griffin_lim_iterations", t.griffin_lim_iterations}}},
        {"mix", {{"gain_db", c.mix_gain_db}}},
        {"train",
         {{"classifier", detail::train_json(c.classifier)}, {"autoencoder", detail::train_json(c.autoencoder)}}},
        {"eval",
         {{"pairs", c.pairs}, {"pair_seed", c.pair_seed}, {"split_seed", c.split_seed}, {"retrain", c.retrain}}},
        {"corpus",
         {{"dir", c.corpus.dir},
          {"metadata", c.corpus.metadata},
          {"audio_root", c.corpus.audio_root},
          {"synth",
           {{"content_classes", c.corpus.synth.content_classes},
            {"style_classes", c.corpus.synth.style_classes},
            {"clips_per_class", c.corpus.synth.clips_per_class},
            {"seed", c.corpus.synth.seed}}}}},
        {"sweep", {{"alphas", c.sweep.alphas}, {"widths", c.sweep.widths}}},
    };
}

}  // namespace envxfer::cli
