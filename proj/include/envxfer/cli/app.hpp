#pragma once

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "envxfer/cli/config.hpp"
#include "envxfer/corpus/metadata.hpp"
#include "envxfer/corpus/pairs.hpp"
#include "envxfer/corpus/recording.hpp"
#include "envxfer/eval/pipeline.hpp"
#include "envxfer/nn/serialize.hpp"
#include "envxfer/version.hpp"

namespace envxfer::cli {

namespace fs = std::filesystem;

inline constexpr const char* kDatasetEnv = "URBANSOUND8K_ROOT";

/// Flag values that override the loaded configuration when given.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<int> rate;
    std::optional<double> seconds;
    std::optional<std::size_t> window_size, hop;
    std::optional<double> alpha, lr;
    std::optional<std::size_t> n_filters, filter_width;
    std::optional<int> iterations, gl_iterations;
    std::optional<std::string> init;
    std::optional<double> gain_db;
    std::optional<int> epochs;
    std::optional<std::size_t> pairs;
    std::optional<std::uint64_t> pair_seed, split_seed;
    std::optional<int> clips_per_class, content_classes, style_classes;
    std::optional<std::uint64_t> synth_seed;
    std::optional<std::string> corpus_dir, metadata, audio_root;
    std::vector<double> alphas;
    std::vector<std::size_t> widths;

    void apply(RunConfig& c) const {
        if (seed) c.seed = *seed;
        if (workers) c.workers = *workers;
        if (rate) c.sample_rate = *rate;
        if (seconds) c.seconds = *seconds;
        if (window_size) c.stft.window_size = *window_size;
        if (hop) c.stft.hop = *hop;
        if (alpha) c.transfer.alpha = *alpha;
        if (lr) c.transfer.learning_rate = *lr;
        if (n_filters) c.transfer.n_filters = *n_filters;
        if (filter_width) c.transfer.filter_width = *filter_width;
        if (iterations) c.transfer.iterations = *iterations;
        if (gl_iterations) c.transfer.griffin_lim_iterations = *gl_iterations;
        if (init) c.transfer.init = transfer::init_mode_from_string(*init);
        if (gain_db) c.mix_gain_db = *gain_db;
        if (epochs) c.classifier.epochs = c.autoencoder.epochs = *epochs;
        if (pairs) c.pairs = *pairs;
        if (pair_seed) c.pair_seed = *pair_seed;
        if (split_seed) c.split_seed = *split_seed;
        if (clips_per_class) c.corpus.synth.clips_per_class = *clips_per_class;
        if (content_classes) c.corpus.synth.content_classes = *content_classes;
        if (style_classes) c.corpus.synth.style_classes = *style_classes;
        if (synth_seed) c.corpus.synth.seed = *synth_seed;
        if (corpus_dir) c.corpus.dir = *corpus_dir;
        if (metadata) c.corpus.metadata = *metadata;
        if (audio_root) c.corpus.audio_root = *audio_root;
        if (!alphas.empty()) c.sweep.alphas = alphas;
        if (!widths.empty()) c.sweep.widths = widths;
    }
};

/// State of one invocation: resolved config, run directory and manifest.
class Run {
public:
    Run(std::string command, std::vector<std::string> argv, RunConfig cfg, fs::path dir)
        : command_(std::move(command)), argv_(std::move(argv)), cfg_(std::move(cfg)), dir_(std::move(dir)) {
        fs::create_directories(dir_);
        started_ = utc_now();
    }

    const RunConfig& config() const { return cfg_; }
    const fs::path& dir() const { return dir_; }

    fs::path output(const std::string& name) {
        outputs_.push_back(name);
        return dir_ / name;
    }
    void note(const std::string& key, Json value) { results_[key] = std::move(value); }

    void write_manifest(int exit_code, const std::string& error = {}) const {
        Json m;
        m["tool"] = "envxfer";
        m["version"] = kVersion;
        m["command"] = command_;
        m["argv"] = argv_;
        m["started_utc"] = started_;
        m["finished_utc"] = utc_now();
        m["exit_code"] = exit_code;
        if (!error.empty()) m["error"] = error;
        m["config"] = config_to_json(cfg_);
        m["outputs"] = outputs_;
        m["results"] = results_;
        std::ofstream(dir_ / "manifest.json", std::ios::binary | std::ios::trunc) << m.dump(2) << '\n';
    }

    static std::string utc_now(const char* fmt = "%Y-%m-%dT%H:%M:%SZ") {
        const std::time_t t = std::time(nullptr);
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, fmt, &tm);
        return buf;
    }

private:
    std::string command_;
    std::vector<std::string> argv_;
    RunConfig cfg_;
    fs::path dir_;
    std::string started_;
    std::vector<std::string> outputs_;
    Json results_ = Json::object();
};

namespace detail {

inline void write_json(const fs::path& p, const Json& j) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + p.string());
    out << j.dump(2) << '\n';
}

inline std::vector<corpus::LabeledClip> load_synthetic(const RunConfig& c) {
    if (c.corpus.dir.empty()) throw UsageError("no corpus given: pass --corpus or set corpus.dir");
    auto clips = corpus::load_corpus(c.corpus.dir);
    if (clips.empty()) throw DataError("corpus " + c.corpus.dir + " is empty");
    return clips;
}

inline std::vector<corpus::LabeledClip> standardized(std::vector<corpus::LabeledClip> clips, const RunConfig& c) {
    for (auto& clip : clips) clip.audio = audio::standardize(clip.audio, c.sample_rate, c.seconds);
    return clips;
}

inline audio::Waveform read_clip(const std::string& path, const RunConfig& c) {
    return audio::standardize(audio::read_wav(path), c.sample_rate, c.seconds);
}

inline CsvWriter history_table(const std::vector<nn::EpochStats>& h) {
    CsvWriter w({"epoch", "train_loss", "train_accuracy", "val_loss", "val_accuracy"});
    for (const auto& e : h)
        w.row({std::to_string(e.epoch), fmt_num(e.train_loss), fmt_num(e.train_accuracy), fmt_num(e.val_loss),
               fmt_num(e.val_accuracy)});
    return w;
}

/// Metadata path and audio root, from the config or from the dataset root
/// named by the environment variable.
inline std::pair<fs::path, fs::path> dataset_paths(const RunConfig& c) {
    fs::path meta = c.corpus.metadata, root = c.corpus.audio_root;
    if (const char* env = std::getenv(kDatasetEnv); env && *env) {
        if (meta.empty()) meta = fs::path(env) / "metadata" / "UrbanSound8K.csv";
        if (root.empty()) root = fs::path(env) / "audio";
    }
    if (meta.empty())
        throw UsageError(std::string("no dataset given: pass --metadata/--audio-root or set ") + kDatasetEnv);
    return {meta, root};
}

inline Json transfer_summary(const transfer::TransferResult& r) {
    return {{"initial_total", r.loss.trace.front().total},
            {"final_total", r.loss.total},
            {"final_content", r.loss.content},
            {"final_style", r.loss.style},
            {"griffin_lim_consistency", r.griffin_lim_consistency.back()},
            {"optimize_seconds", r.optimize_seconds},
            {"reconstruct_seconds", r.reconstruct_seconds}};
}

// --- subcommands -----------------------------------------------------------

inline void cmd_synth_corpus(Run& run) {
    auto sc = run.config().corpus.synth;
    sc.sample_rate = run.config().sample_rate;
    sc.seconds = run.config().seconds;
    const auto clips = corpus::synth_corpus(sc);
    const fs::path dir = run.config().corpus.dir.empty() ? run.output("corpus") : fs::path(run.config().corpus.dir);
    corpus::save_corpus(dir, clips);
    run.note("corpus_dir", dir.string());
    run.note("clips", clips.size());
}

inline void cmd_ingest(Run& run) {
    const auto [meta, root] = dataset_paths(run.config());
    const auto records = corpus::parse_metadata(meta);
    CsvWriter counts({"class_id", "class", "foreground", "background", "total"});
    std::map<int, std::string> names;
    for (const auto& r : records) names.emplace(r.class_id, r.class_name);
    for (const auto& [id, c] : corpus::count_by_class(records))
        counts.row({std::to_string(id), names[id], std::to_string(c.foreground), std::to_string(c.background),
                    std::to_string(c.total())});
    counts.save(run.output("class_counts.csv"));
    run.note("records", records.size());
    if (root.empty() || !fs::exists(root)) {
        run.note("reconstruction", "skipped: audio root not found");
        return;
    }
    const auto rec = corpus::reconstruct_recordings(records, root, run.config().sample_rate, run.config().workers);
    CsvWriter table({"id", "class_id", "class", "salience", "clips", "seconds"});
    for (const auto* set : {&rec.foreground, &rec.background})
        for (const auto& r : *set)
            table.row({r.id, std::to_string(r.class_id), r.class_name, corpus::to_string(r.salience),
                       std::to_string(r.clip_count), fmt_num(r.audio.seconds())});
    table.save(run.output("recordings.csv"));
    run.note("foreground_recordings", rec.foreground.size());
    run.note("background_recordings", rec.background.size());
    run.note("clips_used", rec.clips_used);
    run.note("clips_skipped", rec.skipped.size());
}

inline void cmd_pairs(Run& run) {
    const auto& c = run.config();
    CsvWriter table({"pair_id", "content_id", "style_id", "content_class", "style_class", "content_offset",
                     "style_offset"});
    std::vector<corpus::Recording> fg, bg;
    if (!c.corpus.dir.empty()) {
        for (const auto& clip : standardized(load_synthetic(c), c)) {
            auto r = corpus::as_recording(clip);
            (clip.role == corpus::Role::content ? fg : bg).push_back(std::move(r));
        }
    } else {
        const auto [meta, root] = dataset_paths(c);
        auto rec = corpus::reconstruct_recordings(corpus::parse_metadata(meta), root, c.sample_rate, c.workers);
        fg = std::move(rec.foreground);
        bg = std::move(rec.background);
    }
    const auto specs = corpus::make_pairs(fg, bg, c.pairs, c.pair_seed, audio::standard_length(c.sample_rate, c.seconds));
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& p = specs[i];
        table.row({"pair_" + std::to_string(i), fg[p.content_index].id, bg[p.style_index].id,
                   std::to_string(p.content_class), std::to_string(p.style_class), std::to_string(p.content_offset),
                   std::to_string(p.style_offset)});
    }
    table.save(run.output("pairs.csv"));
    run.note("pairs", specs.size());
}

inline void cmd_transfer(Run& run, const std::string& content, const std::string& style) {
    const auto& c = run.config();
    const auto r = transfer::run_transfer(read_clip(content, c), read_clip(style, c), c.transfer, c.stft);
    audio::write_wav(run.output("generated.wav"), r.generated);
    CsvWriter trace({"iteration", "total", "content", "style"});
    for (std::size_t i = 0; i < r.loss.trace.size(); ++i) {
        const auto& t = r.loss.trace[i];
        trace.row({std::to_string(i + 1), fmt_num(t.total), fmt_num(t.content), fmt_num(t.style)});
    }
    trace.save(run.output("loss_trace.csv"));
    const auto summary = transfer_summary(r);
    write_json(run.output("transfer.json"), summary);
    run.note("transfer", summary);
}

inline void cmd_mix(Run& run, const std::string& content, const std::string& style) {
    const auto& c = run.config();
    const auto m = mixing::mix_flagged(read_clip(content, c), read_clip(style, c), c.mix_gain_db);
    audio::write_wav(run.output("mixed.wav"), m.waveform);
    run.note("content_silent", m.content_silent);
    run.note("style_silent", m.style_silent);
    run.note("peak_limited", m.peak_limited);
}

inline void cmd_train_classifier(Run& run) {
    const auto& c = run.config();
    const auto set = eval::classifier_set(standardized(load_synthetic(c), c), c.stft);
    const auto r = eval::train_base_classifier(set, c.classifier, c.split_seed);
    nn::save_model(run.output("classifier.envxmdl"), r.model);
    history_table(r.history).save(run.output("classifier_history.csv"));
    run.note("p0", r.accuracy);
    run.note("best_epoch", r.best_epoch);
    run.note("split", {{"train", r.split.train.size()}, {"val", r.split.val.size()}, {"test", r.split.test.size()}});
}

inline void cmd_train_autoencoder(Run& run) {
    const auto& c = run.config();
    const auto inputs = eval::autoencoder_inputs(standardized(load_synthetic(c), c), c.stft);
    const auto r = eval::train_autoencoder(inputs, c.autoencoder, c.split_seed);
    nn::save_model(run.output("autoencoder.envxmdl"), r.model);
    history_table(r.history).save(run.output("autoencoder_history.csv"));
    run.note("test_mse", r.test_mse);
    run.note("epochs_run", r.history.size());
}

inline void cmd_evaluate(Run& run) {
    const auto& c = run.config();
    const auto r = eval::run_evaluation(load_synthetic(c), c.pipeline());
    eval::pair_table(r.report.pairs).save(run.output("eval_pairs.csv"));
    const auto summary = eval::summary_json(r.report);
    write_json(run.output("eval_summary.json"), summary);
    run.note("summary", summary);
}

enum class SweepKind { alpha, width };

inline void cmd_sweep(Run& run, SweepKind kind, const std::string& autoencoder_path) {
    const auto& c = run.config();
    const auto clips = standardized(load_synthetic(c), c);
    const auto pairs = eval::draw_pairs(clips, c.pairs, c.pair_seed, c.sample_rate, c.seconds);
    const auto records = kind == SweepKind::alpha
                             ? transfer::alpha_sweep(pairs.clips, c.sweep.alphas, c.transfer, c.stft, c.workers)
                             : transfer::filter_width_sweep(pairs.clips, c.sweep.widths, c.transfer, c.stft, c.workers);
    const std::string stem = kind == SweepKind::alpha ? "sweep_alpha" : "sweep_width";
    transfer::sweep_table(records).save(run.output(stem + ".csv"));
    run.note("runs", records.size());
    if (autoencoder_path.empty()) return;

    // Embedding distances of every output against its pair's clips and mix.
    const auto ae = nn::load_model(autoencoder_path);
    const auto mixed = eval::mix_pairs(pairs, c.mix_gain_db);
    std::vector<eval::PairEval> rows;
    for (std::size_t start = 0; start < records.size(); start += pairs.size()) {
        std::vector<audio::Waveform> generated;
        for (std::size_t i = 0; i < pairs.size(); ++i) generated.push_back(records[start + i].result.generated);
        const auto pres = eval::preservation_for(ae, pairs, generated, mixed, c.stft);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto& rec = records[start + i];
            rows.push_back({rec.pair_id, pairs.content_ids[i], pairs.style_ids[i], pairs.content_labels[i],
                            pairs.style_labels[i], rec.alpha, rec.filter_width, 0, 0, pres[i]});
        }
    }
    eval::pair_table(rows).save(run.output(stem + "_preservation.csv"));
}

/// Groups rows by (alpha, filter_width) when present and reports the median
/// of every other numeric column.
inline void cmd_report(Run& run, const std::vector<std::string>& inputs) {
    if (inputs.empty()) throw UsageError("report: pass at least one --input CSV");
    std::vector<std::string> value_cols;
    std::map<std::pair<std::string, std::string>, std::map<std::string, std::vector<double>>> groups;
    std::map<std::pair<std::string, std::string>, std::size_t> counts;
    for (const auto& path : inputs) {
        const auto t = read_csv(path);
        for (const auto& h : t.header)
            if (h != "alpha" && h != "filter_width" &&
                std::find(value_cols.begin(), value_cols.end(), h) == value_cols.end())
                value_cols.push_back(h);
        for (const auto& row : t.rows) {
            const std::pair<std::string, std::string> key{t.has_column("alpha") ? row[t.column("alpha")] : "",
                                                          t.has_column("filter_width") ? row[t.column("filter_width")]
                                                                                       : ""};
            ++counts[key];
            for (std::size_t i = 0; i < t.header.size(); ++i) {
                char* end = nullptr;
                const double v = std::strtod(row[i].c_str(), &end);
                if (end != row[i].c_str() && *end == '\0') groups[key][t.header[i]].push_back(v);
            }
        }
    }
    std::vector<std::string> numeric;
    for (const auto& col : value_cols) {
        bool any = false;
        for (const auto& [key, cols] : groups) any = any || cols.count(col);
        if (any && col.find("_id") == std::string::npos && col != "pair_id") numeric.push_back(col);
    }
    std::vector<std::string> header{"alpha", "filter_width", "rows"};
    for (const auto& col : numeric) header.push_back("median_" + col);
    CsvWriter out(header);
    for (const auto& [key, n] : counts) {
        std::vector<std::string> row{key.first, key.second, std::to_string(n)};
        for (const auto& col : numeric) {
            const auto it = groups[key].find(col);
            row.push_back(it == groups[key].end() ? "" : fmt_num(eval::median(it->second)));
        }
        out.row(row);
    }
    out.save(run.output("report.csv"));
    run.note("groups", counts.size());
}

}  // namespace detail

inline int exit_code_for(const Error& e) { return int(e.kind()); }

/// Parses arguments, runs one subcommand and returns the process exit code:
/// 0 success, 1 usage error, 2 data error, 3 numerical failure.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Environmental sound style transfer toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string config_path, out_dir;
    Overrides ov;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_dir, "run directory (default runs/<timestamp>-seed<seed>)");
    app.add_option("--seed", ov.seed, "run seed, used in the default run directory name");
    app.add_option("--workers", ov.workers, "worker threads for sweeps (0 = all cores)");
    app.add_option("--rate", ov.rate, "working sample rate");
    app.add_option("--seconds", ov.seconds, "clip duration");
    app.add_option("--window-size", ov.window_size, "STFT window length");
    app.add_option("--hop", ov.hop, "STFT hop");
    app.add_option("--corpus", ov.corpus_dir, "synthetic corpus directory");
    app.add_option("--metadata", ov.metadata, "UrbanSound8K metadata CSV");
    app.add_option("--audio-root", ov.audio_root, "UrbanSound8K audio directory");
    app.add_option("--alpha", ov.alpha, "content weight");
    app.add_option("--lr", ov.lr, "transfer learning rate");
    app.add_option("--n-filters", ov.n_filters, "random filters");
    app.add_option("--filter-width", ov.filter_width, "filter width in frames");
    app.add_option("--iterations", ov.iterations, "optimization steps");
    app.add_option("--gl-iterations", ov.gl_iterations, "Griffin-Lim iterations");
    app.add_option("--init", ov.init, "content|noise");
    app.add_option("--gain-db", ov.gain_db, "style gain for mixing");
    app.add_option("--epochs", ov.epochs, "training epochs (classifier and autoencoder)");
    app.add_option("--pairs", ov.pairs, "number of pairs");
    app.add_option("--pair-seed", ov.pair_seed, "pair sampling seed");
    app.add_option("--split-seed", ov.split_seed, "train/test split seed");
    app.add_option("--clips-per-class", ov.clips_per_class, "synthetic clips per class");
    app.add_option("--content-classes", ov.content_classes, "synthetic content classes");
    app.add_option("--style-classes", ov.style_classes, "synthetic style classes");
    app.add_option("--synth-seed", ov.synth_seed, "synthetic corpus seed");

    std::string content, style, autoencoder;
    std::vector<std::string> report_inputs;
    auto* synth = app.add_subcommand("synth-corpus", "generate the synthetic corpus");
    auto* ingest = app.add_subcommand("ingest", "parse UrbanSound8K metadata and rebuild recordings");
    auto* pairs = app.add_subcommand("pairs", "draw cross-class content/style pairs");
    auto* tr = app.add_subcommand("transfer", "style transfer for one content/style pair");
    tr->add_option("--content", content, "content WAV")->required();
    tr->add_option("--style", style, "style WAV")->required();
    auto* mx = app.add_subcommand("mix", "overlay style onto content");
    mx->add_option("--content", content, "content WAV")->required();
    mx->add_option("--style", style, "style WAV")->required();
    auto* tc = app.add_subcommand("train-classifier", "train the base classifier");
    auto* ta = app.add_subcommand("train-autoencoder", "train the embedding autoencoder");
    auto* ev = app.add_subcommand("evaluate", "score transfer against mixing");
    auto* sa = app.add_subcommand("sweep-alpha", "transfer over a grid of content weights");
    sa->add_option("--alphas", ov.alphas, "alpha grid");
    sa->add_option("--autoencoder", autoencoder, "trained autoencoder for embedding distances");
    auto* sw = app.add_subcommand("sweep-width", "transfer over a list of filter widths");
    sw->add_option("--widths", ov.widths, "filter widths");
    sw->add_option("--autoencoder", autoencoder, "trained autoencoder for embedding distances");
    auto* rp = app.add_subcommand("report", "aggregate result CSVs into summary tables");
    rp->add_option("--input", report_inputs, "CSV to aggregate (repeatable)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : int(ErrorKind::usage);
    }

    const std::string command = app.get_subcommands().front()->get_name();
    std::unique_ptr<Run> run;
    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        ov.apply(cfg);
        cfg.transfer.validate();
        const fs::path dir =
            out_dir.empty() ? fs::path("runs") / (Run::utc_now("%Y%m%d-%H%M%S") + "-seed" + std::to_string(cfg.seed))
                            : fs::path(out_dir);
        run = std::make_unique<Run>(command, std::vector<std::string>(argv, argv + argc), cfg, dir);

        if (app.got_subcommand(synth)) detail::cmd_synth_corpus(*run);
        else if (app.got_subcommand(ingest)) detail::cmd_ingest(*run);
        else if (app.got_subcommand(pairs)) detail::cmd_pairs(*run);
        else if (app.got_subcommand(tr)) detail::cmd_transfer(*run, content, style);
        else if (app.got_subcommand(mx)) detail::cmd_mix(*run, content, style);
        else if (app.got_subcommand(tc)) detail::cmd_train_classifier(*run);
        else if (app.got_subcommand(ta)) detail::cmd_train_autoencoder(*run);
        else if (app.got_subcommand(ev)) detail::cmd_evaluate(*run);
        else if (app.got_subcommand(sa)) detail::cmd_sweep(*run, detail::SweepKind::alpha, autoencoder);
        else if (app.got_subcommand(sw)) detail::cmd_sweep(*run, detail::SweepKind::width, autoencoder);
        else if (app.got_subcommand(rp)) detail::cmd_report(*run, report_inputs);

        run->write_manifest(0);
        out << run->dir().string() << '\n';
        return 0;
    } catch (const Error& e) {
        err << "envxfer " << command << ": " << e.what() << '\n';
        if (run) run->write_manifest(exit_code_for(e), e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "envxfer " << command << ": " << e.what() << '\n';
        if (run) run->write_manifest(int(ErrorKind::data), e.what());
        return int(ErrorKind::data);
    }
}

}  // namespace envxfer::cli
