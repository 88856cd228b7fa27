// Acceptance run: one PASS/FAIL/SKIPPED line per criterion.
//
//   acceptance [--only 1,2,...] [--expected-failures 7,8] [--workdir DIR] [--report FILE]
//
// Exits non-zero when a criterion fails that is not listed in
// --expected-failures. Listed criteria still print FAIL when they fail.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "envxfer/corpus/metadata.hpp"
#include "envxfer/corpus/recording.hpp"
#include "envxfer/corpus/synth.hpp"
#include "envxfer/dsp/griffin_lim.hpp"
#include "envxfer/dsp/stft.hpp"
#include "envxfer/eval/pipeline.hpp"
#include "envxfer/nn/gradcheck.hpp"
#include "envxfer/transfer/objective.hpp"
#include "envxfer/transfer/sweep.hpp"
#include "envxfer/transfer/transfer.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace envxfer;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    enum Status { pass, fail, skipped } status = fail;
    std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// --- 1: gradients -------------------------------------------------------------

nn::Tensor random_tensor(const nn::Shape& s, std::uint64_t seed) {
    nn::Tensor t(s);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    for (double& v : t.data) v = d(rng);
    return t;
}

Outcome gradients() {
    using nn::LayerSpec;
    struct Case {
        const char* name;
        nn::Shape input;
        std::vector<LayerSpec> layers;
        nn::ForwardOptions forward;
    };
    const std::vector<Case> cases{
        {"conv2d_valid", {6, 5, 2}, {LayerSpec::conv2d_valid(3, 3)}, {}},
        {"conv2d_same", {5, 6, 2}, {LayerSpec::conv2d_same(3, 3)}, {}},
        {"conv1d_valid", {9, 4}, {LayerSpec::conv1d_valid(3, 5)}, {}},
        {"maxpool2", {6, 7, 2}, {LayerSpec::maxpool2()}, {}},
        {"upsample2", {3, 4, 2}, {LayerSpec::upsample2()}, {}},
        {"dense", {7}, {LayerSpec::dense(4)}, {}},
        {"relu", {5, 5, 2}, {LayerSpec::relu()}, {}},
        {"sigmoid", {5, 5, 2}, {LayerSpec::sigmoid()}, {}},
        {"softmax", {6}, {LayerSpec::softmax()}, {}},
        {"dropout", {6, 6, 2}, {LayerSpec::dropout(0.3)}, {true, 99}},
        {"flatten", {3, 3, 2}, {LayerSpec::flatten(), LayerSpec::dense(3)}, {}},
    };
    const auto t0 = Clock::now();
    double worst = 0.0;
    std::string worst_name;
    for (const auto& c : cases)
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            nn::Model m(c.input, c.layers, seed + 100);
            nn::GradCheckOptions opts;
            opts.seed = seed;
            opts.forward = c.forward;
            opts.forward.dropout_seed += seed;
            const double e = nn::finite_diff_check(m, random_tensor(c.input, seed + 200),
                                                   nn::random_linear_loss(m.output_shape(), seed + 300), opts);
            if (e > worst) worst = e, worst_name = c.name;
        }

    // Transfer objective at 20 generic grids.
    transfer::TransferConfig cfg;
    cfg.n_filters = 16;
    cfg.filter_width = 3;
    cfg.alpha = 0.7;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cfg.net_seed = seed;
        const auto net = transfer::init_random_net(cfg, 12);
        auto grid = [&](std::uint64_t s) {
            std::mt19937_64 rng(s);
            std::normal_distribution<double> d(-3.0, 2.0);
            dsp::MagnitudeGrid g{Eigen::MatrixXd(12, 20), dsp::MagnitudeDomain::log};
            for (Eigen::Index i = 0; i < g.values.size(); ++i) g.values.data()[i] = d(rng);
            return g;
        };
        const auto x = grid(seed * 3), c = grid(seed * 3 + 1), s = grid(seed * 3 + 2);
        const Eigen::MatrixXd analytic = transfer::transfer_grad(x, c, s, net, cfg);
        std::mt19937_64 rng(seed);
        const double h = 1e-4;
        for (int k = 0; k < 40; ++k) {
            const auto idx = Eigen::Index(rng() % std::uint64_t(x.values.size()));
            auto xp = x, xm = x;
            xp.values.data()[idx] += h;
            xm.values.data()[idx] -= h;
            const double numeric = (transfer::transfer_loss(xp, c, s, net, cfg).total -
                                    transfer::transfer_loss(xm, c, s, net, cfg).total) /
                                   (2 * h);
            const double e = nn::relative_error(analytic.data()[idx], numeric);
            if (e > worst) worst = e, worst_name = "transfer_grad";
        }
    }
    const double secs = seconds_since(t0);
    return verdict(worst < 1e-4 && secs < 120.0,
                   fmt("max rel err %.2e (%s), %zu layer kinds + transfer_grad x 20 points, %.1f s", worst,
                       worst_name.c_str(), cases.size(), secs));
}

// --- 2: DSP round trip ------------------------------------------------------

Outcome dsp_round_trip() {
    const dsp::StftParams p{512, 128};
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        std::vector<double> x(8000 + 37 * seed);
        for (double& v : x) v = d(rng);
        const audio::Waveform w(x, 8000);
        const auto y = dsp::istft(dsp::stft(w, p));
        // Interior: one window in from either end.
        for (std::size_t i = p.window_size; i + p.window_size < x.size(); ++i)
            worst = std::max(worst, std::abs(y.data()[i] - x[i]));
    }
    const audio::Waveform sine(testing::sine(440.0, 8000, 16000), 8000);
    const auto mag = dsp::magnitude(dsp::stft(sine, p));
    const auto gl = dsp::griffin_lim(mag, p, 100, 7, 8000);
    std::size_t rises = 0;
    for (std::size_t i = 1; i < gl.consistency.size(); ++i)
        if (gl.consistency[i] > gl.consistency[i - 1] + 1e-9) ++rises;
    const double final_c = gl.consistency.back();
    return verdict(worst < 1e-6 && rises == 0 && final_c < 0.3,
                   fmt("istft(stft) interior err %.2e over 10 signals; griffin-lim rises %zu, final consistency %.4f",
                       worst, rises, final_c));
}

// --- 3: objective mechanics -------------------------------------------------

Outcome objective_mechanics() {
    corpus::SynthConfig sc;
    sc.sample_rate = 8000;
    sc.seconds = 1;
    sc.clips_per_class = 1;
    sc.seed = 5;
    const auto clips = corpus::synth_corpus(sc);
    transfer::TransferConfig cfg;
    cfg.n_filters = 64;
    cfg.filter_width = 5;
    cfg.iterations = 50;
    cfg.griffin_lim_iterations = 5;
    const dsp::StftParams p{256, 64};
    double identity = 0.0;
    for (double alpha : {0.0, 0.2, 3.0}) {
        cfg.alpha = alpha;
        const auto r = transfer::run_transfer(clips[0].audio, clips[2].audio, cfg, p);
        for (const auto& t : r.loss.trace)
            identity = std::max(identity, std::abs(t.total - (alpha * t.content + t.style)));
    }

    const auto net = transfer::init_random_net(cfg, p.n_bins());
    const auto g = dsp::log_magnitude(dsp::stft(clips[1].audio, p));
    cfg.alpha = 0.2;
    const auto same = transfer::transfer_loss(g, g, g, net, cfg);
    const bool zero_grad = transfer::transfer_grad(g, g, g, net, cfg).isZero(0.0);

    cfg.alpha = 0.0;
    const auto c = dsp::log_magnitude(dsp::stft(clips[0].audio, p));
    const auto s = dsp::log_magnitude(dsp::stft(clips[3].audio, p));
    const auto t0 = transfer::transfer_loss(g, c, s, net, cfg);
    const bool alpha0 = t0.total == t0.style && t0.content > 0.0;

    return verdict(identity <= 1e-9 && same.total == 0.0 && zero_grad && alpha0,
                   fmt("max |total - (a*content + style)| %.1e over 150 iterations; x=xc=xs loss %g, zero grad %s; "
                       "alpha=0 total==style %s",
                       identity, same.total, zero_grad ? "yes" : "no", alpha0 ? "yes" : "no"));
}

// --- 4: architecture --------------------------------------------------------

Outcome architecture() {
    const auto clf = eval::make_classifier(4, 1);
    const auto flat = nn::shape_size(clf.shape_after(eval::kClassifierFlattenLayer));
    const bool flatten_kind = clf.layer(eval::kClassifierFlattenLayer).spec.kind == nn::LayerKind::flatten;
    std::vector<double> rates;
    for (std::size_t i = 0; i < clf.size(); ++i)
        if (clf.layer(i).spec.kind == nn::LayerKind::dropout) rates.push_back(clf.layer(i).spec.rate);

    const auto ae = eval::make_autoencoder(2);
    const auto latent_shape = ae.shape_after(eval::kEncoderLayers - 1);
    const auto z = eval::embed(ae, random_tensor(ae.input_shape(), 3));
    const bool same_io = ae.output_shape() == ae.input_shape();

    const bool ok = flat == 6656 && flatten_kind && latent_shape == nn::Shape{15, 8, 8} && z.size() == 960 &&
                    rates == std::vector<double>{0.15, 0.2, 0.5} && same_io;
    return verdict(ok, fmt("flatten %zu, latent %s = %zu, dropout %.2f/%.2f/%.2f, ae output %s", flat,
                           nn::shape_string(latent_shape).c_str(), z.size(), rates.size() > 0 ? rates[0] : -1.0,
                           rates.size() > 1 ? rates[1] : -1.0, rates.size() > 2 ? rates[2] : -1.0,
                           nn::shape_string(ae.output_shape()).c_str()));
}

// --- shared synthetic evaluation (5-8) ----------------------------------------

// Desk profile: 8 kHz, 4 s clips, 512-point STFT, 512 random filters,
// 300 Adam steps, content init, alpha 0.2.
eval::PipelineConfig desk_profile() {
    eval::PipelineConfig pc;
    pc.sample_rate = 8000;
    pc.seconds = 4.0;
    pc.stft = {512, 128};
    pc.transfer.n_filters = 512;
    pc.transfer.iterations = 300;
    pc.transfer.alpha = 0.2;
    pc.classifier.epochs = 20;
    pc.classifier.seed = 1;
    pc.autoencoder.epochs = 20;
    pc.autoencoder.seed = 2;
    pc.n_pairs = 50;
    pc.pair_seed = 0;
    pc.split_seed = 0;
    pc.retrain = false;
    return pc;
}

std::vector<corpus::LabeledClip> desk_corpus() {
    corpus::SynthConfig sc;
    sc.sample_rate = 8000;
    sc.seconds = 4.0;
    sc.clips_per_class = 50;
    sc.seed = 1;
    return corpus::synth_corpus(sc);
}

struct Shared {
    eval::PipelineConfig cfg;
    eval::EvaluationRun run;
    double seconds = 0.0;
};

const Shared& shared() {
    static const Shared s = [] {
        Shared out;
        out.cfg = desk_profile();
        std::cerr << "running the synthetic evaluation (" << out.cfg.n_pairs << " pairs, "
                  << out.cfg.transfer.n_filters << " filters, " << out.cfg.transfer.iterations << " iterations)\n";
        const auto t0 = Clock::now();
        out.run = eval::run_evaluation(desk_corpus(), out.cfg);
        out.seconds = seconds_since(t0);
        return out;
    }();
    return s;
}

Outcome descent() {
    const auto& s = shared();
    std::size_t ok = 0, n = 0;
    double worst_ratio = 0.0, slowest = 0.0;
    for (const auto& rec : s.run.transfers) {
        if (n == 10) break;
        ++n;
        const auto& l = rec.result.loss;
        const double ratio = l.total / l.trace.front().total;
        worst_ratio = std::max(worst_ratio, ratio);
        if (ratio <= 0.5) ++ok;
        slowest = std::max(slowest, rec.result.optimize_seconds + rec.result.reconstruct_seconds);
    }
    return verdict(n == 10 && ok >= 9 && slowest < 300.0,
                   fmt("%zu/%zu pairs reach final <= 0.5 x first loss (worst ratio %.3f); slowest pair %.1f s "
                       "(512 filters, 300 iterations, alpha 0.2)",
                       ok, n, worst_ratio, slowest));
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return v[i] < v[j]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * double(i + j) + 1.0;
            i = j + 1;
        }
        return r;
    };
    const auto ra = ranks(a), rb = ranks(b);
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / double(ra.size());
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / double(rb.size());
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - mb) * (rb[i] - mb);
    }
    return num / std::sqrt(da * db);
}

Outcome alpha_controls_preservation() {
    const auto& s = shared();
    const std::vector<double> alphas{0.0, 0.1, 0.2, 0.5, 0.9};
    eval::PairSet ten;
    for (std::size_t i = 0; i < 10; ++i) {
        ten.clips.push_back(s.run.pairs.clips[i]);
        ten.content_ids.push_back(s.run.pairs.content_ids[i]);
        ten.style_ids.push_back(s.run.pairs.style_ids[i]);
        ten.content_labels.push_back(s.run.pairs.content_labels[i]);
        ten.style_labels.push_back(s.run.pairs.style_labels[i]);
    }
    auto cfg = s.cfg.transfer;
    cfg.init = transfer::InitMode::noise;
    const auto records = transfer::alpha_sweep(ten.clips, alphas, cfg, s.cfg.stft, s.cfg.workers);
    const auto& ae = s.run.autoencoder.model;
    auto e = [&](const audio::Waveform& w) { return eval::embed(ae, eval::clip_to_autoencoder_input(w, s.cfg.stft)); };
    std::vector<std::vector<double>> content_z;
    for (const auto& p : ten.clips) content_z.push_back(e(p.content));

    std::vector<double> med;
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        std::vector<double> d;
        for (std::size_t i = 0; i < ten.size(); ++i)
            d.push_back(eval::embedding_distance(e(records[a * ten.size() + i].result.generated), content_z[i]));
        med.push_back(eval::median(d));
    }
    std::size_t violations = 0;
    for (std::size_t i = 1; i < med.size(); ++i)
        if (med[i] > med[i - 1]) ++violations;
    const double rho = spearman(alphas, med);
    std::string series;
    for (std::size_t i = 0; i < med.size(); ++i) series += fmt("%s%g:%.3f", i ? " " : "", alphas[i], med[i]);
    return verdict(violations <= 1 && rho <= -0.7,
                   fmt("median d(x,xc) by alpha [%s]; spearman %.2f, %zu increases (noise init, 10 pairs)",
                       series.c_str(), rho, violations));
}

Outcome transfer_beats_mixing() {
    const auto& s = shared();
    const auto m = eval::medians(s.run.report.pairs);
    const std::size_t used = s.run.report.pairs.size() - m.flagged;
    return verdict(used >= 50 && m.ratio_content < 1.0 && m.ratio_style < 1.0,
                   fmt("median d(x,xc)/d(z,xc) %.3f, median d(x,xs)/d(z,xs) %.3f over %zu pairs (%zu flagged)",
                       m.ratio_content, m.ratio_style, used, m.flagged));
}

Outcome confusion_direction() {
    const auto& r = shared().run.report;
    return verdict(r.p0 >= 0.9 && r.pt_content <= r.pm_content,
                   fmt("P0 %.3f; content accuracy transfer %.3f vs mix %.3f (style %.3f vs %.3f)", r.p0,
                       r.pt_content, r.pm_content, r.pt_style, r.pm_style));
}

// --- 9: augmentation plumbing -------------------------------------------------

Outcome augmentation_plumbing() {
    corpus::SynthConfig sc;
    sc.sample_rate = 8000;
    sc.seconds = 2;
    sc.clips_per_class = 12;
    sc.seed = 9;
    const auto clips = corpus::synth_corpus(sc);
    const dsp::StftParams p{512, 128};
    const auto set = eval::classifier_set(clips, p);
    nn::TrainConfig tc;
    tc.epochs = 12;
    tc.batch_size = 8;
    tc.seed = 3;
    const auto base = eval::train_base_classifier(set, tc, 4);

    const auto empty = eval::retrain_with_augmentation(set, base, {}, tc);
    const bool zero = empty.value == 0.0 && empty.run.accuracy == base.accuracy;

    // Mixes of training clips, labelled with the content clip's class.
    std::set<std::size_t> test(base.split.test.begin(), base.split.test.end());
    std::vector<std::size_t> content, style;
    for (std::size_t i = 0; i < clips.size(); ++i) {
        if (test.count(i)) continue;
        (clips[i].role == corpus::Role::content ? content : style).push_back(i);
    }
    eval::Augmentation aug;
    for (std::size_t k = 0; k < 6; ++k) {
        const auto& c = clips[content[k]];
        const auto& st = clips[style[k]];
        aug.inputs.push_back(eval::clip_to_classifier_input(mixing::mix(c.audio, st.audio), p));
        aug.labels.push_back(std::size_t(c.class_id));
        aug.sources.push_back({c.id, st.id});
    }
    const auto filled = eval::retrain_with_augmentation(set, base, aug, tc);
    const bool arithmetic = filled.value == filled.run.accuracy - base.accuracy;

    auto leaky = aug;
    leaky.sources.back().push_back(clips[base.split.test.front()].id);
    bool rejected = false;
    try {
        eval::retrain_with_augmentation(set, base, leaky, tc);
    } catch (const DataError&) {
        rejected = true;
    }
    return verdict(zero && arithmetic && rejected,
                   fmt("empty: value %g (P1 %.4f, P0 %.4f); 6 mixes: value %.4f = P1 - P0 %s; leakage %s",
                       empty.value, empty.run.accuracy, base.accuracy, filled.value, arithmetic ? "yes" : "no",
                       rejected ? "rejected" : "NOT rejected"));
}

// --- 10: CLI determinism -------------------------------------------------------

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(ENVXFER_CLI_PATH) + " " + args + " >>" + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome cli_determinism(const fs::path& work) {
    const fs::path dir = work / "determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path log = dir / "cli.log";
    const fs::path cfg = dir / "config.json";
    std::ofstream(cfg) << R"({
  "seed": 11,
  "audio": {"rate": 8000, "seconds": 2},
  "stft": {"window_size": 512, "hop": 128},
  "transfer": {"n_filters": 128, "iterations": 60, "griffin_lim_iterations": 30},
  "eval": {"pairs": 4},
  "corpus": {"synth": {"clips_per_class": 4, "seed": 11}},
  "sweep": {"alphas": [0, 0.1, 0.2, 0.5, 0.9]}
})";
    const std::string base = "--config " + cfg.string() + " --corpus " + (dir / "corpus").string();
    int rc = run_cli("synth-corpus --out " + (dir / "synth").string() + " " + base, log);
    const int rc_a = rc == 0 ? run_cli("sweep-alpha --out " + (dir / "a").string() + " " + base, log) : rc;
    const int rc_b = rc == 0 ? run_cli("sweep-alpha --out " + (dir / "b").string() + " " + base, log) : rc;
    if (rc != 0 || rc_a != 0 || rc_b != 0)
        return verdict(false, fmt("cli exit codes %d/%d/%d, see %s", rc, rc_a, rc_b, log.c_str()));
    const auto a = slurp(dir / "a" / "sweep_alpha.csv"), b = slurp(dir / "b" / "sweep_alpha.csv");
    const auto rows = std::count(a.begin(), a.end(), '\n') - 1;
    return verdict(!a.empty() && a == b,
                   fmt("two sweep-alpha runs: %zu bytes, %ld rows, %s", a.size(), long(rows),
                       a == b ? "byte-identical" : "DIFFER"));
}

// --- 11: real dataset ------------------------------------------------------------

Outcome ingestion() {
    const char* root = std::getenv("URBANSOUND8K_ROOT");
    if (root == nullptr || *root == '\0') return {Outcome::skipped, "URBANSOUND8K_ROOT not set"};
    const fs::path meta = fs::path(root) / "metadata" / "UrbanSound8K.csv";
    const auto records = corpus::parse_metadata(meta);
    const auto counts = corpus::count_by_class(records);
    std::size_t mismatched = 0;
    for (const auto& ref : corpus::urbansound8k_reference()) {
        const auto it = counts.find(ref.class_id);
        if (it == counts.end() || it->second.foreground != ref.counts.foreground ||
            it->second.background != ref.counts.background)
            ++mismatched;
    }
    const auto rec = corpus::reconstruct_recordings(records, fs::path(root) / "audio", 8000, 0);
    return verdict(records.size() == corpus::kUrbanSoundClips && mismatched == 0 &&
                       rec.foreground.size() == corpus::kUrbanSoundForegroundRecordings &&
                       rec.background.size() == corpus::kUrbanSoundBackgroundRecordings,
                   fmt("%zu records, %zu classes off the reference counts, %zu foreground / %zu background recordings "
                       "(%zu clips missing)",
                       records.size(), mismatched, rec.foreground.size(), rec.background.size(), rec.skipped.size()));
}

std::set<int> parse_list(const std::string& s) {
    std::set<int> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.insert(std::stoi(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::string only, expected, report_path;
    std::string workdir = (fs::temp_directory_path() / ("envxfer_acceptance_" + std::to_string(::getpid()))).string();
    app.add_option("--only", only, "comma-separated criteria to run");
    app.add_option("--expected-failures", expected, "comma-separated criteria whose failure is documented");
    app.add_option("--workdir", workdir, "scratch directory");
    app.add_option("--report", report_path, "also write the result lines to this file");
    CLI11_PARSE(app, argc, argv);
    const auto selected = parse_list(only);
    const auto allowed = parse_list(expected);
    fs::create_directories(workdir);
    std::ofstream report;
    if (!report_path.empty()) report.open(report_path, std::ios::trunc);

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"gradient correctness", gradients},
        {"dsp round trip", dsp_round_trip},
        {"objective mechanics", objective_mechanics},
        {"architecture fidelity", architecture},
        {"optimization descent", descent},
        {"alpha controls preservation", alpha_controls_preservation},
        {"transfer beats mixing on preservation", transfer_beats_mixing},
        {"classifier confusion direction", confusion_direction},
        {"augmentation value plumbing", augmentation_plumbing},
        {"determinism", [&] { return cli_determinism(workdir); }},
        {"ingestion fidelity", ingestion},
    };

    int unexpected = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = int(i) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {Outcome::fail, std::string("exception: ") + e.what()};
        }
        const char* tag = o.status == Outcome::pass ? "PASS" : o.status == Outcome::fail ? "FAIL" : "SKIPPED";
        std::string note;
        if (o.status == Outcome::fail) {
            if (allowed.count(id)) note = " [expected failure]";
            else ++unexpected;
        }
        const std::string line = "criterion " + std::to_string(id) + " " + tag + " " + criteria[i].first + ": " +
                                 o.detail + fmt(" [%.1f s]", seconds_since(t0)) + note;
        std::cout << line << std::endl;
        if (report) report << line << std::endl;
    }
    fs::remove_all(workdir);
    return unexpected == 0 ? 0 : 1;
}
