#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "envxfer/audio/wav.hpp"
#include "envxfer/csv.hpp"

namespace fs = std::filesystem;

namespace {

// Small enough that each invocation finishes in well under a second.
const std::string kFast =
    " --rate 8000 --seconds 1 --window-size 256 --hop 64 --n-filters 16 --filter-width 3"
    " --iterations 5 --gl-iterations 5";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

class Cli : public ::testing::Test {
protected:
    static fs::path root;
    static fs::path corpus;

    static void SetUpTestSuite() {
        root = fs::temp_directory_path() / ("envxfer_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(root);
        fs::create_directories(root);
        corpus = root / "corpus";
        ASSERT_EQ(invoke("synth-corpus --out " + (root / "synth").string() + " --corpus " + corpus.string() +
                         " --rate 8000 --seconds 1 --clips-per-class 3"),
                  0);
    }
    static void TearDownTestSuite() { fs::remove_all(root); }

    static int invoke(const std::string& args) {
        const std::string cmd = std::string(ENVXFER_CLI_PATH) + " " + args + " >" + (root / "stdout.txt").string() +
                                " 2>" + (root / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    static std::string stderr_text() { return slurp(root / "stderr.txt"); }

    static fs::path clip(const std::string& id) { return corpus / (id + ".wav"); }
};

fs::path Cli::root;
fs::path Cli::corpus;

}  // namespace

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(invoke("--help"), 0); }

TEST_F(Cli, MissingSubcommandIsUsageError) { EXPECT_EQ(invoke(""), 1); }

TEST_F(Cli, UnknownFlagIsUsageError) { EXPECT_EQ(invoke("mix --frobnicate 3"), 1); }

TEST_F(Cli, SynthCorpusWritesLabelsAndManifest) {
    EXPECT_TRUE(fs::exists(corpus / "labels.csv"));
    const auto t = envxfer::read_csv(corpus / "labels.csv");
    EXPECT_EQ(t.rows.size(), 4u * 3u);
    const auto m = manifest(root / "synth");
    EXPECT_EQ(m["command"], "synth-corpus");
    EXPECT_EQ(m["exit_code"], 0);
    EXPECT_EQ(m["results"]["clips"], 12);
}

TEST_F(Cli, UnknownConfigKeyIsUsageErrorAndNamesTheKey) {
    const auto cfg = root / "bad.json";
    std::ofstream(cfg) << R"({"transfer": {"alpah": 0.3}})";
    const auto out = root / "badcfg";
    EXPECT_EQ(invoke("mix --config " + cfg.string() + " --out " + out.string() + " --content " +
                     clip("pulse_a_000").string() + " --style " + clip("texture_a_000").string()),
              1);
    EXPECT_NE(stderr_text().find("transfer.alpah"), std::string::npos) << stderr_text();
}

TEST_F(Cli, MissingInputIsDataErrorAndManifestRecordsIt) {
    const auto out = root / "missing";
    EXPECT_EQ(invoke("mix --out " + out.string() + " --content " + (root / "nope.wav").string() + " --style " +
                     clip("texture_a_000").string()),
              2);
    const auto m = manifest(out);
    EXPECT_EQ(m["exit_code"], 2);
    EXPECT_FALSE(m["error"].get<std::string>().empty());
}

TEST_F(Cli, DivergingOptimizationIsNumericalError) {
    const auto out = root / "diverge";
    EXPECT_EQ(invoke("transfer --out " + out.string() + kFast + " --lr 1e300 --content " +
                     clip("pulse_a_000").string() + " --style " + clip("texture_a_000").string()),
              3);
    EXPECT_EQ(manifest(out)["exit_code"], 3);
}

TEST_F(Cli, InvalidTransferSettingIsUsageError) {
    EXPECT_EQ(invoke("transfer --out " + (root / "neg").string() + kFast + " --alpha -1 --content " +
                     clip("pulse_a_000").string() + " --style " + clip("texture_a_000").string()),
              1);
}

TEST_F(Cli, TransferWritesAudioTraceAndRecord) {
    const auto out = root / "transfer";
    ASSERT_EQ(invoke("transfer --out " + out.string() + kFast + " --content " + clip("pulse_a_000").string() +
                     " --style " + clip("texture_b_001").string()),
              0)
        << stderr_text();
    const auto w = envxfer::audio::read_wav(out / "generated.wav");
    EXPECT_EQ(w.sample_rate(), 8000);
    EXPECT_EQ(w.size(), 8000u);
    EXPECT_EQ(envxfer::read_csv(out / "loss_trace.csv").rows.size(), 5u);
    const auto m = manifest(out);
    EXPECT_EQ(m["config"]["transfer"]["n_filters"], 16);
    EXPECT_LE(m["results"]["transfer"]["final_total"].get<double>(),
              m["results"]["transfer"]["initial_total"].get<double>());
}

TEST_F(Cli, MixWritesBoundedAudio) {
    const auto out = root / "mix";
    ASSERT_EQ(invoke("mix --out " + out.string() + " --rate 8000 --seconds 1 --content " +
                     clip("pulse_b_002").string() + " --style " + clip("texture_a_001").string()),
              0)
        << stderr_text();
    const auto w = envxfer::audio::read_wav(out / "mixed.wav");
    EXPECT_EQ(w.size(), 8000u);
    for (double s : w.samples()) EXPECT_LE(std::abs(s), 0.95 + 1e-4);
}

TEST_F(Cli, PairsAreCrossClassAndCounted) {
    const auto out = root / "pairs";
    ASSERT_EQ(invoke("pairs --out " + out.string() + " --rate 8000 --seconds 1 --pairs 5 --corpus " +
                     corpus.string()),
              0)
        << stderr_text();
    const auto t = envxfer::read_csv(out / "pairs.csv");
    ASSERT_EQ(t.rows.size(), 5u);
    for (const auto& r : t.rows) EXPECT_NE(r[t.column("content_class")], r[t.column("style_class")]);
}

TEST_F(Cli, SweepAlphaIsByteIdenticalAcrossRunsAndWorkerCounts) {
    const auto a = root / "sweep_a", b = root / "sweep_b";
    const std::string args = kFast + " --pairs 2 --corpus " + corpus.string();
    ASSERT_EQ(invoke("sweep-alpha --alphas 0 0.5 --out " + a.string() + args + " --workers 1"), 0) << stderr_text();
    ASSERT_EQ(invoke("sweep-alpha --alphas 0 0.5 --out " + b.string() + args + " --workers 2"), 0) << stderr_text();
    const auto csv = slurp(a / "sweep_alpha.csv");
    EXPECT_EQ(csv, slurp(b / "sweep_alpha.csv"));
    EXPECT_EQ(envxfer::read_csv(a / "sweep_alpha.csv").rows.size(), 4u);
}

TEST_F(Cli, SweepWidthThenReportGroupsByWidth) {
    const auto sw = root / "sweep_w";
    ASSERT_EQ(invoke("sweep-width --widths 2 4 --out " + sw.string() + kFast + " --pairs 2 --corpus " +
                     corpus.string()),
              0)
        << stderr_text();
    const auto rp = root / "report";
    ASSERT_EQ(invoke("report --out " + rp.string() + " --input " + (sw / "sweep_width.csv").string()), 0)
        << stderr_text();
    const auto t = envxfer::read_csv(rp / "report.csv");
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0][t.column("filter_width")], "2");
    EXPECT_EQ(t.rows[1][t.column("filter_width")], "4");
    EXPECT_EQ(t.rows[0][t.column("rows")], "2");
    EXPECT_TRUE(t.has_column("median_final_total"));
}

TEST_F(Cli, ReportWithoutInputIsUsageError) { EXPECT_EQ(invoke("report"), 1); }

TEST_F(Cli, IngestWithoutDatasetIsUsageError) {
    const std::string cmd = "env -u URBANSOUND8K_ROOT " + std::string(ENVXFER_CLI_PATH) + " ingest --out " +
                            (root / "ingest").string() + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 1);
}
