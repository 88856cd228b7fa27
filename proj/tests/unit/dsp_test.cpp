#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "envxfer/dsp/fft.hpp"
#include "envxfer/dsp/griffin_lim.hpp"
#include "envxfer/dsp/magnitude.hpp"
#include "envxfer/dsp/stft.hpp"
#include "oracles.hpp"

using envxfer::audio::Waveform;
using envxfer::dsp::MagnitudeDomain;
using envxfer::dsp::MagnitudeGrid;
using envxfer::dsp::StftParams;

namespace {

std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> x(n);
    for (double& s : x) s = u(rng);
    return x;
}

}  // namespace

TEST(Fft, MatchesDirectDft) {
    const auto x = random_signal(64, 3);
    std::vector<envxfer::dsp::cplx> buf(x.begin(), x.end());
    envxfer::dsp::Fft(64).forward(buf);
    const auto ref = envxfer::testing::direct_dft(x);
    for (std::size_t k = 0; k < 64; ++k) EXPECT_LT(std::abs(buf[k] - ref[k]), 1e-10);
}

TEST(Stft, ZeroWaveformGivesZeroSpectrogram) {
    const auto s = envxfer::dsp::stft(Waveform(std::vector<double>(4096, 0.0), 22050), {});
    EXPECT_EQ(s.n_bins(), 513u);
    EXPECT_EQ(s.n_frames(), 13u);
    EXPECT_TRUE(s.frames.isZero(0.0));
}

TEST(Stft, FrameMatchesDirectWindowedDft) {
    const auto x = random_signal(2048, 5);
    const StftParams p{256, 64, envxfer::dsp::WindowKind::hann};
    const auto s = envxfer::dsp::stft(Waveform(x, 8000), p);
    const auto w = envxfer::testing::hann(256);
    for (std::size_t t : {0u, 7u, 20u}) {
        std::vector<double> seg(256);
        for (std::size_t i = 0; i < 256; ++i) seg[i] = x[t * 64 + i] * w[i];
        const auto ref = envxfer::testing::direct_dft(seg);
        for (std::size_t k = 0; k < p.n_bins(); ++k)
            EXPECT_LT(std::abs(s.frames(Eigen::Index(k), Eigen::Index(t)) - ref[k]), 1e-9);
    }
}

TEST(Stft, BinCenteredSineArgmax) {
    const int rate = 22050;
    const std::size_t k = 40;
    const double f = double(k) * rate / 1024.0;
    const auto s = envxfer::dsp::stft(Waveform(envxfer::testing::sine(f, rate, 22050), rate), {});
    for (Eigen::Index t = 1; t + 1 < s.frames.cols(); ++t) {
        Eigen::Index arg;
        s.frames.col(t).cwiseAbs().maxCoeff(&arg);
        EXPECT_EQ(arg, Eigen::Index(k));
    }
}

TEST(Stft, ImpulseAtStartIsFlatThenSilent) {
    // Periodic Hann is zero at n=0, so place the impulse at the window centre
    // of frame 0 instead and compare with the windowed-impulse DFT.
    std::vector<double> x(4096, 0.0);
    x[512] = 1.0;
    const auto s = envxfer::dsp::stft(Waveform(x, 22050), {});
    const auto first = s.frames.col(0).cwiseAbs();
    EXPECT_NEAR(first.minCoeff(), 1.0, 1e-12);
    EXPECT_NEAR(first.maxCoeff(), 1.0, 1e-12);
    for (Eigen::Index t = 4; t < s.frames.cols(); ++t) EXPECT_LT(s.frames.col(t).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Stft, RejectsShortWaveformAndBadParams) {
    EXPECT_THROW(envxfer::dsp::stft(Waveform(std::vector<double>(100, 0.0), 8000), {}), envxfer::DataError);
    EXPECT_THROW(envxfer::dsp::stft(Waveform(std::vector<double>(5000, 0.0), 8000), {1000, 250}),
                 envxfer::UsageError);
}

TEST(Istft, ColaValidation) {
    EXPECT_TRUE(envxfer::dsp::satisfies_cola({1024, 256}));
    EXPECT_TRUE(envxfer::dsp::satisfies_cola({512, 128}));
    EXPECT_FALSE(envxfer::dsp::satisfies_cola({1024, 512}));
    EXPECT_TRUE(envxfer::dsp::satisfies_cola({1024, 512, envxfer::dsp::WindowKind::rectangular}));
    auto s = envxfer::dsp::stft(Waveform(random_signal(4096, 1), 8000), {1024, 512});
    EXPECT_THROW(envxfer::dsp::istft(s), envxfer::UsageError);
}

TEST(Istft, ZeroSpectrogramGivesSilence) {
    envxfer::dsp::ComplexSpectrogram s;
    s.frames = Eigen::MatrixXcd::Zero(513, 10);
    const auto w = envxfer::dsp::istft(s);
    EXPECT_EQ(w.size(), 9u * 256u + 1024u);
    EXPECT_EQ(w.peak(), 0.0);
}

TEST(Istft, SineRoundTripInterior) {
    const auto x = envxfer::testing::sine(440.0, 22050, 22050);
    const auto back = envxfer::dsp::istft(envxfer::dsp::stft(Waveform(x, 22050), {}));
    double err = 0.0;
    for (std::size_t i = 1024; i + 1024 < back.size(); ++i) err = std::max(err, std::abs(back.samples()[i] - x[i]));
    EXPECT_LT(err, 1e-6);
}

TEST(Istft, SingleFrameOverlapAdd) {
    const auto seg = random_signal(256, 9);
    const auto w = envxfer::testing::hann(256);
    std::vector<double> windowed(256);
    for (std::size_t i = 0; i < 256; ++i) windowed[i] = seg[i] * w[i];
    const auto X = envxfer::testing::direct_dft(windowed);
    envxfer::dsp::ComplexSpectrogram s;
    s.params = {256, 64};
    s.frames.resize(129, 1);
    for (Eigen::Index k = 0; k < 129; ++k) s.frames(k, 0) = X[std::size_t(k)];
    const auto out = envxfer::dsp::istft(s);
    ASSERT_EQ(out.size(), 256u);
    // Direct formula: y[n] = w[n] * (w[n] seg[n]) / w[n]^2 wherever w[n] != 0.
    for (std::size_t i = 0; i < 256; ++i) {
        const double expected = w[i] * w[i] > 1e-10 ? w[i] * windowed[i] / (w[i] * w[i]) : 0.0;
        EXPECT_NEAR(out.samples()[i], expected, 1e-9);
    }
}

TEST(Istft, RandomRoundTripProperty) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto x = random_signal(8192 + seed * 301, seed);
        const StftParams p{512, 128};
        const auto back = envxfer::dsp::istft(envxfer::dsp::stft(Waveform(x, 16000), p));
        double err = 0.0;
        for (std::size_t i = 512; i + 512 < back.size(); ++i) err = std::max(err, std::abs(back.samples()[i] - x[i]));
        EXPECT_LT(err, 1e-6) << "seed " << seed;
    }
}

TEST(Stft, ParsevalForStationarySignal) {
    const auto x = random_signal(1 << 18, 13);
    const StftParams p{1024, 256};
    const auto s = envxfer::dsp::stft(Waveform(x, 22050), p);
    // One-sided spectrum: count interior bins twice.
    double spec_energy = 0.0;
    for (Eigen::Index t = 0; t < s.frames.cols(); ++t)
        for (Eigen::Index k = 0; k < s.frames.rows(); ++k) {
            const double e = std::norm(s.frames(k, t));
            spec_energy += (k == 0 || k == 512) ? e : 2.0 * e;
        }
    const auto w = envxfer::testing::hann(1024);
    double w2 = 0.0;
    for (double v : w) w2 += v * v;
    // Each sample is covered by frames whose squared windows sum to w2 / hop.
    const double factor = 1024.0 * w2 / 256.0;
    double energy = 0.0;
    const std::size_t covered = envxfer::dsp::signal_length(s.n_frames(), p);
    for (std::size_t i = 0; i < covered; ++i) energy += x[i] * x[i];
    // Edge samples are under-covered; on 2^18 samples that is well below 1%.
    EXPECT_NEAR(spec_energy / factor / energy, 1.0, 0.01);
}

TEST(LogMagnitude, FloorAndUnitPoints) {
    envxfer::dsp::ComplexSpectrogram s;
    s.frames = Eigen::MatrixXcd::Zero(3, 3);
    s.frames(1, 1) = 1.0 - 1e-5;
    s.frames(2, 2) = std::polar(std::exp(1.0) - 1e-5, 0.7);
    const auto g = envxfer::dsp::log_magnitude(s);
    EXPECT_EQ(g.domain, MagnitudeDomain::log);
    EXPECT_NEAR(g.values(0, 0), std::log(1e-5), 1e-12);
    EXPECT_NEAR(g.values(0, 0), -11.5129, 1e-4);
    EXPECT_NEAR(g.values(1, 1), 0.0, 1e-12);
    EXPECT_NEAR(g.values(2, 2), 1.0, 1e-12);
    const auto lin = envxfer::dsp::to_linear(g);
    EXPECT_NEAR(lin.values(2, 2), std::exp(1.0) - 1e-5, 1e-12);
    EXPECT_EQ(lin.values(0, 0), 0.0);
}

TEST(ResizeGrid, BilinearCentreByHand) {
    MagnitudeGrid g{Eigen::MatrixXd(2, 2), MagnitudeDomain::log};
    g.values << 0, 1, 2, 3;
    const auto raw = envxfer::dsp::bilinear_resize(g, 3, 3);
    EXPECT_DOUBLE_EQ(raw.data[4], 1.5);
    EXPECT_DOUBLE_EQ(raw.data[0], 0.0);
    EXPECT_DOUBLE_EQ(raw.data[8], 3.0);
    EXPECT_DOUBLE_EQ(raw.data[1], 0.5);
    const auto norm = envxfer::dsp::resize_grid(g, 3, 3);
    EXPECT_DOUBLE_EQ(norm.data[4], 0.5);
}

TEST(ResizeGrid, IdentityUpToNormalization) {
    MagnitudeGrid g{Eigen::MatrixXd::Random(5, 7), MagnitudeDomain::log};
    const auto t = envxfer::dsp::resize_grid(g, 5, 7);
    const double lo = g.values.minCoeff(), hi = g.values.maxCoeff();
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 7; ++j)
            EXPECT_NEAR(t.data[std::size_t(i * 7 + j)], (g.values(i, j) - lo) / (hi - lo), 1e-12);
}

TEST(ResizeGrid, ConstantGridNormalizesToZero) {
    MagnitudeGrid g{Eigen::MatrixXd::Constant(4, 4, -11.5), MagnitudeDomain::log};
    const auto t = envxfer::dsp::resize_grid(g, 6, 3);
    for (double v : t.data) EXPECT_EQ(v, 0.0);
}

TEST(ResizeGrid, RangeAndShapeProperty) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 25; ++trial) {
        const auto r = 2 + rng() % 40, c = 2 + rng() % 40;
        MagnitudeGrid g{Eigen::MatrixXd::Random(Eigen::Index(r), Eigen::Index(c)) * 10.0, MagnitudeDomain::log};
        const auto rows = 2 + rng() % 70, cols = 2 + rng() % 50;
        const auto t = envxfer::dsp::resize_grid(g, rows, cols);
        ASSERT_EQ(t.shape, (envxfer::nn::Shape{rows, cols}));
        for (double v : t.data) {
            ASSERT_GE(v, 0.0);
            ASSERT_LE(v, 1.0);
        }
    }
}

TEST(ResizeGrid, RejectsDegenerateGrids) {
    MagnitudeGrid g{Eigen::MatrixXd::Zero(1, 5), MagnitudeDomain::log};
    EXPECT_THROW(envxfer::dsp::resize_grid(g, 4, 4), envxfer::DataError);
    MagnitudeGrid ok{Eigen::MatrixXd::Zero(3, 5), MagnitudeDomain::log};
    EXPECT_THROW(envxfer::dsp::resize_grid(ok, 1, 4), envxfer::UsageError);
}

TEST(GriffinLim, SineMagnitudeConverges) {
    const int rate = 22050;
    const StftParams p{};
    const auto x = envxfer::testing::sine(440.0, rate, 2 * rate);
    const auto m = envxfer::dsp::magnitude(envxfer::dsp::stft(Waveform(x, rate), p));
    const auto r = envxfer::dsp::griffin_lim(m, p, 100, 1234, rate);
    ASSERT_EQ(r.consistency.size(), 100u);
    EXPECT_LT(r.consistency.back(), 0.3);
    for (std::size_t i = 1; i < r.consistency.size(); ++i)
        EXPECT_LE(r.consistency[i], r.consistency[i - 1] + 1e-9) << "step " << i;
}

TEST(GriffinLim, MoreIterationsNeverWorse) {
    const StftParams p{512, 128};
    const auto x = random_signal(8000, 77);
    const auto m = envxfer::dsp::magnitude(envxfer::dsp::stft(Waveform(x, 8000), p));
    const auto one = envxfer::dsp::griffin_lim(m, p, 1, 5, 8000);
    const auto fifty = envxfer::dsp::griffin_lim(m, p, 50, 5, 8000);
    EXPECT_EQ(one.consistency[0], fifty.consistency[0]);
    EXPECT_LE(fifty.consistency.back(), one.consistency.back());
}

TEST(GriffinLim, ZeroMagnitudeIsFlaggedSilence) {
    MagnitudeGrid m{Eigen::MatrixXd::Zero(513, 8), MagnitudeDomain::linear};
    const auto r = envxfer::dsp::griffin_lim(m, {}, 10, 1);
    EXPECT_TRUE(r.silent);
    EXPECT_EQ(r.waveform.peak(), 0.0);
    EXPECT_EQ(r.consistency, std::vector<double>(10, 0.0));
}

TEST(GriffinLim, DeterministicAndValidatesInputs) {
    const StftParams p{256, 64};
    const auto m = envxfer::dsp::magnitude(envxfer::dsp::stft(Waveform(random_signal(2000, 4), 8000), p));
    EXPECT_EQ(envxfer::dsp::griffin_lim(m, p, 5, 9).waveform, envxfer::dsp::griffin_lim(m, p, 5, 9).waveform);
    EXPECT_THROW(envxfer::dsp::griffin_lim(m, p, 0, 9), envxfer::UsageError);
    auto logm = m;
    logm.domain = MagnitudeDomain::log;
    EXPECT_THROW(envxfer::dsp::griffin_lim(logm, p, 5, 9), envxfer::UsageError);
}
