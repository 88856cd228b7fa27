#pragma once

#include <chrono>
#include <cmath>
#include <random>
#include <span>
#include <string>

#include "envxfer/audio/waveform.hpp"
#include "envxfer/dsp/griffin_lim.hpp"
#include "envxfer/dsp/magnitude.hpp"
#include "envxfer/dsp/stft.hpp"
#include "envxfer/error.hpp"
#include "envxfer/nn/optimizer.hpp"
#include "envxfer/transfer/config.hpp"
#include "envxfer/transfer/features.hpp"
#include "envxfer/transfer/objective.hpp"

namespace envxfer::transfer {

/// Raised when the loss turns non-finite mid-run; carries the trace so far.
class TransferAborted : public NumericalError {
public:
    TransferAborted(const std::string& what, LossBreakdown partial)
        : NumericalError(what), partial_(std::move(partial)) {}
    const LossBreakdown& partial() const noexcept { return partial_; }

private:
    LossBreakdown partial_;
};

struct TransferResult {
    audio::Waveform generated;
    dsp::MagnitudeGrid x_final;  // log domain
    dsp::MagnitudeGrid content_grid;
    LossBreakdown loss;
    std::vector<double> griffin_lim_consistency;
    double optimize_seconds = 0.0;
    double reconstruct_seconds = 0.0;
};

/// Starting point of the optimization. Noise init draws i.i.d. Gaussians
/// matching the content grid's mean and standard deviation.
inline Eigen::MatrixXd initial_grid(const Eigen::MatrixXd& content, const TransferConfig& cfg) {
    if (cfg.init == InitMode::content) return content;
    const double mean = content.mean();
    const double sd = std::sqrt((content.array() - mean).square().mean());
    std::mt19937_64 rng(cfg.init_seed);
    std::normal_distribution<double> dist(mean, sd > 0.0 ? sd : 1.0);
    Eigen::MatrixXd x(content.rows(), content.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = dist(rng);
    return x;
}

/// Optimizes the log-magnitude grid with Adam against an existing objective.
inline Eigen::MatrixXd optimize_grid(const TransferObjective& objective, Eigen::MatrixXd x, const TransferConfig& cfg,
                                     LossBreakdown& loss) {
    nn::Optimizer adam(nn::OptimizerKind::adam, cfg.learning_rate);
    Eigen::MatrixXd grad;
    loss.trace.reserve(std::size_t(cfg.iterations));
    for (int it = 0; it < cfg.iterations; ++it) {
        const LossTerms t = objective.evaluate(x, &grad);
        if (!std::isfinite(t.total) || !grad.allFinite())
            throw TransferAborted("transfer: non-finite loss at iteration " + std::to_string(it + 1), loss);
        loss.trace.push_back(t);
        adam.step({std::span<double>(x.data(), std::size_t(x.size()))},
                  {std::span<const double>(grad.data(), std::size_t(grad.size()))});
    }
    const LossTerms final_terms = objective.evaluate(x);
    if (!std::isfinite(final_terms.total))
        throw TransferAborted("transfer: non-finite loss after the final step", loss);
    loss.total = final_terms.total;
    loss.content = final_terms.content;
    loss.style = final_terms.style;
    return x;
}

/// Transfers the texture statistics of `style` onto `content`: log-magnitude
/// spectrograms, Adam on the grid, exponentiation, Griffin-Lim. The output is
/// padded to the content length and peak-limited to 0.99.
inline TransferResult run_transfer(const audio::Waveform& content, const audio::Waveform& style,
                                   const TransferConfig& cfg, const dsp::StftParams& stft_params) {
    cfg.validate();
    if (content.size() != style.size() || content.sample_rate() != style.sample_rate())
        throw DataError("transfer: content and style must be standardized to the same rate and length");
    const auto clock = std::chrono::steady_clock::now;
    const auto t0 = clock();

    TransferResult r;
    r.content_grid = dsp::log_magnitude(dsp::stft(content, stft_params));
    const auto style_grid = dsp::log_magnitude(dsp::stft(style, stft_params));
    const RandomConvNet net = init_random_net(cfg, stft_params.n_bins());
    const TransferObjective objective(net, r.content_grid.values, style_grid.values, cfg.alpha);
    r.x_final = {optimize_grid(objective, initial_grid(r.content_grid.values, cfg), cfg, r.loss),
                 dsp::MagnitudeDomain::log};
    const auto t1 = clock();

    auto gl = dsp::griffin_lim(dsp::to_linear(r.x_final), stft_params, cfg.griffin_lim_iterations,
                               cfg.griffin_lim_seed, content.sample_rate());
    r.griffin_lim_consistency = std::move(gl.consistency);
    std::vector<double> samples(gl.waveform.data());
    samples.resize(content.size(), 0.0);
    r.generated = audio::peak_limit(audio::Waveform(std::move(samples), content.sample_rate()), 0.99);
    r.optimize_seconds = std::chrono::duration<double>(t1 - t0).count();
    r.reconstruct_seconds = std::chrono::duration<double>(clock() - t1).count();
    return r;
}

}  // namespace envxfer::transfer
