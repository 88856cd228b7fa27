#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Core>

#include "envxfer/dsp/magnitude.hpp"
#include "envxfer/error.hpp"
#include "envxfer/nn/tensor.hpp"
#include "envxfer/transfer/config.hpp"

namespace envxfer::transfer {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Frozen single-layer network: n_filters 1-D filters spanning `filter_width`
/// frames, with every frequency bin as an input channel. Never trained.
class RandomConvNet {
public:
    RandomConvNet(std::size_t n_filters, std::size_t filter_width, std::size_t n_bins, std::uint64_t seed)
        : width_(filter_width), bins_(n_bins), seed_(seed),
          weights_(Eigen::Index(n_filters), Eigen::Index(filter_width * n_bins)) {
        if (n_filters < 1 || filter_width < 1 || n_bins < 1) throw UsageError("random net: dimensions must be >= 1");
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / double(filter_width * n_bins)));
        for (Eigen::Index i = 0; i < weights_.size(); ++i) weights_.data()[i] = dist(rng);
    }

    std::size_t n_filters() const noexcept { return std::size_t(weights_.rows()); }
    std::size_t filter_width() const noexcept { return width_; }
    std::size_t n_bins() const noexcept { return bins_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// Row k holds filter k; column j * n_bins + b is frame offset j, bin b.
    const RowMatrix& weights() const noexcept { return weights_; }
    RowMatrix& weights() noexcept { return weights_; }

    /// Filters as an (n_filters x filter_width x n_bins) tensor.
    nn::Tensor filters() const {
        return nn::Tensor({n_filters(), width_, bins_},
                          std::vector<double>(weights_.data(), weights_.data() + weights_.size()));
    }

private:
    std::size_t width_;
    std::size_t bins_;
    std::uint64_t seed_;
    RowMatrix weights_;
};

inline RandomConvNet init_random_net(const TransferConfig& cfg, std::size_t n_bins) {
    return RandomConvNet(cfg.n_filters, cfg.filter_width, n_bins, cfg.net_seed);
}

/// Post-ReLU activations, n_filters x n_positions.
struct ActivationMap {
    Eigen::MatrixXd values;
    Eigen::MatrixXd pre_activation;

    std::size_t n_filters() const noexcept { return std::size_t(values.rows()); }
    std::size_t n_positions() const noexcept { return std::size_t(values.cols()); }
    /// Node count of the layer (filters x positions).
    std::size_t node_count() const noexcept { return std::size_t(values.size()); }
};

/// Zero-copy view of the patch matrix: column p stacks frames p..p+width-1.
inline auto patch_view(const Eigen::MatrixXd& grid, std::size_t width) {
    const auto bins = grid.rows();
    const auto positions = grid.cols() - Eigen::Index(width) + 1;
    return Eigen::Map<const Eigen::MatrixXd, 0, Eigen::OuterStride<>>(grid.data(), bins * Eigen::Index(width),
                                                                      positions, Eigen::OuterStride<>(bins));
}

inline void check_grid(const RandomConvNet& net, const Eigen::MatrixXd& grid) {
    if (std::size_t(grid.rows()) != net.n_bins())
        throw DataError("features: grid has " + std::to_string(grid.rows()) + " bins, network expects " +
                        std::to_string(net.n_bins()));
    if (std::size_t(grid.cols()) < net.filter_width())
        throw DataError("features: " + std::to_string(grid.cols()) + " frames is fewer than the filter width " +
                        std::to_string(net.filter_width()));
}

/// Valid 1-D convolution along time followed by ReLU.
inline ActivationMap extract_features(const RandomConvNet& net, const Eigen::MatrixXd& grid) {
    check_grid(net, grid);
    ActivationMap f;
    f.pre_activation.noalias() = net.weights() * patch_view(grid, net.filter_width());
    f.values = f.pre_activation.cwiseMax(0.0);
    return f;
}

inline ActivationMap extract_features(const RandomConvNet& net, const dsp::MagnitudeGrid& grid) {
    return extract_features(net, grid.values);
}

/// Filter co-activation matrix F F^T averaged over positions. Symmetric PSD.
inline Eigen::MatrixXd gram(const ActivationMap& f) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(f.values.rows(), f.values.rows());
    if (f.values.cols() == 0) return g;
    g.selfadjointView<Eigen::Lower>().rankUpdate(f.values, 1.0 / double(f.values.cols()));
    g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
    return g;
}

}  // namespace envxfer::transfer
