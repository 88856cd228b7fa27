#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "envxfer/error.hpp"

namespace envxfer::transfer {

enum class InitMode { content, noise };

inline std::string to_string(InitMode m) { return m == InitMode::content ? "content" : "noise"; }

inline InitMode init_mode_from_string(const std::string& s) {
    if (s == "content") return InitMode::content;
    if (s == "noise") return InitMode::noise;
    throw UsageError("unknown init mode '" + s + "' (expected content|noise)");
}

/// Hyperparameters of the joint objective alpha * L_content + L_style and
/// of the optimization that minimizes it.
struct TransferConfig {
    double alpha = 0.2;
    std::size_t n_filters = 4096;
    std::size_t filter_width = 11;
    int iterations = 300;
    double learning_rate = 0.05;
    InitMode init = InitMode::content;
    std::uint64_t net_seed = 1;
    std::uint64_t init_seed = 2;
    std::uint64_t griffin_lim_seed = 3;
    int griffin_lim_iterations = 100;
    // Layer index sets for the content and style terms; a single-layer
    // network uses layer 0 for both.
    std::vector<int> content_layers{0};
    std::vector<int> style_layers{0};

    void validate() const {
        if (!(alpha >= 0.0)) throw UsageError("transfer: alpha must be >= 0");
        if (n_filters < 1 || filter_width < 1) throw UsageError("transfer: n_filters and filter_width must be >= 1");
        if (iterations < 1) throw UsageError("transfer: iterations must be >= 1");
        if (!(learning_rate > 0.0)) throw UsageError("transfer: learning rate must be positive");
        if (griffin_lim_iterations < 1) throw UsageError("transfer: griffin-lim iterations must be >= 1");
        if (content_layers != std::vector<int>{0} || style_layers != std::vector<int>{0})
            throw UsageError("transfer: the random network has a single layer; content/style layers must be {0}");
    }
};

}  // namespace envxfer::transfer
