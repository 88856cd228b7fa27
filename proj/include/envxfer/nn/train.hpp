#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "envxfer/error.hpp"
#include "envxfer/nn/loss.hpp"
#include "envxfer/nn/model.hpp"
#include "envxfer/nn/optimizer.hpp"

namespace envxfer::nn {

struct TrainConfig {
    int epochs = 30;
    std::size_t batch_size = 16;
    OptimizerKind optimizer = OptimizerKind::adam;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
    int patience = 10;

    void validate() const {
        if (epochs <= 0 || batch_size == 0) throw UsageError("train: epochs and batch size must be positive");
        if (!(learning_rate >= 0.0)) throw UsageError("train: learning rate must be non-negative");
        if (patience <= 0) throw UsageError("train: patience must be positive");
    }
};

/// Inputs with either class labels (cross-entropy) or target tensors (MSE).
struct Dataset {
    std::vector<Tensor> inputs;
    std::vector<std::size_t> labels;
    std::vector<Tensor> targets;

    std::size_t size() const noexcept { return inputs.size(); }
    bool empty() const noexcept { return inputs.empty(); }
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;  // 0 for regression losses
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    friend bool operator==(const EpochStats&, const EpochStats&) = default;
};

struct TrainResult {
    Model model;  // parameters from the best-validation epoch
    std::vector<EpochStats> history;
    int best_epoch = 0;
};

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a * 0x9E3779B97F4A7C15ull + b + 0x632BE59BD9B4E5ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace detail {

inline bool ends_in_softmax(const Model& m) { return m.layer(m.size() - 1).spec.kind == LayerKind::softmax; }

/// Loss for one sample; accumulates gradients into `g` when requested.
inline double sample_loss(const Model& model, const Dataset& d, std::size_t i, LossKind kind, ForwardOptions opts,
                          Gradients* g, bool* correct) {
    const Cache cache = forward(model, d.inputs[i], opts);
    if (kind == LossKind::cross_entropy) {
        const bool softmax_head = ends_in_softmax(model);
        const Tensor& logits = cache.activations[softmax_head ? model.size() - 1 : model.size()];
        auto lv = cross_entropy_from_logits(logits, d.labels[i]);
        if (correct) *correct = argmax(logits) == d.labels[i];
        if (g) backward_range(model, cache, std::move(lv.grad), softmax_head ? model.size() - 1 : model.size(), *g);
        return lv.value;
    }
    auto lv = mse(cache.output(), d.targets[i]);
    if (correct) *correct = false;
    if (g) backward_range(model, cache, std::move(lv.grad), model.size(), *g);
    return lv.value;
}

inline void check_dataset(const Dataset& d, LossKind kind, const std::string& name) {
    if (kind == LossKind::cross_entropy && d.labels.size() != d.inputs.size())
        throw DataError(name + ": labels do not match inputs");
    if (kind == LossKind::mse && d.targets.size() != d.inputs.size())
        throw DataError(name + ": targets do not match inputs");
}

}  // namespace detail

struct Evaluation {
    double loss = 0.0;
    double accuracy = 0.0;
};

/// Mean loss and accuracy in inference mode.
inline Evaluation evaluate(const Model& model, const Dataset& d, LossKind kind) {
    detail::check_dataset(d, kind, "evaluate");
    Evaluation e;
    if (d.empty()) return e;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        bool ok = false;
        e.loss += detail::sample_loss(model, d, i, kind, {}, nullptr, &ok);
        hits += ok;
    }
    e.loss /= double(d.size());
    e.accuracy = double(hits) / double(d.size());
    return e;
}

/// Mini-batch training with seeded per-epoch shuffling. Keeps the parameters
/// with the lowest validation loss (training loss if `val` is empty) and stops
/// after `patience` epochs without improvement.
inline TrainResult train(Model model, const Dataset& data, const Dataset& val, const TrainConfig& cfg, LossKind kind) {
    cfg.validate();
    if (data.empty()) throw DataError("train: empty dataset");
    detail::check_dataset(data, kind, "train");
    detail::check_dataset(val, kind, "validation");

    Optimizer opt(cfg.optimizer, cfg.learning_rate);
    std::mt19937_64 shuffle_rng(cfg.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    TrainResult result{model, {}, 0};
    double best = INFINITY;
    int since_best = 0;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            Gradients g = zero_gradients(model);
            for (std::size_t j = start; j < stop; ++j) {
                const ForwardOptions fo{true, mix_seed(cfg.seed, std::uint64_t(epoch) << 32 | j)};
                const double l = detail::sample_loss(model, data, order[j], kind, fo, &g, nullptr);
                if (!std::isfinite(l))
                    throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch) + ", sample " +
                                         std::to_string(order[j]) + " (batch starting " + std::to_string(start) +
                                         ")");
            }
            const double scale = 1.0 / double(stop - start);
            for (auto& layer : g.params)
                for (auto& t : layer)
                    for (double& v : t.data) v *= scale;
            opt.step(model, g);
        }
        const auto tr = evaluate(model, data, kind);
        const auto va = val.empty() ? tr : evaluate(model, val, kind);
        if (!std::isfinite(tr.loss) || !std::isfinite(va.loss))
            throw NumericalError("train: non-finite epoch loss at epoch " + std::to_string(epoch));
        result.history.push_back({epoch, tr.loss, tr.accuracy, va.loss, va.accuracy});
        if (va.loss < best) {
            best = va.loss;
            result.model = model;
            result.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    return result;
}

}  // namespace envxfer::nn
