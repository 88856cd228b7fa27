#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "envxfer/error.hpp"
#include "envxfer/nn/tensor.hpp"

namespace envxfer::nn {

enum class LossKind { cross_entropy, mse };

struct LossValue {
    double value = 0.0;
    Tensor grad;  // d value / d (the tensor the loss was evaluated on)
};

/// Cross-entropy from unnormalized logits, max-subtracted. The gradient is
/// taken with respect to the logits (softmax - onehot).
inline LossValue cross_entropy_from_logits(const Tensor& logits, std::size_t label) {
    if (logits.rank() != 1) throw UsageError("cross_entropy: expects a flat logit vector");
    if (label >= logits.size())
        throw DataError("cross_entropy: label " + std::to_string(label) + " outside " + std::to_string(logits.size()) +
                        " classes");
    double mx = logits.data[0];
    for (double v : logits.data) mx = std::max(mx, v);
    double sum = 0.0;
    for (double v : logits.data) sum += std::exp(v - mx);
    const double log_z = mx + std::log(sum);
    LossValue out{log_z - logits.data[label], Tensor(logits.shape)};
    for (std::size_t i = 0; i < logits.size(); ++i) out.grad.data[i] = std::exp(logits.data[i] - log_z);
    out.grad.data[label] -= 1.0;
    return out;
}

/// Mean squared error over all entries.
inline LossValue mse(const Tensor& output, const Tensor& target) {
    if (output.shape != target.shape)
        throw UsageError("mse: output " + shape_string(output.shape) + " vs target " + shape_string(target.shape));
    const double n = double(output.size());
    LossValue out{0.0, Tensor(output.shape)};
    for (std::size_t i = 0; i < output.size(); ++i) {
        const double d = output.data[i] - target.data[i];
        out.value += d * d;
        out.grad.data[i] = 2.0 * d / n;
    }
    out.value /= n;
    return out;
}

inline std::size_t argmax(const Tensor& t) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < t.size(); ++i)
        if (t.data[i] > t.data[best]) best = i;
    return best;
}

}  // namespace envxfer::nn
