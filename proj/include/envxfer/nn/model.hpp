#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "envxfer/error.hpp"
#include "envxfer/nn/layer.hpp"
#include "envxfer/nn/tensor.hpp"

namespace envxfer::nn {

struct Layer {
    LayerSpec spec;
    Shape input_shape;
    Shape output_shape;
    std::vector<Tensor> params;  // weights, bias (parametric kinds only)
};

/// A feed-forward stack with its parameters. Copyable value type; every
/// parameter update bumps `version()` so stale caches are detectable.
class Model {
public:
    Model() = default;

    Model(Shape input_shape, const std::vector<LayerSpec>& specs, std::uint64_t seed)
        : input_shape_(std::move(input_shape)), seed_(seed) {
        if (specs.empty()) throw UsageError("model: no layers");
        Shape shape = input_shape_;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            Layer layer{specs[i], shape, infer_output_shape(specs[i], shape, i), {}};
            for (const auto& ps : param_shapes(specs[i], shape)) layer.params.emplace_back(ps);
            shape = layer.output_shape;
            layers_.push_back(std::move(layer));
        }
        initialize();
    }

    const Shape& input_shape() const noexcept { return input_shape_; }
    const Shape& output_shape() const noexcept { return layers_.back().output_shape; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t version() const noexcept { return version_; }
    std::size_t size() const noexcept { return layers_.size(); }
    const std::vector<Layer>& layers() const noexcept { return layers_; }
    const Layer& layer(std::size_t i) const { return layers_.at(i); }

    /// Mutable parameter access; invalidates outstanding caches.
    std::vector<Tensor>& params(std::size_t layer) {
        ++version_;
        return layers_.at(layer).params;
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers_)
            for (const auto& p : l.params) n += p.size();
        return n;
    }

    bool parameters_finite() const {
        for (const auto& l : layers_)
            for (const auto& p : l.params)
                if (!p.all_finite()) return false;
        return true;
    }

    /// Output shape of layer `i` (e.g. the flatten width of a classifier).
    const Shape& shape_after(std::size_t i) const { return layers_.at(i).output_shape; }

private:
    // He-normal where a ReLU follows, Glorot-normal otherwise; zero biases.
    void initialize() {
        std::mt19937_64 rng(seed_);
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            auto& l = layers_[i];
            if (!l.spec.has_params()) continue;
            const auto& w = l.params[0].shape;
            std::size_t fan_out = w.back();
            std::size_t fan_in = shape_size(w) / fan_out;
            bool relu_next = false;
            for (std::size_t j = i + 1; j < layers_.size(); ++j) {
                const auto k = layers_[j].spec.kind;
                if (k == LayerKind::dropout) continue;
                relu_next = k == LayerKind::relu;
                break;
            }
            const double std_dev =
                relu_next ? std::sqrt(2.0 / double(fan_in)) : std::sqrt(2.0 / double(fan_in + fan_out));
            std::normal_distribution<double> dist(0.0, std_dev);
            for (double& v : l.params[0].data) v = dist(rng);
            l.params[1].fill(0.0);
        }
    }

    Shape input_shape_;
    std::vector<Layer> layers_;
    std::uint64_t seed_ = 0;
    std::uint64_t version_ = 0;
};

struct ForwardOptions {
    bool training = false;
    std::uint64_t dropout_seed = 0;
};

/// Activations of every layer plus the routing state backward needs.
struct Cache {
    std::vector<Tensor> activations;  // [0] = input, [i + 1] = output of layer i
    std::vector<std::vector<std::size_t>> argmax;
    std::vector<std::vector<double>> masks;
    std::uint64_t model_version = 0;
    std::size_t layer_count = 0;
    bool training = false;

    const Tensor& output() const { return activations.back(); }
};

struct Gradients {
    std::vector<std::vector<Tensor>> params;  // mirrors Model layers' params
    Tensor input;
};

inline Gradients zero_gradients(const Model& m) {
    Gradients g;
    for (const auto& l : m.layers()) {
        std::vector<Tensor> gl;
        for (const auto& p : l.params) gl.emplace_back(p.shape);
        g.params.push_back(std::move(gl));
    }
    g.input = Tensor(m.input_shape());
    return g;
}

inline std::vector<double> dropout_mask(std::size_t n, double rate, std::uint64_t seed, std::size_t layer) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + layer + 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> mask(n);
    const double keep = 1.0 / (1.0 - rate);
    for (double& m : mask) m = u(rng) < rate ? 0.0 : keep;
    return mask;
}

inline Cache forward(const Model& model, const Tensor& input, ForwardOptions opts = {}) {
    if (input.shape != model.input_shape())
        throw UsageError("forward: layer 0 expects input " + shape_string(model.input_shape()) + ", got " +
                         shape_string(input.shape));
    Cache cache;
    cache.model_version = model.version();
    cache.layer_count = model.size();
    cache.training = opts.training;
    cache.activations.reserve(model.size() + 1);
    cache.activations.push_back(input);
    cache.argmax.resize(model.size());
    cache.masks.resize(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        const Layer& l = model.layer(i);
        const Tensor& x = cache.activations.back();
        Tensor y(l.output_shape);
        switch (l.spec.kind) {
            case LayerKind::conv2d_valid:
            case LayerKind::conv2d_same: kernels::conv2d_forward(l.spec, x, l.params, y); break;
            case LayerKind::conv1d_valid: kernels::conv1d_forward(l.spec, x, l.params, y); break;
            case LayerKind::dense: kernels::dense_forward(x, l.params, y); break;
            case LayerKind::maxpool2: kernels::maxpool2_forward(x, y, cache.argmax[i]); break;
            case LayerKind::upsample2: kernels::upsample2_forward(x, y); break;
            case LayerKind::relu:
                for (std::size_t j = 0; j < x.size(); ++j) y.data[j] = x.data[j] > 0.0 ? x.data[j] : 0.0;
                break;
            case LayerKind::sigmoid:
                for (std::size_t j = 0; j < x.size(); ++j) y.data[j] = 1.0 / (1.0 + std::exp(-x.data[j]));
                break;
            case LayerKind::softmax: kernels::softmax_forward(x, y); break;
            case LayerKind::dropout:
                if (opts.training && l.spec.rate > 0.0) {
                    cache.masks[i] = dropout_mask(x.size(), l.spec.rate, opts.dropout_seed, i);
                    for (std::size_t j = 0; j < x.size(); ++j) y.data[j] = x.data[j] * cache.masks[i][j];
                } else {
                    y.data = x.data;
                }
                break;
            case LayerKind::flatten: y.data = x.data; break;
        }
        cache.activations.push_back(std::move(y));
    }
    return cache;
}

inline Tensor predict(const Model& model, const Tensor& input) { return forward(model, input).output(); }

/// Backpropagates `grad` (w.r.t. the output of layer end - 1) down to the input,
/// accumulating parameter gradients into `g`.
inline void backward_range(const Model& model, const Cache& cache, Tensor grad, std::size_t end, Gradients& g) {
    if (cache.layer_count != model.size() || cache.model_version != model.version() ||
        cache.activations.size() != model.size() + 1)
        throw UsageError("backward: cache is stale or belongs to a different model");
    if (end > model.size() || end == 0) throw UsageError("backward: bad layer range");
    if (grad.shape != cache.activations[end].shape)
        throw UsageError("backward: gradient shape " + shape_string(grad.shape) + " does not match layer " +
                         std::to_string(end - 1) + " output " + shape_string(cache.activations[end].shape));
    for (std::size_t i = end; i-- > 0;) {
        const Layer& l = model.layer(i);
        const Tensor& x = cache.activations[i];
        const Tensor& y = cache.activations[i + 1];
        Tensor dx(l.input_shape);
        switch (l.spec.kind) {
            case LayerKind::conv2d_valid:
            case LayerKind::conv2d_same: kernels::conv2d_backward(l.spec, x, l.params, grad, dx, g.params[i]); break;
            case LayerKind::conv1d_valid: kernels::conv1d_backward(l.spec, x, l.params, grad, dx, g.params[i]); break;
            case LayerKind::dense: kernels::dense_backward(x, l.params, grad, dx, g.params[i]); break;
            case LayerKind::maxpool2:
                for (std::size_t j = 0; j < grad.size(); ++j) dx.data[cache.argmax[i][j]] += grad.data[j];
                break;
            case LayerKind::upsample2: kernels::upsample2_backward(grad, dx); break;
            case LayerKind::relu:
                for (std::size_t j = 0; j < x.size(); ++j) dx.data[j] = x.data[j] > 0.0 ? grad.data[j] : 0.0;
                break;
            case LayerKind::sigmoid:
                for (std::size_t j = 0; j < x.size(); ++j) dx.data[j] = grad.data[j] * y.data[j] * (1.0 - y.data[j]);
                break;
            case LayerKind::softmax: kernels::softmax_backward(y, grad, dx); break;
            case LayerKind::dropout:
                if (!cache.masks[i].empty()) {
                    for (std::size_t j = 0; j < x.size(); ++j) dx.data[j] = grad.data[j] * cache.masks[i][j];
                } else {
                    dx.data = grad.data;
                }
                break;
            case LayerKind::flatten: dx.data = grad.data; break;
        }
        grad = std::move(dx);
    }
    g.input = std::move(grad);
}

inline Gradients backward(const Model& model, const Cache& cache, const Tensor& loss_grad) {
    Gradients g = zero_gradients(model);
    backward_range(model, cache, loss_grad, model.size(), g);
    return g;
}

}  // namespace envxfer::nn
