#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "envxfer/nn/model.hpp"

namespace envxfer::nn {

/// Scalar loss of a model output; fills `grad` with d loss / d output.
using OutputLoss = std::function<double(const Tensor& output, Tensor& grad)>;

inline double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

struct GradCheckOptions {
    double h = 1e-4;
    std::size_t min_coordinates = 100;
    std::uint64_t seed = 0;
    ForwardOptions forward;  // training mode + fixed dropout seed hold masks fixed
};

/// Compares analytic gradients (parameters and input) with central
/// differences over a seeded random subsample of coordinates. Returns the
/// largest relative error, denominator max(|a|, |b|, 1e-8).
inline double finite_diff_check(Model& model, const Tensor& input, const OutputLoss& loss, GradCheckOptions opts = {}) {
    auto eval = [&](const Tensor& x) {
        const auto c = forward(model, x, opts.forward);
        Tensor g(c.output().shape);
        return loss(c.output(), g);
    };
    const auto cache = forward(model, input, opts.forward);
    Tensor out_grad(cache.output().shape);
    loss(cache.output(), out_grad);
    const Gradients analytic = backward(model, cache, out_grad);

    // Coordinate = (slot, index); slot 0 is the input, slot s > 0 enumerates parameter tensors.
    struct Slot {
        std::size_t layer;
        std::size_t param;
        std::size_t size;
    };
    std::vector<Slot> slots{{0, 0, input.size()}};
    for (std::size_t i = 0; i < model.size(); ++i)
        for (std::size_t j = 0; j < model.layer(i).params.size(); ++j)
            slots.push_back({i, j, model.layer(i).params[j].size()});
    std::vector<std::pair<std::size_t, std::size_t>> coords;
    for (std::size_t s = 0; s < slots.size(); ++s)
        for (std::size_t k = 0; k < slots[s].size; ++k) coords.emplace_back(s, k);
    std::mt19937_64 rng(opts.seed);
    std::shuffle(coords.begin(), coords.end(), rng);
    // Every slot gets at least one coordinate so no parameter tensor escapes.
    std::vector<std::pair<std::size_t, std::size_t>> picked;
    std::vector<bool> seen(slots.size(), false);
    for (const auto& c : coords)
        if (!seen[c.first]) {
            seen[c.first] = true;
            picked.push_back(c);
        }
    for (const auto& c : coords) {
        if (picked.size() >= std::max(opts.min_coordinates, slots.size())) break;
        if (std::find(picked.begin(), picked.end(), c) == picked.end()) picked.push_back(c);
    }

    double worst = 0.0;
    for (const auto& [s, k] : picked) {
        double a = 0.0, numeric = 0.0;
        if (s == 0) {
            a = analytic.input.data[k];
            Tensor xp = input, xm = input;
            xp.data[k] += opts.h;
            xm.data[k] -= opts.h;
            numeric = (eval(xp) - eval(xm)) / (2.0 * opts.h);
        } else {
            const auto& sl = slots[s];
            a = analytic.params[sl.layer][sl.param].data[k];
            const double orig = model.layer(sl.layer).params[sl.param].data[k];
            model.params(sl.layer)[sl.param].data[k] = orig + opts.h;
            const double fp = eval(input);
            model.params(sl.layer)[sl.param].data[k] = orig - opts.h;
            const double fm = eval(input);
            model.params(sl.layer)[sl.param].data[k] = orig;
            numeric = (fp - fm) / (2.0 * opts.h);
        }
        worst = std::max(worst, relative_error(a, numeric));
    }
    return worst;
}

/// Loss = sum_i w_i * y_i with fixed seeded weights; a generic smooth probe.
inline OutputLoss random_linear_loss(const Shape& output_shape, std::uint64_t seed) {
    Tensor w(output_shape);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    for (double& v : w.data) v = d(rng);
    return [w](const Tensor& y, Tensor& grad) {
        double acc = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            acc += w.data[i] * y.data[i];
            grad.data[i] = w.data[i];
        }
        return acc;
    };
}

/// Loss = 0.5 * ||y - t||^2 for a seeded target t.
inline OutputLoss random_quadratic_loss(const Shape& output_shape, std::uint64_t seed) {
    Tensor t(output_shape);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    for (double& v : t.data) v = d(rng);
    return [t](const Tensor& y, Tensor& grad) {
        double acc = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double e = y.data[i] - t.data[i];
            acc += 0.5 * e * e;
            grad.data[i] = e;
        }
        return acc;
    };
}

}  // namespace envxfer::nn
