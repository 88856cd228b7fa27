#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "envxfer/error.hpp"
#include "envxfer/nn/model.hpp"

namespace envxfer::nn {

enum class OptimizerKind { sgd, adam };

inline std::string to_string(OptimizerKind k) { return k == OptimizerKind::sgd ? "sgd" : "adam"; }

inline OptimizerKind optimizer_from_string(const std::string& s) {
    if (s == "sgd") return OptimizerKind::sgd;
    if (s == "adam") return OptimizerKind::adam;
    throw UsageError("unknown optimizer '" + s + "'");
}

struct AdamSettings {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First-order optimizer over a fixed list of parameter slots. Adam keeps
/// bias-corrected first and second moments per slot.
class Optimizer {
public:
    Optimizer(OptimizerKind kind, double learning_rate, AdamSettings adam = {})
        : kind_(kind), lr_(learning_rate), adam_(adam) {}

    OptimizerKind kind() const noexcept { return kind_; }
    double learning_rate() const noexcept { return lr_; }
    long steps() const noexcept { return t_; }
    const std::vector<std::vector<double>>& first_moments() const noexcept { return m_; }
    const std::vector<std::vector<double>>& second_moments() const noexcept { return v_; }

    /// Applies one update to every slot. Refuses (throws, leaves parameters
    /// untouched) when any gradient entry is non-finite.
    void step(const std::vector<std::span<double>>& params, const std::vector<std::span<const double>>& grads) {
        if (params.size() != grads.size()) throw UsageError("optimizer: parameter/gradient slot count mismatch");
        for (std::size_t s = 0; s < grads.size(); ++s) {
            if (params[s].size() != grads[s].size())
                throw UsageError("optimizer: slot " + std::to_string(s) + " shape mismatch");
            for (double g : grads[s])
                if (!std::isfinite(g))
                    throw NumericalError("optimizer: non-finite gradient in slot " + std::to_string(s) +
                                         "; step refused");
        }
        if (m_.empty()) {
            for (const auto& p : params) {
                m_.emplace_back(p.size(), 0.0);
                v_.emplace_back(p.size(), 0.0);
            }
        } else if (m_.size() != params.size()) {
            throw UsageError("optimizer: slot layout changed between steps");
        }
        ++t_;
        if (kind_ == OptimizerKind::sgd) {
            for (std::size_t s = 0; s < params.size(); ++s)
                for (std::size_t i = 0; i < params[s].size(); ++i) params[s][i] -= lr_ * grads[s][i];
            return;
        }
        const double c1 = 1.0 - std::pow(adam_.beta1, double(t_));
        const double c2 = 1.0 - std::pow(adam_.beta2, double(t_));
        for (std::size_t s = 0; s < params.size(); ++s) {
            auto& m = m_[s];
            auto& v = v_[s];
            for (std::size_t i = 0; i < params[s].size(); ++i) {
                const double g = grads[s][i];
                m[i] = adam_.beta1 * m[i] + (1.0 - adam_.beta1) * g;
                v[i] = adam_.beta2 * v[i] + (1.0 - adam_.beta2) * g * g;
                params[s][i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + adam_.epsilon);
            }
        }
    }

    /// Convenience overload for a Model and matching Gradients.
    void step(Model& model, const Gradients& g) {
        std::vector<std::span<double>> ps;
        std::vector<std::span<const double>> gs;
        for (std::size_t i = 0; i < model.size(); ++i) {
            if (model.layer(i).params.empty()) continue;
            auto& layer_params = model.params(i);
            for (std::size_t j = 0; j < layer_params.size(); ++j) {
                ps.emplace_back(layer_params[j].data);
                gs.emplace_back(g.params.at(i).at(j).data);
            }
        }
        step(ps, gs);
    }

private:
    OptimizerKind kind_;
    double lr_;
    AdamSettings adam_;
    long t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

}  // namespace envxfer::nn
