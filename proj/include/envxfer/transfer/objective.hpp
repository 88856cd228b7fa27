#pragma once

// alpha * ||F(x) - F(x_c)||^2 / N + ||G(x) - G(x_s)||_F^2 / N and its gradient
// with respect to the log-magnitude grid x, for the single random layer.

#include <string>
#include <vector>

#include <Eigen/Core>

#include "envxfer/dsp/magnitude.hpp"
#include "envxfer/error.hpp"
#include "envxfer/transfer/config.hpp"
#include "envxfer/transfer/features.hpp"

namespace envxfer::transfer {

struct LossTerms {
    double total = 0.0;
    double content = 0.0;
    double style = 0.0;
    friend bool operator==(const LossTerms&, const LossTerms&) = default;
};

/// Loss at the final point plus the per-iteration trace.
struct LossBreakdown {
    double total = 0.0;
    double content = 0.0;
    double style = 0.0;
    std::vector<LossTerms> trace;
};

/// Targets F(x_c) and G(x_s) computed once; evaluate() is then called per step.
class TransferObjective {
public:
    TransferObjective(const RandomConvNet& net, const Eigen::MatrixXd& content, const Eigen::MatrixXd& style,
                      double alpha)
        : net_(net), alpha_(alpha), rows_(content.rows()), cols_(content.cols()) {
        if (content.rows() != style.rows() || content.cols() != style.cols())
            throw DataError("transfer: content grid " + dims(content) + " and style grid " + dims(style) +
                            " differ in shape");
        content_features_ = extract_features(net, content).values;
        style_gram_ = gram(extract_features(net, style));
    }

    double alpha() const noexcept { return alpha_; }

    /// Loss terms at x; writes d total / d x into *grad when non-null.
    LossTerms evaluate(const Eigen::MatrixXd& x, Eigen::MatrixXd* grad = nullptr) const {
        if (x.rows() != rows_ || x.cols() != cols_)
            throw DataError("transfer: grid " + dims(x) + " does not match content shape " +
                            std::to_string(rows_) + "x" + std::to_string(cols_));
        const ActivationMap f = extract_features(net_, x);
        const double n_nodes = double(f.node_count());
        const double positions = double(f.n_positions());
        const Eigen::MatrixXd content_diff = f.values - content_features_;
        const Eigen::MatrixXd gram_diff = gram(f) - style_gram_;
        LossTerms t;
        t.content = content_diff.squaredNorm() / n_nodes;
        t.style = gram_diff.squaredNorm() / n_nodes;
        t.total = alpha_ * t.content + t.style;
        if (grad == nullptr) return t;

        // dL/dF = 2 alpha (F - F_c) / N + 4 (G - G_s) F / (N P)
        Eigen::MatrixXd d_features = (2.0 * alpha_ / n_nodes) * content_diff;
        d_features.noalias() += (4.0 / (n_nodes * positions)) * gram_diff * f.values;
        // ReLU subgradient at 0 is 0.
        d_features = (f.pre_activation.array() > 0.0).select(d_features, 0.0);
        const Eigen::MatrixXd d_patches = net_.weights().transpose() * d_features;
        grad->setZero(rows_, cols_);
        const auto width = Eigen::Index(net_.filter_width());
        const auto n_pos = d_features.cols();
        for (Eigen::Index j = 0; j < width; ++j) grad->middleCols(j, n_pos) += d_patches.middleRows(j * rows_, rows_);
        return t;
    }

private:
    static std::string dims(const Eigen::MatrixXd& m) {
        return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
    }

    const RandomConvNet& net_;
    double alpha_;
    Eigen::Index rows_, cols_;
    Eigen::MatrixXd content_features_;
    Eigen::MatrixXd style_gram_;
};

inline void check_same_shape(const dsp::MagnitudeGrid& a, const dsp::MagnitudeGrid& b, const char* what) {
    if (!a.same_shape(b)) throw DataError(std::string("transfer: ") + what + " grid shape mismatch");
}

inline LossTerms transfer_loss(const dsp::MagnitudeGrid& x, const dsp::MagnitudeGrid& content,
                               const dsp::MagnitudeGrid& style, const RandomConvNet& net, const TransferConfig& cfg) {
    check_same_shape(x, content, "content");
    check_same_shape(x, style, "style");
    return TransferObjective(net, content.values, style.values, cfg.alpha).evaluate(x.values);
}

inline Eigen::MatrixXd transfer_grad(const dsp::MagnitudeGrid& x, const dsp::MagnitudeGrid& content,
                                     const dsp::MagnitudeGrid& style, const RandomConvNet& net,
                                     const TransferConfig& cfg) {
    check_same_shape(x, content, "content");
    check_same_shape(x, style, "style");
    Eigen::MatrixXd g;
    TransferObjective(net, content.values, style.values, cfg.alpha).evaluate(x.values, &g);
    return g;
}

}  // namespace envxfer::transfer
