#pragma once

// Layer kinds, shape inference, and the per-layer forward/backward kernels.
// Convolutions go through an explicit patch matrix so the heavy lifting is a
// single GEMM per layer.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "envxfer/error.hpp"
#include "envxfer/nn/tensor.hpp"

namespace envxfer::nn {

enum class LayerKind {
    conv2d_valid,
    conv2d_same,
    conv1d_valid,
    maxpool2,
    upsample2,
    dense,
    relu,
    sigmoid,
    softmax,
    dropout,
    flatten,
};

inline const char* to_string(LayerKind k) {
    switch (k) {
        case LayerKind::conv2d_valid: return "conv2d_valid";
        case LayerKind::conv2d_same: return "conv2d_same";
        case LayerKind::conv1d_valid: return "conv1d_valid";
        case LayerKind::maxpool2: return "maxpool2";
        case LayerKind::upsample2: return "upsample2";
        case LayerKind::dense: return "dense";
        case LayerKind::relu: return "relu";
        case LayerKind::sigmoid: return "sigmoid";
        case LayerKind::softmax: return "softmax";
        case LayerKind::dropout: return "dropout";
        case LayerKind::flatten: return "flatten";
    }
    return "?";
}

inline LayerKind layer_kind_from_string(const std::string& s) {
    for (auto k : {LayerKind::conv2d_valid, LayerKind::conv2d_same, LayerKind::conv1d_valid, LayerKind::maxpool2,
                   LayerKind::upsample2, LayerKind::dense, LayerKind::relu, LayerKind::sigmoid, LayerKind::softmax,
                   LayerKind::dropout, LayerKind::flatten})
        if (s == to_string(k)) return k;
    throw DataError("unknown layer kind '" + s + "'");
}

struct LayerSpec {
    LayerKind kind = LayerKind::relu;
    std::size_t kernel = 0;    // conv kernel extent (square for 2-D, width for 1-D)
    std::size_t channels = 0;  // conv output channels
    std::size_t units = 0;     // dense output units
    double rate = 0.0;         // dropout probability

    static LayerSpec conv2d_valid(std::size_t k, std::size_t out) { return {LayerKind::conv2d_valid, k, out}; }
    static LayerSpec conv2d_same(std::size_t k, std::size_t out) { return {LayerKind::conv2d_same, k, out}; }
    static LayerSpec conv1d_valid(std::size_t k, std::size_t out) { return {LayerKind::conv1d_valid, k, out}; }
    static LayerSpec maxpool2() { return {LayerKind::maxpool2}; }
    static LayerSpec upsample2() { return {LayerKind::upsample2}; }
    static LayerSpec dense(std::size_t units) { return {LayerKind::dense, 0, 0, units}; }
    static LayerSpec relu() { return {LayerKind::relu}; }
    static LayerSpec sigmoid() { return {LayerKind::sigmoid}; }
    static LayerSpec softmax() { return {LayerKind::softmax}; }
    static LayerSpec dropout(double rate) { return {LayerKind::dropout, 0, 0, 0, rate}; }
    static LayerSpec flatten() { return {LayerKind::flatten}; }

    bool has_params() const noexcept {
        return kind == LayerKind::conv2d_valid || kind == LayerKind::conv2d_same || kind == LayerKind::conv1d_valid ||
               kind == LayerKind::dense;
    }

    /// One-line text form, e.g. "conv2d_valid kernel=3 channels=32".
    std::string to_text() const {
        std::ostringstream os;
        os << to_string(kind);
        switch (kind) {
            case LayerKind::conv2d_valid:
            case LayerKind::conv2d_same:
            case LayerKind::conv1d_valid: os << " kernel=" << kernel << " channels=" << channels; break;
            case LayerKind::dense: os << " units=" << units; break;
            case LayerKind::dropout: os.precision(17); os << " rate=" << rate; break;
            default: break;
        }
        return os.str();
    }

    static LayerSpec from_text(const std::string& line) {
        std::istringstream is(line);
        std::string name;
        is >> name;
        LayerSpec s;
        s.kind = layer_kind_from_string(name);
        std::string kv;
        while (is >> kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw DataError("layer spec: bad field '" + kv + "'");
            const auto key = kv.substr(0, eq), val = kv.substr(eq + 1);
            if (key == "kernel") s.kernel = std::stoul(val);
            else if (key == "channels") s.channels = std::stoul(val);
            else if (key == "units") s.units = std::stoul(val);
            else if (key == "rate") s.rate = std::stod(val);
            else throw DataError("layer spec: unknown field '" + key + "'");
        }
        return s;
    }

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Validates the spec against an input shape and returns the output shape.
inline Shape infer_output_shape(const LayerSpec& s, const Shape& in, std::size_t index) {
    auto fail = [&](const std::string& why) -> Shape {
        throw UsageError("layer " + std::to_string(index) + " (" + s.to_text() + "): " + why + ", input " +
                         shape_string(in));
    };
    switch (s.kind) {
        case LayerKind::conv2d_valid:
        case LayerKind::conv2d_same: {
            if (in.size() != 3) return fail("expects H x W x C input");
            if (s.kernel == 0 || s.channels == 0) return fail("kernel and channels must be positive");
            if (s.kind == LayerKind::conv2d_same) {
                if (s.kernel % 2 == 0) return fail("same padding needs an odd kernel");
                return {in[0], in[1], s.channels};
            }
            if (in[0] < s.kernel || in[1] < s.kernel) return fail("input smaller than kernel");
            return {in[0] - s.kernel + 1, in[1] - s.kernel + 1, s.channels};
        }
        case LayerKind::conv1d_valid:
            if (in.size() != 2) return fail("expects T x C input");
            if (s.kernel == 0 || s.channels == 0) return fail("kernel and channels must be positive");
            if (in[0] < s.kernel) return fail("input shorter than kernel");
            return {in[0] - s.kernel + 1, s.channels};
        case LayerKind::maxpool2:
            if (in.size() != 3 || in[0] < 2 || in[1] < 2) return fail("expects H x W x C input with H, W >= 2");
            return {in[0] / 2, in[1] / 2, in[2]};
        case LayerKind::upsample2:
            if (in.size() != 3) return fail("expects H x W x C input");
            return {in[0] * 2, in[1] * 2, in[2]};
        case LayerKind::dense:
            if (in.size() != 1) return fail("expects a flat input");
            if (s.units == 0) return fail("units must be positive");
            return {s.units};
        case LayerKind::dropout:
            if (!(s.rate >= 0.0 && s.rate < 1.0)) return fail("drop rate must lie in [0, 1)");
            return in;
        case LayerKind::relu:
        case LayerKind::sigmoid:
        case LayerKind::softmax: return in;
        case LayerKind::flatten: return {shape_size(in)};
    }
    return in;
}

/// Parameter shapes: weights then bias.
inline std::vector<Shape> param_shapes(const LayerSpec& s, const Shape& in) {
    switch (s.kind) {
        case LayerKind::conv2d_valid:
        case LayerKind::conv2d_same: return {{s.kernel, s.kernel, in[2], s.channels}, {s.channels}};
        case LayerKind::conv1d_valid: return {{s.kernel, in[1], s.channels}, {s.channels}};
        case LayerKind::dense: return {{in[0], s.units}, {s.units}};
        default: return {};
    }
}

namespace kernels {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMap = Eigen::Map<RowMatrix>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

/// Patch matrix for a 2-D convolution: one row per output position, columns
/// ordered (dy, dx, c). `pad` is the zero border on each side.
inline RowMatrix im2col(const Tensor& x, std::size_t k, std::size_t pad, std::size_t out_h, std::size_t out_w) {
    const std::size_t H = x.shape[0], W = x.shape[1], C = x.shape[2];
    RowMatrix P = RowMatrix::Zero(Eigen::Index(out_h * out_w), Eigen::Index(k * k * C));
    for (std::size_t oh = 0; oh < out_h; ++oh) {
        for (std::size_t ow = 0; ow < out_w; ++ow) {
            double* row = P.data() + (oh * out_w + ow) * k * k * C;
            for (std::size_t dy = 0; dy < k; ++dy) {
                const auto iy = std::ptrdiff_t(oh + dy) - std::ptrdiff_t(pad);
                if (iy < 0 || iy >= std::ptrdiff_t(H)) continue;
                for (std::size_t dx = 0; dx < k; ++dx) {
                    const auto ix = std::ptrdiff_t(ow + dx) - std::ptrdiff_t(pad);
                    if (ix < 0 || ix >= std::ptrdiff_t(W)) continue;
                    const double* src = x.data.data() + (std::size_t(iy) * W + std::size_t(ix)) * C;
                    std::copy(src, src + C, row + (dy * k + dx) * C);
                }
            }
        }
    }
    return P;
}

inline void col2im_add(const RowMatrix& dP, Tensor& dx, std::size_t k, std::size_t pad, std::size_t out_h,
                       std::size_t out_w) {
    const std::size_t H = dx.shape[0], W = dx.shape[1], C = dx.shape[2];
    for (std::size_t oh = 0; oh < out_h; ++oh) {
        for (std::size_t ow = 0; ow < out_w; ++ow) {
            const double* row = dP.data() + (oh * out_w + ow) * k * k * C;
            for (std::size_t dy = 0; dy < k; ++dy) {
                const auto iy = std::ptrdiff_t(oh + dy) - std::ptrdiff_t(pad);
                if (iy < 0 || iy >= std::ptrdiff_t(H)) continue;
                for (std::size_t dx_ = 0; dx_ < k; ++dx_) {
                    const auto ix = std::ptrdiff_t(ow + dx_) - std::ptrdiff_t(pad);
                    if (ix < 0 || ix >= std::ptrdiff_t(W)) continue;
                    double* dst = dx.data.data() + (std::size_t(iy) * W + std::size_t(ix)) * C;
                    const double* src = row + (dy * k + dx_) * C;
                    for (std::size_t c = 0; c < C; ++c) dst[c] += src[c];
                }
            }
        }
    }
}

inline std::size_t pad_of(const LayerSpec& s) { return s.kind == LayerKind::conv2d_same ? s.kernel / 2 : 0; }

inline void conv2d_forward(const LayerSpec& s, const Tensor& x, const std::vector<Tensor>& p, Tensor& y) {
    const std::size_t k = s.kernel, C = x.shape[2];
    const std::size_t oh = y.shape[0], ow = y.shape[1], oc = y.shape[2];
    const RowMatrix P = im2col(x, k, pad_of(s), oh, ow);
    ConstRowMap Wm(p[0].data.data(), Eigen::Index(k * k * C), Eigen::Index(oc));
    Eigen::Map<const Eigen::RowVectorXd> b(p[1].data.data(), Eigen::Index(oc));
    RowMap Y(y.data.data(), Eigen::Index(oh * ow), Eigen::Index(oc));
    Y.noalias() = P * Wm;
    Y.rowwise() += b;
}

inline void conv2d_backward(const LayerSpec& s, const Tensor& x, const std::vector<Tensor>& p, const Tensor& dy,
                            Tensor& dx, std::vector<Tensor>& dp) {
    const std::size_t k = s.kernel, C = x.shape[2];
    const std::size_t oh = dy.shape[0], ow = dy.shape[1], oc = dy.shape[2];
    const RowMatrix P = im2col(x, k, pad_of(s), oh, ow);
    ConstRowMap dY(dy.data.data(), Eigen::Index(oh * ow), Eigen::Index(oc));
    ConstRowMap Wm(p[0].data.data(), Eigen::Index(k * k * C), Eigen::Index(oc));
    RowMap dW(dp[0].data.data(), Eigen::Index(k * k * C), Eigen::Index(oc));
    Eigen::Map<Eigen::RowVectorXd> db(dp[1].data.data(), Eigen::Index(oc));
    dW.noalias() += P.transpose() * dY;
    db += dY.colwise().sum();
    const RowMatrix dP = dY * Wm.transpose();
    col2im_add(dP, dx, k, pad_of(s), oh, ow);
}

inline void conv1d_forward(const LayerSpec& s, const Tensor& x, const std::vector<Tensor>& p, Tensor& y) {
    const std::size_t k = s.kernel, C = x.shape[1], positions = y.shape[0], oc = y.shape[1];
    // Row t of the patch matrix is the contiguous block x[t .. t+k).
    Eigen::Map<const RowMatrix, 0, Eigen::OuterStride<>> P(x.data.data(), Eigen::Index(positions),
                                                           Eigen::Index(k * C), Eigen::OuterStride<>(Eigen::Index(C)));
    ConstRowMap Wm(p[0].data.data(), Eigen::Index(k * C), Eigen::Index(oc));
    Eigen::Map<const Eigen::RowVectorXd> b(p[1].data.data(), Eigen::Index(oc));
    RowMap Y(y.data.data(), Eigen::Index(positions), Eigen::Index(oc));
    Y.noalias() = P * Wm;
    Y.rowwise() += b;
}

inline void conv1d_backward(const LayerSpec& s, const Tensor& x, const std::vector<Tensor>& p, const Tensor& dy,
                            Tensor& dx, std::vector<Tensor>& dp) {
    const std::size_t k = s.kernel, C = x.shape[1], positions = dy.shape[0], oc = dy.shape[1];
    Eigen::Map<const RowMatrix, 0, Eigen::OuterStride<>> P(x.data.data(), Eigen::Index(positions),
                                                           Eigen::Index(k * C), Eigen::OuterStride<>(Eigen::Index(C)));
    ConstRowMap dY(dy.data.data(), Eigen::Index(positions), Eigen::Index(oc));
    ConstRowMap Wm(p[0].data.data(), Eigen::Index(k * C), Eigen::Index(oc));
    RowMap dW(dp[0].data.data(), Eigen::Index(k * C), Eigen::Index(oc));
    Eigen::Map<Eigen::RowVectorXd> db(dp[1].data.data(), Eigen::Index(oc));
    dW.noalias() += P.transpose() * dY;
    db += dY.colwise().sum();
    const RowMatrix dP = dY * Wm.transpose();
    for (std::size_t t = 0; t < positions; ++t) {
        double* dst = dx.data.data() + t * C;
        const double* src = dP.data() + t * k * C;
        for (std::size_t i = 0; i < k * C; ++i) dst[i] += src[i];
    }
}

inline void dense_forward(const Tensor& x, const std::vector<Tensor>& p, Tensor& y) {
    const auto n = Eigen::Index(x.size()), u = Eigen::Index(y.size());
    ConstRowMap Wm(p[0].data.data(), n, u);
    Eigen::Map<const Eigen::RowVectorXd> xv(x.data.data(), n), b(p[1].data.data(), u);
    Eigen::Map<Eigen::RowVectorXd> yv(y.data.data(), u);
    yv.noalias() = xv * Wm;
    yv += b;
}

inline void dense_backward(const Tensor& x, const std::vector<Tensor>& p, const Tensor& dy, Tensor& dx,
                           std::vector<Tensor>& dp) {
    const auto n = Eigen::Index(x.size()), u = Eigen::Index(dy.size());
    ConstRowMap Wm(p[0].data.data(), n, u);
    Eigen::Map<const Eigen::RowVectorXd> xv(x.data.data(), n), dyv(dy.data.data(), u);
    RowMap dW(dp[0].data.data(), n, u);
    Eigen::Map<Eigen::RowVectorXd> db(dp[1].data.data(), u), dxv(dx.data.data(), n);
    dW.noalias() += xv.transpose() * dyv;
    db += dyv;
    dxv.noalias() += dyv * Wm.transpose();
}

inline void maxpool2_forward(const Tensor& x, Tensor& y, std::vector<std::size_t>& argmax) {
    const std::size_t W = x.shape[1], C = x.shape[2];
    const std::size_t oh = y.shape[0], ow = y.shape[1];
    argmax.assign(y.size(), 0);
    for (std::size_t i = 0; i < oh; ++i)
        for (std::size_t j = 0; j < ow; ++j)
            for (std::size_t c = 0; c < C; ++c) {
                std::size_t best = ((2 * i) * W + 2 * j) * C + c;
                for (std::size_t dy = 0; dy < 2; ++dy)
                    for (std::size_t dx = 0; dx < 2; ++dx) {
                        const std::size_t idx = ((2 * i + dy) * W + 2 * j + dx) * C + c;
                        if (x.data[idx] > x.data[best]) best = idx;
                    }
                const std::size_t o = (i * ow + j) * C + c;
                y.data[o] = x.data[best];
                argmax[o] = best;
            }
}

inline void upsample2_forward(const Tensor& x, Tensor& y) {
    const std::size_t W = x.shape[1], C = x.shape[2], oh = y.shape[0], ow = y.shape[1];
    for (std::size_t i = 0; i < oh; ++i)
        for (std::size_t j = 0; j < ow; ++j)
            for (std::size_t c = 0; c < C; ++c) y.data[(i * ow + j) * C + c] = x.data[((i / 2) * W + j / 2) * C + c];
}

inline void upsample2_backward(const Tensor& dy, Tensor& dx) {
    const std::size_t W = dx.shape[1], C = dx.shape[2], oh = dy.shape[0], ow = dy.shape[1];
    for (std::size_t i = 0; i < oh; ++i)
        for (std::size_t j = 0; j < ow; ++j)
            for (std::size_t c = 0; c < C; ++c) dx.data[((i / 2) * W + j / 2) * C + c] += dy.data[(i * ow + j) * C + c];
}

/// Softmax over the last axis, max-subtracted.
inline void softmax_forward(const Tensor& x, Tensor& y) {
    const std::size_t group = x.shape.back();
    for (std::size_t base = 0; base < x.size(); base += group) {
        double mx = x.data[base];
        for (std::size_t i = 1; i < group; ++i) mx = std::max(mx, x.data[base + i]);
        double sum = 0.0;
        for (std::size_t i = 0; i < group; ++i) sum += (y.data[base + i] = std::exp(x.data[base + i] - mx));
        for (std::size_t i = 0; i < group; ++i) y.data[base + i] /= sum;
    }
}

inline void softmax_backward(const Tensor& y, const Tensor& dy, Tensor& dx) {
    const std::size_t group = y.shape.back();
    for (std::size_t base = 0; base < y.size(); base += group) {
        double dot = 0.0;
        for (std::size_t i = 0; i < group; ++i) dot += dy.data[base + i] * y.data[base + i];
        for (std::size_t i = 0; i < group; ++i) dx.data[base + i] += y.data[base + i] * (dy.data[base + i] - dot);
    }
}

}  // namespace kernels
}  // namespace envxfer::nn
