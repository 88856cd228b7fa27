#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include <Eigen/Core>

#include "envxfer/dsp/stft.hpp"
#include "envxfer/error.hpp"
#include "envxfer/nn/tensor.hpp"

namespace envxfer::dsp {

inline constexpr double kLogFloor = 1e-5;

enum class MagnitudeDomain { linear, log };

/// n_bins x n_frames magnitudes, either linear or ln(|S| + eps).
struct MagnitudeGrid {
    Eigen::MatrixXd values;
    MagnitudeDomain domain = MagnitudeDomain::linear;

    std::size_t rows() const noexcept { return std::size_t(values.rows()); }
    std::size_t cols() const noexcept { return std::size_t(values.cols()); }
    bool same_shape(const MagnitudeGrid& o) const noexcept {
        return values.rows() == o.values.rows() && values.cols() == o.values.cols();
    }
};

inline MagnitudeGrid magnitude(const ComplexSpectrogram& s) {
    return {s.frames.cwiseAbs(), MagnitudeDomain::linear};
}

inline MagnitudeGrid log_magnitude(const ComplexSpectrogram& s) {
    return {(s.frames.cwiseAbs().array() + kLogFloor).log().matrix(), MagnitudeDomain::log};
}

/// Inverse of log_magnitude, clamped at zero.
inline MagnitudeGrid to_linear(const MagnitudeGrid& g) {
    if (g.domain == MagnitudeDomain::linear) return g;
    return {(g.values.array().exp() - kLogFloor).max(0.0).matrix(), MagnitudeDomain::linear};
}

/// Min-max normalization to [0, 1]; a constant grid maps to all zeros.
inline void normalize_unit_range(std::span<double> v) {
    if (v.empty()) return;
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it, hi = *hi_it;
    const double range = hi - lo;
    if (!(range > 1e-12 * std::max(1.0, std::abs(hi)))) {
        std::fill(v.begin(), v.end(), 0.0);
        return;
    }
    for (double& x : v) x = (x - lo) / range;
}

/// Corner-aligned bilinear resampling onto a rows x cols tensor.
inline nn::Tensor bilinear_resize(const MagnitudeGrid& g, std::size_t rows, std::size_t cols) {
    if (rows < 2 || cols < 2) throw UsageError("resize: target must be at least 2x2");
    if (g.rows() < 2 || g.cols() < 2)
        throw DataError("resize: degenerate source grid " + std::to_string(g.rows()) + "x" +
                        std::to_string(g.cols()));
    nn::Tensor out({rows, cols});
    const double sr = double(g.rows() - 1) / double(rows - 1);
    const double sc = double(g.cols() - 1) / double(cols - 1);
    for (std::size_t i = 0; i < rows; ++i) {
        const double y = double(i) * sr;
        const auto y0 = std::min(std::size_t(y), g.rows() - 2);
        const double fy = y - double(y0);
        for (std::size_t j = 0; j < cols; ++j) {
            const double x = double(j) * sc;
            const auto x0 = std::min(std::size_t(x), g.cols() - 2);
            const double fx = x - double(x0);
            const auto& v = g.values;
            const auto r0 = Eigen::Index(y0), c0 = Eigen::Index(x0);
            const double top = v(r0, c0) * (1 - fx) + v(r0, c0 + 1) * fx;
            const double bot = v(r0 + 1, c0) * (1 - fx) + v(r0 + 1, c0 + 1) * fx;
            out.data[i * cols + j] = top * (1 - fy) + bot * fy;
        }
    }
    return out;
}

/// Bilinear resize followed by per-grid min-max normalization to [0, 1].
inline nn::Tensor resize_grid(const MagnitudeGrid& g, std::size_t rows, std::size_t cols) {
    auto t = bilinear_resize(g, rows, cols);
    normalize_unit_range(t.data);
    return t;
}

}  // namespace envxfer::dsp
