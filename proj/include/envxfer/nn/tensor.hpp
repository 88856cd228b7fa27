#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <new>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "envxfer/error.hpp"

namespace envxfer::nn {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t(1), std::multiplies<>());
}

inline std::string shape_string(const Shape& s) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
    os << ')';
    return os.str();
}

/// Allocator with a fixed 64-byte alignment. Vectorized reductions peel
/// differently depending on the start address, so a fixed alignment keeps
/// results bit-identical between runs.
template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), alignment)); }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using Buffer = std::vector<double, AlignedAllocator<double>>;

/// Dense row-major real array. Image-like tensors are laid out H x W x C.
struct Tensor {
    Shape shape;
    Buffer data;

    Tensor() = default;
    explicit Tensor(Shape s, double fill = 0.0) : shape(std::move(s)), data(shape_size(shape), fill) {
        for (auto d : shape)
            if (d == 0) throw UsageError("tensor: zero-sized dimension in " + shape_string(shape));
    }
    Tensor(Shape s, Buffer values) : shape(std::move(s)), data(std::move(values)) { check_fill(); }
    Tensor(Shape s, const std::vector<double>& values) : shape(std::move(s)), data(values.begin(), values.end()) {
        check_fill();
    }

    std::size_t size() const noexcept { return data.size(); }
    std::size_t rank() const noexcept { return shape.size(); }
    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    double& at(std::size_t h, std::size_t w, std::size_t c) { return data[(h * shape[1] + w) * shape[2] + c]; }
    double at(std::size_t h, std::size_t w, std::size_t c) const { return data[(h * shape[1] + w) * shape[2] + c]; }

    Tensor reshaped(Shape s) const { return Tensor(std::move(s), data); }

    bool all_finite() const noexcept {
        return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
    }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    void check_fill() const {
        if (data.size() != shape_size(shape))
            throw UsageError("tensor: " + std::to_string(data.size()) + " values do not fill " + shape_string(shape));
    }
};

inline double squared_norm(const Tensor& t) {
    double acc = 0.0;
    for (double v : t.data) acc += v * v;
    return acc;
}

}  // namespace envxfer::nn
