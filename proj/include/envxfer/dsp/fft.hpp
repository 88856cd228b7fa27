#pragma once

// Fixed-size complex FFT on top of Eigen's FFT module (kissfft backend).

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace envxfer::dsp {

using cplx = std::complex<double>;

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

class Fft {
public:
    explicit Fft(std::size_t n) : n_(n), scratch_(n) {
        if (!is_power_of_two(n)) throw std::invalid_argument("fft size must be a power of two");
        engine_.SetFlag(Eigen::FFT<double>::Unscaled);
    }

    std::size_t size() const noexcept { return n_; }

    void forward(std::span<cplx> x) const {
        engine_.fwd(scratch_.data(), x.data(), Eigen::Index(n_));
        std::copy(scratch_.begin(), scratch_.end(), x.begin());
    }

    /// Unnormalized inverse; callers divide by size().
    void inverse(std::span<cplx> x) const {
        engine_.inv(scratch_.data(), x.data(), Eigen::Index(n_));
        std::copy(scratch_.begin(), scratch_.end(), x.begin());
    }

private:
    std::size_t n_;
    // The engine caches plans and the transforms are out of place, so both
    // are per-instance scratch state.
    mutable Eigen::FFT<double> engine_;
    mutable std::vector<cplx> scratch_;
};

}  // namespace envxfer::dsp
