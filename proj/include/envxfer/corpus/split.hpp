#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "envxfer/error.hpp"

namespace envxfer::corpus {

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

/// Seeded shuffle of [0, n) partitioned into train/val/test. The test part is
/// n - round(n * train_frac); validation is round(|train+val| * val_frac) of the rest.
inline Split split(std::size_t n, double train_frac = 0.8, double val_frac_of_train = 0.1, std::uint64_t seed = 0) {
    if (n == 0) throw DataError("split: empty input");
    if (!(train_frac > 0.0 && train_frac < 1.0) || !(val_frac_of_train > 0.0 && val_frac_of_train < 1.0))
        throw UsageError("split: fractions must lie in (0, 1)");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i)
        std::swap(idx[i - 1], idx[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)]);
    const auto n_fit = std::size_t(std::llround(double(n) * train_frac));
    const auto n_val = std::size_t(std::llround(double(n_fit) * val_frac_of_train));
    Split s;
    s.val.assign(idx.begin(), idx.begin() + std::ptrdiff_t(n_val));
    s.train.assign(idx.begin() + std::ptrdiff_t(n_val), idx.begin() + std::ptrdiff_t(n_fit));
    s.test.assign(idx.begin() + std::ptrdiff_t(n_fit), idx.end());
    return s;
}

}  // namespace envxfer::corpus
