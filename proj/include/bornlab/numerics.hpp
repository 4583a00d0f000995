#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace bornlab {

using Complex = std::complex<double>;

// Fixed pairwise (tree) reduction. The split point depends only on the
// length, so results are bit-reproducible for a given input order.
template <typename T>
T pairwise_sum(std::span<const T> values)
{
    constexpr std::size_t kLeaf = 32;
    const std::size_t n = values.size();
    if (n <= kLeaf) {
        T acc{};
        for (const T& v : values) acc += v;
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

// Pairwise sum of f(i) for i in [0, n) without materializing the terms.
template <typename T, typename F>
T pairwise_sum_of(std::size_t begin, std::size_t end, F&& f)
{
    constexpr std::size_t kLeaf = 32;
    if (end - begin <= kLeaf) {
        T acc{};
        for (std::size_t i = begin; i < end; ++i) acc += f(i);
        return acc;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    return pairwise_sum_of<T>(begin, mid, f) + pairwise_sum_of<T>(mid, end, f);
}

} // namespace bornlab
