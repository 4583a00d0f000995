#pragma once

#include <span>
#include <vector>

#include "bornlab/field.hpp"

namespace bornlab {

/// Partial derivative along one axis. Uses the closed form when the field is
/// backed by one, otherwise periodic spectral differentiation.
ComplexField gradient(const ComplexField& f, std::size_t axis);

/// Laplacian summed over `axes` (all axes when empty).
ComplexField laplacian(const ComplexField& f, std::span<const std::size_t> axes = {});

Complex inner_product(const ComplexField& f, const ComplexField& g);
double l2_norm(const ComplexField& f);

/// Throws std::invalid_argument for a zero (or non-finite norm) field.
ComplexField l2_normalize(const ComplexField& f);

/// Index of the (i, j) second derivative, i <= j, in a packed Hessian.
inline std::size_t packed_index(std::size_t i, std::size_t j, std::size_t dim)
{
    if (i > j) std::swap(i, j);
    return i * dim - (i * (i + 1)) / 2 + j;
}

/// Psi together with its first and (optionally) second partial derivatives,
/// all on the field's grid.
struct Derivatives {
    std::vector<ComplexField> first;   // one per axis
    std::vector<ComplexField> second;  // packed upper triangle, empty unless requested

    const ComplexField& d2(std::size_t i, std::size_t j) const
    {
        return second.at(packed_index(i, j, first.size()));
    }
};

Derivatives differentiate(const ComplexField& f, bool with_second);

} // namespace bornlab
