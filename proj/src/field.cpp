#include "bornlab/field.hpp"

#include <cmath>
#include <stdexcept>

namespace bornlab {

ComplexField::ComplexField(Grid grid)
    : grid_(std::move(grid)), values_(grid_.size())
{
}

ComplexField::ComplexField(Grid grid, std::vector<Complex> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    if (values_.size() != grid_.size()) {
        throw std::invalid_argument("complex field: value count does not match grid size");
    }
}

ComplexField ComplexField::sample(const Grid& grid, AnalyticBacking backing)
{
    if (!backing.form) throw std::invalid_argument("complex field: null analytic form");
    if (backing.form->dim() != grid.dim()) {
        throw std::invalid_argument("complex field: analytic form dimension does not match grid");
    }
    ComplexField f(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto x = grid.point(i);
        f.values_[i] = backing.scale * backing.form->value(std::span(x.data(), grid.dim()), backing.time);
    }
    f.backing_ = std::move(backing);
    return f;
}

ComplexField ComplexField::scaled(Complex c) const
{
    ComplexField out = *this;
    for (auto& v : out.values_) v *= c;
    if (out.backing_) out.backing_->scale *= c;
    return out;
}

bool ComplexField::all_finite() const
{
    for (const Complex& v : values_) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

} // namespace bornlab
