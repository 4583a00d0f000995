#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bornlab/grid.hpp"
#include "bornlab/jet.hpp"
#include "bornlab/numerics.hpp"

namespace bornlab {

/// Closed-form wave function Psi(x, t) with exact derivatives via jets.
/// Jet variables are the spatial axes 0..dim-1, followed by time when
/// `with_time` is set.
class AnalyticForm {
public:
    virtual ~AnalyticForm() = default;
    virtual std::size_t dim() const = 0;
    virtual Complex value(std::span<const double> x, double t) const = 0;
    virtual Jet2 jet2(std::span<const double> x, double t, bool with_time) const = 0;
    virtual Jet3 jet3(std::span<const double> x, double t, bool with_time) const = 0;
};

/// Implements the AnalyticForm entry points from one templated evaluator:
///   template <class S> S evaluate(const std::array<S, kMaxDim>& x, const S& t) const;
template <typename Derived>
class ClosedForm : public AnalyticForm {
public:
    Complex value(std::span<const double> x, double t) const override
    {
        std::array<Complex, kMaxDim> xs{};
        for (std::size_t i = 0; i < dim(); ++i) xs[i] = x[i];
        return self().evaluate(xs, Complex(t));
    }
    Jet2 jet2(std::span<const double> x, double t, bool with_time) const override
    {
        return eval_jet<Jet2>(x, t, with_time);
    }
    Jet3 jet3(std::span<const double> x, double t, bool with_time) const override
    {
        return eval_jet<Jet3>(x, t, with_time);
    }

private:
    const Derived& self() const { return static_cast<const Derived&>(*this); }

    template <typename J>
    J eval_jet(std::span<const double> x, double t, bool with_time) const
    {
        const int d = static_cast<int>(dim());
        const int n = with_time ? d + 1 : d;
        std::array<J, kMaxDim> xs{};
        for (int i = 0; i < d; ++i) xs[i] = J::variable(x[i], i, n);
        for (int i = d; i < static_cast<int>(kMaxDim); ++i) xs[i] = J::constant(0.0, n);
        const J tj = with_time ? J::variable(t, d, n) : J::constant(t, n);
        return self().evaluate(xs, tj);
    }
};

/// A closed form sampled at a fixed time with a constant prefactor.
struct AnalyticBacking {
    std::shared_ptr<const AnalyticForm> form;
    double time = 0.0;
    Complex scale{1.0, 0.0};
};

/// Complex amplitude per grid cell, optionally backed by a closed form that
/// supplies exact derivatives at the cell centers.
class ComplexField {
public:
    ComplexField() = default;
    explicit ComplexField(Grid grid);
    ComplexField(Grid grid, std::vector<Complex> values);

    /// Evaluates scale * form(x, time) at every cell center and keeps the backing.
    static ComplexField sample(const Grid& grid, AnalyticBacking backing);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<const Complex> values() const { return values_; }
    std::span<Complex> values() { return values_; }
    Complex operator[](std::size_t i) const { return values_[i]; }

    const std::optional<AnalyticBacking>& backing() const { return backing_; }
    bool has_backing() const { return backing_.has_value(); }
    void drop_backing() { backing_.reset(); }

    /// Multiplies the samples (and backing prefactor) by c.
    ComplexField scaled(Complex c) const;

    bool all_finite() const;

private:
    Grid grid_;
    std::vector<Complex> values_;
    std::optional<AnalyticBacking> backing_;
};

/// Real value per grid cell with a definedness mask (1 = defined).
struct RealField {
    Grid grid;
    std::vector<double> values;
    std::vector<std::uint8_t> mask;

    RealField() = default;
    explicit RealField(Grid g)
        : grid(std::move(g)), values(grid.size(), 0.0), mask(grid.size(), 1)
    {
    }
    std::size_t size() const { return values.size(); }
};

} // namespace bornlab
