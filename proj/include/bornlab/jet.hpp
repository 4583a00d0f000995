#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "bornlab/numerics.hpp"

namespace bornlab {

/// Truncated forward-mode Taylor jet in up to four variables: value plus all
/// partial derivatives through `Order` (full, unsymmetrized tensors). Used to
/// evaluate closed-form wave functions together with exact derivatives.
template <int Order>
class Jet {
    static_assert(Order >= 1 && Order <= 3);

public:
    static constexpr int kMaxVars = 4;
    static constexpr int kOrder = Order;

    Jet() = default;

    static Jet constant(Complex c, int nvars)
    {
        Jet j;
        j.n_ = nvars;
        j.v_ = c;
        return j;
    }

    static Jet variable(double x, int index, int nvars)
    {
        Jet j = constant(x, nvars);
        j.d1_[index] = 1.0;
        return j;
    }

    int nvars() const { return n_; }
    Complex value() const { return v_; }
    Complex d(int i) const { return d1_[i]; }
    Complex d(int i, int j) const
        requires(Order >= 2)
    {
        return d2_[i * kMaxVars + j];
    }
    Complex d(int i, int j, int k) const
        requires(Order >= 3)
    {
        return d3_[(i * kMaxVars + j) * kMaxVars + k];
    }

    Jet& operator+=(const Jet& o) { return combine(o, 1.0); }
    Jet& operator-=(const Jet& o) { return combine(o, -1.0); }
    Jet& operator+=(Complex c)
    {
        v_ += c;
        return *this;
    }
    Jet& operator*=(Complex c)
    {
        scale(c);
        return *this;
    }

    friend Jet operator-(Jet a)
    {
        a.scale(-1.0);
        return a;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, Complex c) { return a += c; }
    friend Jet operator+(Complex c, Jet a) { return a += c; }
    friend Jet operator-(Jet a, Complex c) { return a += -c; }
    friend Jet operator-(Complex c, const Jet& a) { return (-a) + c; }
    friend Jet operator*(Jet a, Complex c) { return a *= c; }
    friend Jet operator*(Complex c, Jet a) { return a *= c; }
    friend Jet operator/(Jet a, Complex c) { return a *= (1.0 / c); }
    friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
    friend Jet operator/(Complex c, const Jet& b) { return reciprocal(b) * c; }

    friend Jet operator*(const Jet& a, const Jet& b)
    {
        Jet r;
        r.n_ = a.n_ > b.n_ ? a.n_ : b.n_;
        const int n = r.n_;
        r.v_ = a.v_ * b.v_;
        for (int i = 0; i < n; ++i) r.d1_[i] = a.d1_[i] * b.v_ + a.v_ * b.d1_[i];
        if constexpr (Order >= 2) {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const int ij = i * kMaxVars + j;
                    r.d2_[ij] = a.d2_[ij] * b.v_ + a.d1_[i] * b.d1_[j] + a.d1_[j] * b.d1_[i]
                                + a.v_ * b.d2_[ij];
                }
            }
        }
        if constexpr (Order >= 3) {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    for (int k = 0; k < n; ++k) {
                        const int ij = i * kMaxVars + j;
                        const int ik = i * kMaxVars + k;
                        const int jk = j * kMaxVars + k;
                        const int ijk = ij * kMaxVars + k;
                        r.d3_[ijk] = a.d3_[ijk] * b.v_ + a.d2_[ij] * b.d1_[k] + a.d2_[ik] * b.d1_[j]
                                     + a.d2_[jk] * b.d1_[i] + a.d1_[i] * b.d2_[jk]
                                     + a.d1_[j] * b.d2_[ik] + a.d1_[k] * b.d2_[ij]
                                     + a.v_ * b.d3_[ijk];
                    }
                }
            }
        }
        return r;
    }

    /// phi(g) given phi and its derivatives at g's value.
    friend Jet compose(const Jet& g, Complex f0, Complex f1, Complex f2, Complex f3)
    {
        Jet h;
        h.n_ = g.n_;
        const int n = g.n_;
        h.v_ = f0;
        for (int i = 0; i < n; ++i) h.d1_[i] = f1 * g.d1_[i];
        if constexpr (Order >= 2) {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    const int ij = i * kMaxVars + j;
                    h.d2_[ij] = f2 * g.d1_[i] * g.d1_[j] + f1 * g.d2_[ij];
                }
            }
        }
        if constexpr (Order >= 3) {
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    for (int k = 0; k < n; ++k) {
                        const int ij = i * kMaxVars + j;
                        const int ik = i * kMaxVars + k;
                        const int jk = j * kMaxVars + k;
                        const int ijk = ij * kMaxVars + k;
                        h.d3_[ijk] = f3 * g.d1_[i] * g.d1_[j] * g.d1_[k]
                                     + f2 * (g.d2_[ij] * g.d1_[k] + g.d2_[ik] * g.d1_[j]
                                             + g.d2_[jk] * g.d1_[i])
                                     + f1 * g.d3_[ijk];
                    }
                }
            }
        }
        return h;
    }

    friend Jet reciprocal(const Jet& g)
    {
        const Complex r = 1.0 / g.v_;
        return compose(g, r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r);
    }

    friend Jet exp(const Jet& g)
    {
        const Complex e = std::exp(g.v_);
        return compose(g, e, e, e, e);
    }

    /// Principal square root; g's value must stay off the branch cut.
    friend Jet sqrt(const Jet& g)
    {
        const Complex s = std::sqrt(g.v_);
        const Complex inv = 1.0 / g.v_;
        return compose(g, s, 0.5 * s * inv, -0.25 * s * inv * inv, 0.375 * s * inv * inv * inv);
    }

    friend Jet real_part(const Jet& g) { return g.map([](Complex c) { return Complex(c.real(), 0.0); }); }
    friend Jet imag_part(const Jet& g) { return g.map([](Complex c) { return Complex(c.imag(), 0.0); }); }
    friend Jet conj(const Jet& g) { return g.map([](Complex c) { return std::conj(c); }); }

private:
    template <typename F>
    Jet map(F f) const
    {
        Jet r = *this;
        r.v_ = f(v_);
        for (auto& c : r.d1_) c = f(c);
        for (auto& c : r.d2_) c = f(c);
        for (auto& c : r.d3_) c = f(c);
        return r;
    }

    Jet& combine(const Jet& o, double sign)
    {
        if (o.n_ > n_) n_ = o.n_;
        v_ += sign * o.v_;
        for (std::size_t i = 0; i < d1_.size(); ++i) d1_[i] += sign * o.d1_[i];
        for (std::size_t i = 0; i < d2_.size(); ++i) d2_[i] += sign * o.d2_[i];
        for (std::size_t i = 0; i < d3_.size(); ++i) d3_[i] += sign * o.d3_[i];
        return *this;
    }

    void scale(Complex c)
    {
        v_ *= c;
        for (auto& x : d1_) x *= c;
        for (auto& x : d2_) x *= c;
        for (auto& x : d3_) x *= c;
    }

    int n_ = 0;
    Complex v_{};
    std::array<Complex, kMaxVars> d1_{};
    std::array<Complex, (Order >= 2 ? kMaxVars * kMaxVars : 0)> d2_{};
    std::array<Complex, (Order >= 3 ? kMaxVars * kMaxVars * kMaxVars : 0)> d3_{};
};

using Jet2 = Jet<2>;
using Jet3 = Jet<3>;

} // namespace bornlab
