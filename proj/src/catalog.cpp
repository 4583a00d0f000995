#include "bornlab/catalog.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "bornlab/calculus.hpp"

namespace bornlab {

namespace {

double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double binomial(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    return factorial(n) / (factorial(k) * factorial(n - k));
}

constexpr Complex kI{0.0, 1.0};

// ---------------------------------------------------------------------------
// Hydrogen: Psi = N e^{-r/n} L_{n-l-1}^{(2l+1)}(2r/n) (2/n)^l * r^l Y_lm, where
// r^l Y_lm is written as a solid-harmonic polynomial in x, y, z so the only
// non-polynomial pieces are r = |x| and the exponential.
class HydrogenForm final : public ClosedForm<HydrogenForm> {
public:
    HydrogenForm(int n, int l, int m)
        : n_(n), l_(l), m_(m), energy_(-0.5 / (n * n))
    {
        const int p = n - l - 1;
        const int alpha = 2 * l + 1;
        for (int i = 0; i <= p; ++i) {
            laguerre_.push_back((i % 2 == 0 ? 1.0 : -1.0) * binomial(p + alpha, p - i) / factorial(i));
        }
        const int am = std::abs(m);
        for (int k = 0; 2 * k <= l - am; ++k) {
            const double c = (k % 2 == 0 ? 1.0 : -1.0) * factorial(2 * l - 2 * k)
                             / (std::pow(2.0, l) * factorial(k) * factorial(l - k) * factorial(l - 2 * k - am));
            legendre_.push_back(c);
        }
        const double radial = std::sqrt(std::pow(2.0 / n, 3) * factorial(n - l - 1) / (2.0 * n * factorial(n + l)))
                              * std::pow(2.0 / n, l);
        const double angular = std::sqrt((2.0 * l + 1.0) / (4.0 * std::numbers::pi) * factorial(l - am) / factorial(l + am));
        // Condon-Shortley phase for m > 0; Y_l^{-|m|} = (-1)^{|m|} conj(Y_l^{|m|}) cancels it for m < 0.
        const double cs = (m > 0 && m % 2 == 1) ? -1.0 : 1.0;
        prefactor_ = radial * angular * cs;
    }

    std::size_t dim() const override { return 3; }

    template <typename S>
    S evaluate(const std::array<S, kMaxDim>& x, const S& t) const
    {
        const S r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        const S r = sqrt(r2);
        const S rho = r * (2.0 / n_);
        S lag = rho * 0.0 + laguerre_.back();
        for (std::size_t i = laguerre_.size() - 1; i-- > 0;) lag = lag * rho + laguerre_[i];

        const int am = std::abs(m_);
        const S xy = m_ >= 0 ? x[0] + x[1] * kI : x[0] - x[1] * kI;
        S ang = r2 * 0.0 + 1.0;
        for (int k = 0; k < am; ++k) ang = ang * xy;
        S poly = r2 * 0.0;
        S r2k = r2 * 0.0 + 1.0;
        for (std::size_t k = 0; k < legendre_.size(); ++k) {
            S term = r2k * legendre_[k];
            for (int e = 0; e < l_ - am - 2 * static_cast<int>(k); ++e) term = term * x[2];
            poly = poly + term;
            r2k = r2k * r2;
        }
        const S phase = exp(t * Complex(0.0, -energy_));
        return exp(r * (-1.0 / n_)) * lag * ang * poly * phase * prefactor_;
    }

private:
    int n_, l_, m_;
    double energy_;
    double prefactor_ = 1.0;
    std::vector<double> laguerre_;
    std::vector<double> legendre_;
};

// ---------------------------------------------------------------------------
// Product of 1D Hermite functions with per-axis mass, evolving by the eigen phase.
class HarmonicForm final : public ClosedForm<HarmonicForm> {
public:
    HarmonicForm(std::vector<int> n, double omega, std::vector<double> axis_mass, double hbar)
        : n_(std::move(n)), omega_(omega), hbar_(hbar)
    {
        energy_ = 0.0;
        prefactor_ = 1.0;
        for (std::size_t a = 0; a < n_.size(); ++a) {
            energy_ += hbar * omega * (n_[a] + 0.5);
            const double k = std::sqrt(axis_mass[a] * omega / hbar);
            scale_.push_back(k);
            prefactor_ *= std::sqrt(k);
        }
    }

    std::size_t dim() const override { return n_.size(); }
    double energy() const { return energy_; }

    template <typename S>
    S evaluate(const std::array<S, kMaxDim>& x, const S& t) const
    {
        S out = exp(t * Complex(0.0, -energy_ / hbar_)) * prefactor_;
        for (std::size_t a = 0; a < n_.size(); ++a) {
            const S xi = x[a] * scale_[a];
            S prev = xi * 0.0;
            S cur = exp(xi * xi * -0.5) * std::pow(std::numbers::pi, -0.25);
            for (int k = 0; k < n_[a]; ++k) {
                S next = xi * cur * std::sqrt(2.0 / (k + 1)) - prev * std::sqrt(static_cast<double>(k) / (k + 1));
                prev = cur;
                cur = next;
            }
            out = out * cur;
        }
        return out;
    }

private:
    std::vector<int> n_;
    double omega_, hbar_;
    double energy_;
    double prefactor_;
    std::vector<double> scale_;
};

// ---------------------------------------------------------------------------
// Gaussian packet with exact free evolution per axis:
//   (2 pi s^2)^{-1/4} sqrt(s^2 / s_t) exp(-(x - c - v t)^2 / (4 s_t) + i k (x - v t / 2)),
//   s_t = s^2 + i hbar t / (2 m), v = hbar k / m.
class GaussianForm final : public ClosedForm<GaussianForm> {
public:
    GaussianForm(std::vector<double> center, double sigma, std::vector<double> k0, std::vector<double> axis_mass,
                 double hbar)
        : center_(std::move(center)), sigma_(sigma), k0_(std::move(k0)), mass_(std::move(axis_mass)), hbar_(hbar)
    {
    }

    std::size_t dim() const override { return center_.size(); }
    const std::vector<double>& center() const { return center_; }
    double sigma() const { return sigma_; }
    const std::vector<double>& k0() const { return k0_; }

    template <typename S>
    S evaluate(const std::array<S, kMaxDim>& x, const S& t) const
    {
        const double s2 = sigma_ * sigma_;
        S out = t * 0.0 + std::pow(2.0 * std::numbers::pi * s2, -0.25 * static_cast<double>(dim()));
        for (std::size_t a = 0; a < dim(); ++a) {
            const double v = hbar_ * k0_[a] / mass_[a];
            const S st = t * Complex(0.0, hbar_ / (2.0 * mass_[a])) + s2;
            const S shift = x[a] - t * v - center_[a];
            const S arg = shift * shift * -0.25 / st + (x[a] - t * (0.5 * v)) * Complex(0.0, k0_[a]);
            out = out * sqrt(s2 / st) * exp(arg);
        }
        return out;
    }

private:
    std::vector<double> center_;
    double sigma_;
    std::vector<double> k0_;
    std::vector<double> mass_;
    double hbar_;
};

// Sum of components; linear, so jets of the parts add.
class SuperpositionForm final : public AnalyticForm {
public:
    explicit SuperpositionForm(std::vector<StateComponent> parts) : parts_(std::move(parts)) {}

    std::size_t dim() const override { return parts_.front().form->dim(); }

    Complex value(std::span<const double> x, double t) const override
    {
        Complex s{};
        for (const auto& p : parts_) s += p.coeff * p.form->value(x, t);
        return s;
    }
    Jet2 jet2(std::span<const double> x, double t, bool with_time) const override
    {
        Jet2 s = parts_.front().form->jet2(x, t, with_time) * parts_.front().coeff;
        for (std::size_t i = 1; i < parts_.size(); ++i) s += parts_[i].form->jet2(x, t, with_time) * parts_[i].coeff;
        return s;
    }
    Jet3 jet3(std::span<const double> x, double t, bool with_time) const override
    {
        Jet3 s = parts_.front().form->jet3(x, t, with_time) * parts_.front().coeff;
        for (std::size_t i = 1; i < parts_.size(); ++i) s += parts_[i].form->jet3(x, t, with_time) * parts_[i].coeff;
        return s;
    }

private:
    std::vector<StateComponent> parts_;
};

std::string number(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string join(const std::vector<int>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

Complex gaussian_overlap(const GaussianForm& a, const GaussianForm& b)
{
    // Product over axes of int conj(psi_a) psi_b dx, each a Gaussian integral
    // int exp(-A x^2 + B x - C) dx = sqrt(pi / A) exp(B^2 / (4 A) - C).
    Complex out(1.0);
    const double sa2 = a.sigma() * a.sigma();
    const double sb2 = b.sigma() * b.sigma();
    for (std::size_t i = 0; i < a.dim(); ++i) {
        const double ca = a.center()[i];
        const double cb = b.center()[i];
        const double A = 0.25 / sa2 + 0.25 / sb2;
        const Complex B = Complex(0.5 * ca / sa2 + 0.5 * cb / sb2, b.k0()[i] - a.k0()[i]);
        const double C = 0.25 * ca * ca / sa2 + 0.25 * cb * cb / sb2;
        const double norm = std::pow(2.0 * std::numbers::pi * sa2, -0.25) * std::pow(2.0 * std::numbers::pi * sb2, -0.25);
        out *= norm * std::sqrt(std::numbers::pi / A) * std::exp(B * B / (4.0 * A) - C);
    }
    return out;
}

} // namespace

Complex component_overlap(const StateComponent& a, const StateComponent& b, const std::string& family)
{
    if (family.rfind("gaussian", 0) == 0) {
        const auto* ga = dynamic_cast<const GaussianForm*>(a.form.get());
        const auto* gb = dynamic_cast<const GaussianForm*>(b.form.get());
        if (!ga || !gb) throw std::logic_error("component_overlap: gaussian family with non-gaussian form");
        return gaussian_overlap(*ga, *gb);
    }
    return a.quantum_numbers == b.quantum_numbers ? Complex(1.0) : Complex(0.0);
}

CatalogState::CatalogState(std::string family, std::string label, std::vector<StateComponent> components)
    : family_(std::move(family)), label_(std::move(label)), components_(std::move(components))
{
    if (components_.empty()) throw std::invalid_argument("catalog state: no components");
    if (components_.size() == 1 && components_.front().coeff == Complex(1.0)) {
        form_ = components_.front().form;
    } else {
        form_ = std::make_shared<SuperpositionForm>(components_);
    }
    eigen_energy_ = components_.front().energy;
    for (const auto& c : components_) {
        if (!c.energy || !eigen_energy_
            || std::abs(*c.energy - *eigen_energy_) > 1e-12 * std::max(1.0, std::abs(*eigen_energy_))) {
            eigen_energy_.reset();
            break;
        }
    }
}

std::optional<std::vector<int>> CatalogState::quantum_numbers() const
{
    if (components_.size() == 1 && !components_.front().quantum_numbers.empty()) {
        return components_.front().quantum_numbers;
    }
    return std::nullopt;
}

bool CatalogState::is_eigen_superposition() const
{
    for (const auto& c : components_) {
        if (!c.energy) return false;
    }
    return true;
}

double CatalogState::discrete_normalization(const Grid& grid) const
{
    return 1.0 / l2_norm(ComplexField::sample(grid, AnalyticBacking{form_, 0.0, 1.0}));
}

ComplexField CatalogState::sample(const Grid& grid, double t) const
{
    const double k = discrete_normalization(grid);
    return ComplexField::sample(grid, AnalyticBacking{form_, t, k});
}

CatalogState hydrogen_state(int n, int l, int m)
{
    if (n < 1 || l < 0 || l >= n || std::abs(m) > l) {
        throw std::invalid_argument("hydrogen_state: need n >= 1, 0 <= l < n, |m| <= l (got " + std::to_string(n) + ","
                                    + std::to_string(l) + "," + std::to_string(m) + ")");
    }
    StateComponent c;
    c.form = std::make_shared<HydrogenForm>(n, l, m);
    c.energy = -0.5 / (n * n);
    c.quantum_numbers = {n, l, m};
    return CatalogState("hydrogen", "hydrogen(" + join(c.quantum_numbers) + ")", {c});
}

Grid hydrogen_grid(int n, std::size_t points_per_axis)
{
    const double half = 20.0 * n * n;
    return Grid::make({{-half, half}, {-half, half}, {-half, half}}, {points_per_axis, points_per_axis, points_per_axis});
}

CatalogState gaussian_packet(std::vector<double> center, double sigma, std::vector<double> k0, const Model& model)
{
    model.validate();
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("gaussian_packet: sigma must be positive");
    if (center.size() != model.dim() || k0.size() != model.dim()) {
        throw std::invalid_argument("gaussian_packet: center and k0 need one entry per model coordinate");
    }
    std::vector<double> mass(model.dim());
    std::string family = "gaussian(hbar=" + number(model.hbar) + ";m=";
    for (std::size_t a = 0; a < model.dim(); ++a) {
        mass[a] = model.mass_of_axis(a);
        family += (a ? "," : "") + number(mass[a]);
    }
    family += ")";
    StateComponent c;
    c.form = std::make_shared<GaussianForm>(center, sigma, k0, mass, model.hbar);
    std::string label = "gaussian(sigma=" + number(sigma) + ")";
    return CatalogState(family, label, {c});
}

CatalogState harmonic_eigenstate(std::vector<int> n_per_axis, double omega, const Model& model)
{
    model.validate();
    if (!(omega > 0.0)) throw std::invalid_argument("harmonic_eigenstate: omega must be positive");
    if (n_per_axis.size() != model.dim()) {
        throw std::invalid_argument("harmonic_eigenstate: need one quantum number per model coordinate");
    }
    for (int n : n_per_axis) {
        if (n < 0) throw std::invalid_argument("harmonic_eigenstate: negative quantum number");
    }
    std::vector<double> mass(model.dim());
    std::string family = "harmonic(omega=" + number(omega) + ";hbar=" + number(model.hbar) + ";m=";
    for (std::size_t a = 0; a < model.dim(); ++a) {
        mass[a] = model.mass_of_axis(a);
        family += (a ? "," : "") + number(mass[a]);
    }
    family += ")";
    auto form = std::make_shared<HarmonicForm>(n_per_axis, omega, mass, model.hbar);
    StateComponent c;
    c.energy = form->energy();
    c.form = std::move(form);
    c.quantum_numbers = n_per_axis;
    return CatalogState(family, "harmonic(" + join(n_per_axis) + ")", {c});
}

CatalogState superpose(const std::vector<Complex>& coeffs, const std::vector<CatalogState>& states)
{
    if (coeffs.empty() || coeffs.size() != states.size()) {
        throw std::invalid_argument("superpose: need a non-empty coefficient list matching the states");
    }
    const std::string& family = states.front().family();
    std::vector<StateComponent> parts;
    std::string label = "superposition(";
    for (std::size_t k = 0; k < states.size(); ++k) {
        if (states[k].family() != family) {
            throw std::invalid_argument("superpose: states from different families (" + family + " vs "
                                        + states[k].family() + ") have no closed-form overlap");
        }
        for (const auto& c : states[k].components()) {
            StateComponent p = c;
            p.coeff = coeffs[k] * c.coeff;
            parts.push_back(std::move(p));
        }
        label += (k ? "," : "") + states[k].label();
    }
    label += ")";
    Complex norm2{};
    for (const auto& a : parts) {
        for (const auto& b : parts) norm2 += std::conj(a.coeff) * b.coeff * component_overlap(a, b, family);
    }
    const double n2 = norm2.real();
    if (!(n2 > 1e-24) || !std::isfinite(n2)) throw std::invalid_argument("superpose: combination has zero norm");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& p : parts) p.coeff *= inv;
    return CatalogState(family, label, std::move(parts));
}

} // namespace bornlab
