#include "bornlab/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace bornlab::spectral {

namespace {

// FFTW planning is not thread-safe; execution with new-array calls is.
class PlanCache {
public:
    ~PlanCache()
    {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(const std::vector<std::size_t>& shape, int sign)
    {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(shape, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::vector<int> n(shape.begin(), shape.end());
        std::size_t total = 1;
        for (auto s : shape) total *= s;
        std::vector<Complex> scratch(total);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft(static_cast<int>(n.size()), n.data(), buf, buf,
                                       sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw std::runtime_error("fft: planning failed");
        plans_.emplace(std::move(key), plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::vector<std::size_t>, int>, fftw_plan> plans_;
};

PlanCache& cache()
{
    static PlanCache c;
    return c;
}

} // namespace

void fft(std::span<Complex> data, const std::vector<std::size_t>& shape, int sign)
{
    fftw_plan plan = cache().get(shape, sign);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, buf, buf);
}

double wavenumber(const Grid& grid, std::size_t axis, std::size_t j)
{
    const std::size_t n = grid.points(axis);
    const double m = j < n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
    return 2.0 * std::numbers::pi * m / grid.length(axis);
}

void require_spectral(const Grid& grid, const char* what)
{
    if (!grid.spectral_capable()) {
        throw std::invalid_argument(std::string(what)
                                    + ": grid is not spectral-capable (power-of-two points per axis)");
    }
}

std::vector<Complex> apply_multiplier(const Grid& grid, std::span<const Complex> hat, const Orders& orders)
{
    const std::size_t d = grid.dim();
    std::vector<std::vector<Complex>> factor(d);
    for (std::size_t a = 0; a < d; ++a) {
        const std::size_t n = grid.points(a);
        factor[a].resize(n, Complex(1.0));
        if (orders[a] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (orders[a] % 2 == 1 && j == n / 2) {
                factor[a][j] = 0.0;
                continue;
            }
            const Complex ik(0.0, wavenumber(grid, a, j));
            Complex p(1.0);
            for (int o = 0; o < orders[a]; ++o) p *= ik;
            factor[a][j] = p;
        }
    }
    std::vector<Complex> out(hat.size());
    const double inv_n = 1.0 / static_cast<double>(grid.size());
    std::array<std::size_t, kMaxDim> idx{};
    for (std::size_t i = 0; i < out.size(); ++i) {
        Complex m(inv_n);
        for (std::size_t a = 0; a < d; ++a) {
            if (orders[a] != 0) m *= factor[a][idx[a]];
        }
        out[i] = hat[i] * m;
        // row-major odometer, last axis fastest
        for (std::size_t a = d; a-- > 0;) {
            if (++idx[a] < grid.points(a)) break;
            idx[a] = 0;
        }
    }
    fft(out, grid.shape(), +1);
    return out;
}

std::vector<Complex> derivative(const Grid& grid, std::span<const Complex> values, const Orders& orders)
{
    require_spectral(grid, "spectral derivative");
    std::vector<Complex> hat(values.begin(), values.end());
    fft(hat, grid.shape(), -1);
    return apply_multiplier(grid, hat, orders);
}

std::vector<double> derivative(const Grid& grid, std::span<const double> values, const Orders& orders)
{
    std::vector<Complex> c(values.begin(), values.end());
    auto d = derivative(grid, std::span<const Complex>(c), orders);
    std::vector<double> out(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i].real();
    return out;
}

} // namespace bornlab::spectral
