#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bornlab/catalog.hpp"
#include "bornlab/field.hpp"
#include "bornlab/grid.hpp"
#include "bornlab/model.hpp"

namespace bornlab {

// ---------------------------------------------------------------- double slit

struct DoubleSlitConfig {
    // domain
    Interval x_range{-48.0, 48.0};
    Interval y_range{-32.0, 32.0};
    std::size_t nx = 512;
    std::size_t ny = 256;
    // initial packet
    double x0 = -8.0;
    double y0 = 0.0;
    double sigma = 1.5;
    double k0 = 4.0;
    double mass = 1.0;
    double hbar = 1.0;
    // wall
    double barrier_x = 0.0;
    double thickness = 0.8;
    double slit_separation = 4.0;  // slit centers at y = +/- separation / 2
    double slit_width = 0.8;
    double barrier_height = 500.0;
    // detector and run
    double detector_x = 10.0;
    double dt = 0.008;
    std::size_t steps = 876;
    std::size_t flux_stride = 4;
    std::size_t bins = 64;
    double fringe_fraction = 0.05;  // local maxima below this share of the peak are ignored
    // pinned acceptance thresholds
    double min_distance = 0.1;
    int min_double_maxima = 3;
    int max_mixture_maxima = 2;
    double mirror_tolerance = 1e-3;
    double mass_tolerance = 1e-3;

    /// Throws std::invalid_argument on inconsistent geometry.
    void validate() const;
    Grid grid() const;
    Model model(SlitSelection which) const;
};

struct DetectorHistogram {
    std::size_t axis = 1;
    std::string collection = "time-integrated";
    std::vector<double> bin_edges;      // bins + 1
    std::vector<double> mass_per_bin;   // normalized by the transmitted mass
    std::vector<double> flux_per_cell;  // raw time-integrated flux density along y
    double transmitted_mass = 0.0;      // sum of clipped flux * dy
    double net_flux_mass = 0.0;         // unclipped
    double clipped_fraction = 0.0;      // |negative part| / |total|
    double upstream_mass = 0.0;         // mass with x < detector at the end
    double mass_balance = 0.0;          // net_flux_mass + upstream_mass
};

struct DoubleSlitResult {
    DetectorHistogram both, left, right;
    std::vector<double> mixture;  // (left + right) / 2 per bin
    double distance = 0.0;        // L1(both, mixture)
    double mirror_difference = 0.0;
    int double_maxima = 0;
    int mixture_maxima = 0;
};

DetectorHistogram run_slit(const DoubleSlitConfig& cfg, SlitSelection which);
DoubleSlitResult run_double_slit(const DoubleSlitConfig& cfg);

/// Local maxima with value >= fraction * max.
int count_maxima(const std::vector<double>& h, double fraction);
double l1_distance(const std::vector<double>& a, const std::vector<double>& b);
/// L1 distance between a and b reflected about the bin centre.
double mirror_difference(const std::vector<double>& a, const std::vector<double>& b);

// ---------------------------------------------------------------- moments

struct MomentRow {
    std::string observable;  // "energy", "position[a]", "momentum[a]"
    int order = 1;
    double kolmogorov = 0.0;
    double qm = 0.0;
    double abs_diff = 0.0;
    std::string qm_source;  // "grid" or "closed-form"
};

struct MomentTable {
    std::vector<MomentRow> rows;
    const MomentRow& find(const std::string& observable, int order) const;
};

/// Compares E[X^k] under the Born measure with <psi, X^k psi> for energy
/// (k = 1..k_max), every position axis (k = 1..k_max) and drift momentum
/// (k = 1, 2). The state is sampled at time t.
MomentTable moment_divergence_report(const CatalogState& state, const Model& model, const Grid& grid, int k_max,
                                     double t = 0.0);

// ---------------------------------------------------------------- uncertainty

struct UncertaintyAxis {
    std::size_t axis = 0;
    double sigma_x = 0.0;
    double sigma_p_qm = 0.0;
    double m_sigma_v = 0.0;
    double m_sigma_u = 0.0;  // m sqrt(E[u^2])
    double qm_product = 0.0;     // sigma_x * sigma_p_qm
    double drift_product = 0.0;  // sigma_x * m sigma_v
    double decomposition_residual = 0.0;  // |sigma_p^2 - m^2 (sigma_v^2 + E[u^2])|
    double decomposition_relative = 0.0;
};

std::vector<UncertaintyAxis> uncertainty_report(const ComplexField& state, const Model& model, std::size_t body);

} // namespace bornlab
