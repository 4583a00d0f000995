#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bornlab/app/config.hpp"
#include "bornlab/app/run.hpp"
#include "bornlab/catalog.hpp"
#include "bornlab/errors.hpp"
#include "bornlab/experiments.hpp"
#include "bornlab/madelung.hpp"
#include "bornlab/observables.hpp"
#include "bornlab/probability.hpp"
#include "bornlab/propagator.hpp"

namespace py = pybind11;
using namespace bornlab;

namespace {

template <typename T>
py::array_t<T> to_array(const std::vector<T>& v, const std::vector<std::size_t>& shape)
{
    std::vector<py::ssize_t> dims(shape.begin(), shape.end());
    py::array_t<T> out(dims);
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

template <typename T>
py::array_t<T> to_array(std::span<const T> v, const std::vector<std::size_t>& shape)
{
    return to_array(std::vector<T>(v.begin(), v.end()), shape);
}

// JSON <-> Python via the json module keeps the binding free of a converter.
py::object to_python(const app::Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

app::Json from_python(const py::object& o)
{
    return app::Json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::dict report_dict(const ResidualReport& r)
{
    py::dict d;
    d["equation"] = to_string(r.equation);
    d["norm_l2"] = r.norm_l2;
    d["norm_max"] = r.norm_max;
    d["h"] = r.h;
    d["dt"] = r.dt;
    d["masked_fraction"] = r.masked_fraction;
    d["reliable"] = r.reliable;
    return d;
}

DoubleSlitConfig slit_config(const py::object& overrides)
{
    app::Json doc = {{"command", "double-slit"}};
    if (!overrides.is_none()) doc["double_slit"] = from_python(overrides);
    return app::parse_config(doc).double_slit;
}

py::dict histogram_dict(const DetectorHistogram& h)
{
    py::dict d;
    d["bin_edges"] = h.bin_edges;
    d["mass_per_bin"] = h.mass_per_bin;
    d["transmitted_mass"] = h.transmitted_mass;
    d["clipped_fraction"] = h.clipped_fraction;
    d["mass_balance"] = h.mass_balance;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Born-measure observables, Madelung residuals and split-step evolution";

    py::register_exception<NumericalAbort>(m, "NumericalAbort", PyExc_ArithmeticError);
    py::register_exception<app::ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<Grid>(m, "Grid")
        .def(py::init([](const std::vector<std::pair<double, double>>& extents, const std::vector<std::size_t>& points) {
                 std::vector<Interval> ivs;
                 for (auto [lo, hi] : extents) ivs.push_back({lo, hi});
                 return Grid::make(ivs, points);
             }),
             py::arg("extents"), py::arg("points"))
        .def_property_readonly("dim", &Grid::dim)
        .def_property_readonly("size", &Grid::size)
        .def_property_readonly("shape", &Grid::shape)
        .def_property_readonly("cell_volume", &Grid::cell_volume)
        .def("spacing", &Grid::spacing)
        .def("coordinates", [](const Grid& g, std::size_t axis) {
            std::vector<double> x(g.points(axis));
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = g.coordinate(axis, i);
            return x;
        });

    py::class_<Model>(m, "Model")
        .def_property_readonly("dim", &Model::dim)
        .def_readonly("bodies", &Model::bodies)
        .def_readonly("dims_per_body", &Model::dims_per_body)
        .def_readonly("masses", &Model::masses)
        .def_readonly("hbar", &Model::hbar)
        .def_property_readonly("potential", [](const Model& mo) { return to_string(mo.potential.kind); });

    m.def("free_model", &free_model, py::arg("bodies"), py::arg("dims_per_body"), py::arg("masses"),
          py::arg("hbar") = 1.0);
    m.def("harmonic_model", &harmonic_model, py::arg("omega"), py::arg("bodies"), py::arg("dims_per_body"),
          py::arg("masses"), py::arg("hbar") = 1.0);
    m.def("coulomb_model", &coulomb_model);

    py::class_<ComplexField>(m, "Field")
        .def_property_readonly("grid", &ComplexField::grid)
        .def_property_readonly("values",
                               [](const ComplexField& f) { return to_array<Complex>(f.values(), f.grid().shape()); })
        .def_property_readonly("has_backing", &ComplexField::has_backing)
        .def("density", [](const ComplexField& f) {
            std::vector<double> rho(f.size());
            for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(f[i]);
            return to_array(rho, f.grid().shape());
        });

    m.def(
        "field_from_values",
        [](const Grid& g, py::array_t<Complex, py::array::c_style | py::array::forcecast> values) {
            if (static_cast<std::size_t>(values.size()) != g.size()) throw std::invalid_argument("values: size mismatch");
            return ComplexField(g, std::vector<Complex>(values.data(), values.data() + values.size()));
        },
        py::arg("grid"), py::arg("values"));

    py::class_<CatalogState>(m, "State")
        .def_property_readonly("label", &CatalogState::label)
        .def_property_readonly("family", &CatalogState::family)
        .def_property_readonly("dim", &CatalogState::dim)
        .def_property_readonly("eigen_energy", &CatalogState::eigen_energy)
        .def("sample", &CatalogState::sample, py::arg("grid"), py::arg("t") = 0.0);

    m.def("hydrogen_state", &hydrogen_state, py::arg("n"), py::arg("l"), py::arg("m"));
    m.def("hydrogen_grid", &hydrogen_grid, py::arg("n"), py::arg("points"));
    m.def("gaussian_packet", &gaussian_packet, py::arg("center"), py::arg("sigma"), py::arg("k0"), py::arg("model"));
    m.def("harmonic_eigenstate", &harmonic_eigenstate, py::arg("n"), py::arg("omega"), py::arg("model"));
    m.def("superpose", &superpose, py::arg("coefficients"), py::arg("states"));

    // Born measure and random variables. Masked cells come back as NaN.
    m.def(
        "born_density",
        [](const ComplexField& f) {
            const auto measure = born_measure(f);
            return to_array(measure.density(), f.grid().shape());
        },
        py::arg("state"));
    m.def(
        "prob_box",
        [](const ComplexField& f, const std::vector<std::pair<double, double>>& bounds) {
            Box box;
            for (auto [lo, hi] : bounds) box.bounds.push_back({lo, hi});
            return prob(born_measure(f), Event::from_boxes(f.grid(), {box}));
        },
        py::arg("state"), py::arg("bounds"));

    auto rv_arrays = [](const RandomVariable& rv) {
        py::list out;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (const auto& comp : rv.components) {
            std::vector<double> v(comp);
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!rv.mask.empty() && !rv.mask[i]) v[i] = nan;
            }
            out.append(to_array(v, rv.grid.shape()));
        }
        return out;
    };
    m.def("drift_velocity", [rv_arrays](const ComplexField& f, const Model& mo, std::size_t body) {
        return rv_arrays(drift_velocity(f, mo, body));
    }, py::arg("state"), py::arg("model"), py::arg("body") = 0);
    m.def("osmotic_velocity", [rv_arrays](const ComplexField& f, const Model& mo, std::size_t body) {
        return rv_arrays(osmotic_velocity(f, mo, body));
    }, py::arg("state"), py::arg("model"), py::arg("body") = 0);
    m.def("energy_field", [rv_arrays](const ComplexField& f, const Model& mo) { return rv_arrays(energy_rv(f, mo))[0]; },
          py::arg("state"), py::arg("model"));

    m.def(
        "expect_drift",
        [](const ComplexField& f, const Model& mo, std::size_t body) {
            return expectation(drift_velocity(f, mo, body), born_measure(f));
        },
        py::arg("state"), py::arg("model"), py::arg("body") = 0);
    m.def(
        "expect_energy",
        [](const ComplexField& f, const Model& mo, int order, bool central) {
            return expectation(energy_rv(f, mo), born_measure(f), order, central)[0];
        },
        py::arg("state"), py::arg("model"), py::arg("order") = 1, py::arg("central") = false);
    m.def("qm_energy", &qm_energy_expect, py::arg("state"), py::arg("model"));
    m.def("qm_momentum", &qm_momentum_expect, py::arg("state"), py::arg("model"), py::arg("body") = 0);

    m.def(
        "split_step",
        [](const ComplexField& f, const Model& mo, double dt, std::size_t steps, std::size_t stride) {
            EvolutionRecord rec;
            {
                py::gil_scoped_release release;
                rec = split_step(f, mo, dt, steps, stride);
            }
            py::dict d;
            d["times"] = rec.times;
            d["norms"] = rec.norms;
            d["states"] = rec.states;
            return d;
        },
        py::arg("state"), py::arg("model"), py::arg("dt"), py::arg("steps"), py::arg("stride") = 1);

    m.def(
        "madelung_residuals",
        [](const ComplexField& f, const Model& mo) {
            py::dict d;
            d["continuity"] = report_dict(continuity_residual_exact(f, mo));
            py::list force;
            for (std::size_t b = 0; b < mo.bodies; ++b) force.append(report_dict(force_residual_exact(f, mo, b)));
            d["force"] = force;
            d["vorticity"] = report_dict(vorticity_residual(f, mo));
            return d;
        },
        py::arg("state"), py::arg("model"));

    m.def(
        "moment_table",
        [](const CatalogState& s, const Model& mo, const Grid& g, int k_max, double t) {
            py::list rows;
            for (const auto& r : moment_divergence_report(s, mo, g, k_max, t).rows) {
                py::dict d;
                d["observable"] = r.observable;
                d["order"] = r.order;
                d["kolmogorov"] = r.kolmogorov;
                d["qm"] = r.qm;
                d["abs_diff"] = r.abs_diff;
                d["qm_source"] = r.qm_source;
                rows.append(d);
            }
            return rows;
        },
        py::arg("state"), py::arg("model"), py::arg("grid"), py::arg("k_max") = 4, py::arg("t") = 0.0);

    m.def(
        "uncertainty",
        [](const ComplexField& f, const Model& mo, std::size_t body) {
            py::list out;
            for (const auto& a : uncertainty_report(f, mo, body)) {
                py::dict d;
                d["axis"] = a.axis;
                d["sigma_x"] = a.sigma_x;
                d["sigma_p_qm"] = a.sigma_p_qm;
                d["m_sigma_v"] = a.m_sigma_v;
                d["m_sigma_u"] = a.m_sigma_u;
                d["qm_product"] = a.qm_product;
                d["decomposition_relative"] = a.decomposition_relative;
                out.append(d);
            }
            return out;
        },
        py::arg("state"), py::arg("model"), py::arg("body") = 0);

    m.def(
        "sample_positions",
        [](const ComplexField& f, std::size_t n, std::uint64_t seed) {
            const SampleSet s = sample(born_measure(f), n, seed);
            return to_array(s.coords, {s.count(), s.dim});
        },
        py::arg("state"), py::arg("n"), py::arg("seed"));
    m.def(
        "chi_square",
        [](const ComplexField& f, std::size_t n, std::uint64_t seed, std::size_t bins) {
            const auto measure = born_measure(f);
            const auto r = chi_square_test(measure, sample(measure, n, seed), bins);
            py::dict d;
            d["statistic"] = r.statistic;
            d["dof"] = r.dof;
            d["p_value"] = r.p_value;
            return d;
        },
        py::arg("state"), py::arg("n"), py::arg("seed"), py::arg("bins") = 64);

    m.def(
        "double_slit",
        [](const py::object& overrides) {
            const DoubleSlitConfig cfg = slit_config(overrides);
            DoubleSlitResult r;
            {
                py::gil_scoped_release release;
                r = run_double_slit(cfg);
            }
            py::dict d;
            d["both"] = histogram_dict(r.both);
            d["left"] = histogram_dict(r.left);
            d["right"] = histogram_dict(r.right);
            d["mixture"] = r.mixture;
            d["distance"] = r.distance;
            d["mirror_difference"] = r.mirror_difference;
            d["double_maxima"] = r.double_maxima;
            d["mixture_maxima"] = r.mixture_maxima;
            return d;
        },
        py::arg("config") = py::none());

    m.def(
        "run",
        [](const py::object& config, const std::filesystem::path& out) {
            const app::RunConfig cfg = app::parse_config(from_python(config));
            app::RunResult r;
            {
                py::gil_scoped_release release;
                r = app::run(cfg, out);
            }
            return to_python(app::summary_json(cfg, r));
        },
        py::arg("config"), py::arg("out") = std::filesystem::path("out"),
        "Runs one CLI command from a config dict and returns the summary.");
}
