#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "selflow/ensemble.hpp"
#include "selflow/pohozaev.hpp"
#include "selflow/rng.hpp"
#include "selflow/workflows.hpp"

namespace py = pybind11;
using namespace selflow;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Grid make_grid(int nx, int ny, double lx, double ly, const std::string& bc) {
    if (bc == "periodic") return Grid(nx, ny, lx, ly, VelocityBc::periodic, DirectorBc::periodic);
    if (bc == "neumann") return Grid(nx, ny, lx, ly, VelocityBc::no_slip, DirectorBc::neumann);
    if (bc == "dirichlet") return Grid(nx, ny, lx, ly, VelocityBc::no_slip, DirectorBc::dirichlet);
    throw ArgumentError("bc must be periodic, neumann or dirichlet");
}

// (ny, nx, K) array, x fastest, matching the node ordering
template <std::size_t K>
Array to_array(const Field<K>& f) {
    Array out({static_cast<py::ssize_t>(f.grid().ny()), static_cast<py::ssize_t>(f.grid().nx()),
               static_cast<py::ssize_t>(K)});
    std::copy(f.flat().begin(), f.flat().end(), out.mutable_data());
    return out;
}

DirectorField director_from(const Array& a, double lx, double ly, const std::string& bc) {
    if (a.ndim() != 3 || a.shape(2) != 3) throw ShapeError("director array must have shape (ny, nx, 3)");
    DirectorField d(make_grid(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), lx, ly, bc));
    std::copy(a.data(), a.data() + a.size(), d.flat().begin());
    return d;
}

Multiplier multiplier_from(const std::string& name) {
    for (Multiplier m : {Multiplier::radial, Multiplier::first_axis, Multiplier::shear})
        if (to_string(m) == name) return m;
    throw ArgumentError("multiplier must be radial, first_axis or shear");
}

py::dict run_one(const std::string& config_text, std::optional<std::uint64_t> seed) {
    const Problem pb = build_problem(parse_config(config_text));
    PathOptions opt;
    opt.checkpoint_every = pb.config.checkpoint_every;
    opt.sup_every_step = pb.config.sup_every_step;
    opt.budget = pb.config.budget;
    PathResult r;
    {
        py::gil_scoped_release release;
        r = run_path(pb, seed.value_or(pb.config.seed), opt);
    }
    const auto& names = EnergyRecord::column_names();
    Array records({static_cast<py::ssize_t>(r.checkpoints.size()), static_cast<py::ssize_t>(names.size())});
    auto rec = records.mutable_unchecked<2>();
    for (std::size_t c = 0; c < r.checkpoints.size(); ++c) {
        const auto v = r.checkpoints[c].columns();
        for (std::size_t k = 0; k < v.size(); ++k) rec(c, k) = v[k];
    }
    py::dict out;
    out["columns"] = names;
    out["records"] = records;
    out["sup_total"] = r.sup_total;
    out["dissipated"] = r.dissipated;
    out["budget_residual"] = r.budget_residual;
    out["max_divergence"] = r.monitors.max_divergence;
    out["max_transport"] = r.monitors.max_transport;
    out["max_director"] = r.monitors.max_director;
    out["dt"] = pb.params.dt;
    out["steps"] = pb.steps;
    out["u"] = to_array(r.final_state->u);
    out["d"] = to_array(r.final_state->d);
    return out;
}

}  // namespace

PYBIND11_MODULE(_selflow, m) {
    m.doc() = "Stochastic relaxed Ericksen-Leslie simulation and diagnostics";

    static py::exception<ArgumentError> argument_error(m, "ArgumentError", PyExc_ValueError);
    static py::exception<IoError> io_error(m, "IoError", PyExc_OSError);
    static py::exception<StabilityError> stability_error(m, "StabilityError", PyExc_ValueError);
    static py::exception<Error> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            py::set_error(argument_error, e.what());
        } catch (const ArgumentError& e) {
            py::set_error(argument_error, e.what());
        } catch (const ShapeError& e) {
            py::set_error(argument_error, e.what());
        } catch (const GeometryError& e) {
            py::set_error(argument_error, e.what());
        } catch (const StabilityError& e) {
            py::set_error(stability_error, e.what());
        } catch (const IoError& e) {
            py::set_error(io_error, e.what());
        } catch (const Error& e) {
            py::set_error(numerical_error, e.what());
        }
    });

    m.attr("output_format_version") = output_format_version;

    m.def("config_keys", &config_keys, "Names of every configuration key");
    m.def(
        "canonical_config", [](const std::string& text) { return parse_config(text).canonical(); },
        py::arg("text"), "Sorted canonical form of a configuration text");
    m.def(
        "config_hash", [](const std::string& text) { return parse_config(text).hash(); }, py::arg("text"));

    m.def("run_path", &run_one, py::arg("config"), py::arg("seed") = py::none(),
          "Run one path; returns checkpoint records and the final fields");

    m.def(
        "simulate",
        [](const std::string& text, const std::filesystem::path& out) {
            py::gil_scoped_release release;
            return simulate_workflow(parse_config(text), out).dir;
        },
        py::arg("config"), py::arg("out_dir"));
    m.def(
        "ensemble",
        [](const std::string& text, const std::filesystem::path& out, int threads) {
            py::gil_scoped_release release;
            return ensemble_workflow(parse_config(text), out, threads).dir;
        },
        py::arg("config"), py::arg("out_dir"), py::arg("threads") = 1);
    m.def(
        "sweep",
        [](const std::string& text, const std::filesystem::path& out, int threads) {
            py::gil_scoped_release release;
            return sweep_workflow(parse_config(text), out, threads).dir;
        },
        py::arg("config"), py::arg("out_dir"), py::arg("threads") = 1);

    m.def(
        "pohozaev_residual",
        [](const Array& d, double eps, double x0, double y0, double r, const std::string& multiplier, double lx,
           double ly, const std::string& bc) {
            const PohozaevReport p =
                pohozaev_residual(director_from(d, lx, ly, bc), eps, x0, y0, r, multiplier_from(multiplier));
            py::dict out;
            out["boundary_flux"] = p.boundary_flux;
            out["stress_bulk"] = p.stress_bulk;
            out["energy_bulk"] = p.energy_bulk;
            out["energy_flux"] = p.energy_flux;
            out["rhs"] = p.rhs;
            out["residual"] = p.residual;
            return out;
        },
        py::arg("d"), py::arg("eps"), py::arg("x0"), py::arg("y0"), py::arg("r"), py::arg("multiplier") = "radial",
        py::arg("lx") = 1.0, py::arg("ly") = 1.0, py::arg("bc") = "periodic");
    m.def(
        "defect_detect",
        [](const Array& d, double eps, std::optional<double> r, std::optional<double> delta0_sq, double lx, double ly,
           const std::string& bc) {
            const DirectorField f = director_from(d, lx, ly, bc);
            const DefectReport rep = defect_detect(f, eps, r.value_or(default_defect_radius(f.grid())),
                                                   delta0_sq.value_or(default_defect_threshold(f.grid(), eps)));
            std::vector<std::tuple<double, double, double>> centers;
            for (const auto& c : rep.centers) centers.emplace_back(c.x, c.y, c.energy);
            return centers;
        },
        py::arg("d"), py::arg("eps"), py::arg("r") = py::none(), py::arg("delta0_sq") = py::none(),
        py::arg("lx") = 1.0, py::arg("ly") = 1.0, py::arg("bc") = "periodic",
        "Defect centres (x, y, local energy)");

    m.def(
        "philox4x32",
        [](std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
            return Philox4x32::generate(ctr, key);
        },
        py::arg("counter"), py::arg("key"));

    m.def(
        "selftest",
        []() {
            std::ostringstream os;
            const bool ok = run_selftest(os);
            return py::make_tuple(ok, os.str());
        },
        "Run the built-in invariant checks; returns (passed, report)");
}
