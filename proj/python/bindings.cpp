#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nelson/action.hpp"
#include "nelson/bounds.hpp"
#include "nelson/fiber.hpp"
#include "nelson/nonfock.hpp"
#include "nelson/semigroup.hpp"
#include "nelson/verify.hpp"

namespace py = pybind11;
using namespace nelson;

namespace {

py::dict fit_dict(const semigroup::EnergyFit& f) {
    py::dict d;
    d["t"] = f.t;
    d["lnZ"] = f.lnZ;
    d["stderr"] = f.std_err;
    d["energy"] = f.energy;
    d["energy_err"] = f.energy_err;
    d["window"] = py::make_tuple(f.t_lo, f.t_hi);
    d["convexity_ok"] = f.convexity_ok;
    d["log_coef"] = f.log_coef;
    d["n_paths"] = f.n_paths;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Path-integral engine for the renormalized Nelson model";

    const auto base = py::register_exception<Error>(m, "NelsonError");
    py::register_exception<DomainError>(m, "DomainError", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);
    py::register_exception<VarianceBlowup>(m, "VarianceBlowup", base);

    py::enum_<kernel::ChiKind>(m, "Chi").value("sharp", kernel::ChiKind::sharp).value("taper", kernel::ChiKind::taper);

    py::class_<kernel::ModelParams>(m, "ModelParams")
        .def(py::init([](double eps, double mu, int N, double kappa, double lambda_split, kernel::ChiKind chi,
                         int radial, int angular) {
                 kernel::ModelParams p;
                 p.eps = eps;
                 p.mu = mu;
                 p.n_particles = N;
                 p.kappa = kappa;
                 p.lambda_split = lambda_split;
                 p.chi = chi;
                 p.grid.radial_nodes = radial;
                 p.grid.angular_nodes = angular;
                 p.validate();
                 return p;
             }),
             py::arg("eps") = 1.0, py::arg("mu") = 0.0, py::arg("N") = 1, py::arg("kappa") = kernel::kInf,
             py::arg("lambda_split") = 0.0, py::arg("chi") = kernel::ChiKind::sharp, py::arg("radial") = 128,
             py::arg("angular") = 26)
        .def_readwrite("eps", &kernel::ModelParams::eps)
        .def_readwrite("mu", &kernel::ModelParams::mu)
        .def_readwrite("N", &kernel::ModelParams::n_particles)
        .def_readwrite("kappa", &kernel::ModelParams::kappa)
        .def_readwrite("lambda_split", &kernel::ModelParams::lambda_split)
        .def("__repr__", [](const kernel::ModelParams& p) {
            return "ModelParams(eps=" + std::to_string(p.eps) + ", N=" + std::to_string(p.n_particles) +
                   ", kappa=" + std::to_string(p.kappa) + ")";
        });

    py::class_<McControls>(m, "McControls")
        .def(py::init([](int n_paths, double dt, std::uint64_t seed, int threads) {
                 return McControls{n_paths, dt, seed, threads};
             }),
             py::arg("n_paths") = 1024, py::arg("dt") = 1e-3, py::arg("seed") = 1, py::arg("threads") = 0)
        .def_readwrite("n_paths", &McControls::n_paths)
        .def_readwrite("dt", &McControls::dt)
        .def_readwrite("seed", &McControls::seed)
        .def_readwrite("threads", &McControls::threads);

    m.def("renorm_energy", [](const kernel::ModelParams& p) { return kernel::renorm_energy(p); });
    m.def("renorm_energy_closed", [](double eps, double kappa) { return kernel::renorm_energy_closed(eps, kappa); },
          py::arg("eps"), py::arg("kappa"));

    m.def(
        "sample_path",
        [](std::uint64_t seed, std::uint64_t stream, int n_steps, double dt, int N) {
            const auto p = paths::sample_path(seed, stream, n_steps, dt, N);
            py::array_t<double> out({p.n_steps + 1, p.dim()});
            std::copy(p.values.begin(), p.values.end(), out.mutable_data());
            return out;
        },
        py::arg("seed"), py::arg("stream"), py::arg("n_steps"), py::arg("dt"), py::arg("N") = 1);

    m.def(
        "action",
        [](const kernel::ModelParams& p, std::uint64_t seed, std::uint64_t stream, double t, double dt,
           std::vector<double> x) {
            if (x.empty()) x.assign(3 * p.n_particles, 0.0);
            const int n = int(std::lround(t / dt));
            const auto path = paths::sample_path(seed, stream, n, dt, p.n_particles);
            const auto a = action::action_decomposed(path, x, n, p);
            py::dict d;
            d["b"] = a.b;
            d["c_minus"] = a.c_minus;
            d["c_plus"] = a.c_plus;
            d["v"] = a.v;
            d["m"] = a.m;
            d["u"] = a.u_total;
            d["u_direct"] = a.u_direct ? py::cast(*a.u_direct) : py::none();
            return d;
        },
        py::arg("params"), py::arg("seed"), py::arg("stream"), py::arg("t"), py::arg("dt"),
        py::arg("x") = std::vector<double>{});

    m.def(
        "ground_energy",
        [](const kernel::ModelParams& p, const std::vector<double>& t_grid, const McControls& mc,
           const std::string& potential, double omega0, bool log_term) {
            semigroup::PotentialSpec V;
            if (potential == "harmonic") {
                V.kind = semigroup::PotentialSpec::Kind::harmonic;
                V.omega0 = omega0;
            } else if (potential != "zero") {
                throw ConfigError("potential must be zero or harmonic");
            }
            semigroup::EnergyOptions o;
            o.fit.log_term = log_term;
            semigroup::EnergyFit f;
            {
                py::gil_scoped_release release;
                f = semigroup::ground_energy(p, V, t_grid, mc, o);
            }
            return fit_dict(f);
        },
        py::arg("params"), py::arg("t_grid"), py::arg("mc"), py::arg("potential") = "zero", py::arg("omega0") = 1.0,
        py::arg("log_term") = false);

    m.def(
        "fiber_energy",
        [](std::array<double, 3> xi, const kernel::ModelParams& p, const std::vector<double>& t_grid,
           const McControls& mc) {
            semigroup::EnergyFit f;
            {
                py::gil_scoped_release release;
                f = fiber::fiber_energy(xi, p, t_grid, mc);
            }
            return fit_dict(f);
        },
        py::arg("xi"), py::arg("params"), py::arg("t_grid"), py::arg("mc"));

    m.def("pekar_gaussian", [] { return bounds::pekar_energy({}).energy; });
    m.def("pekar_energy_constant", [] { return bounds::kPekarEnergy; });
    m.def(
        "pair_lemma_check",
        [](int N, std::int64_t trials, std::uint64_t seed, double sigma) {
            bounds::PairDistribution d;
            d.sigma = sigma;
            const auto r = bounds::pair_lemma_check(N, d, trials, seed);
            py::dict out;
            out["lhs"] = r.lhs;
            out["rhs"] = r.rhs;
            out["rhs_exact"] = r.rhs_exact;
            out["violated"] = r.violated;
            return out;
        },
        py::arg("N"), py::arg("trials") = 100000, py::arg("seed") = 1, py::arg("sigma") = 0.25);
    m.def(
        "bound_table",
        [](double eps, int N, double mu, double t, double p) {
            py::list rows;
            for (const auto& r : bounds::bound_table(eps, N, mu, t, p))
                rows.append(py::make_tuple(r.quantity, r.formula, r.value, r.regime, r.anchor));
            return rows;
        },
        py::arg("eps"), py::arg("N"), py::arg("mu") = 0.0, py::arg("t") = 1.0, py::arg("p") = 2.0);

    m.def("suite_names", &verify::suite_names);
    m.def(
        "run_suite",
        [](const std::string& name) {
            py::gil_scoped_release release;
            return verify::to_json(verify::run_suite(name, verify::SuiteConfig{}));
        },
        py::arg("name"));
}
