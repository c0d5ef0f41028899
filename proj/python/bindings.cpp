#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cubeperc/birthday.hpp"
#include "cubeperc/exact.hpp"
#include "cubeperc/experiments.hpp"
#include "cubeperc/samplers.hpp"
#include "cubeperc/stats.hpp"
#include "cubeperc/weights.hpp"

namespace py = pybind11;
using namespace cubeperc;

namespace {

py::object to_pyint(const BigInt& z) {
    return py::reinterpret_steal<py::object>(PyLong_FromString(z.str().c_str(), nullptr, 10));
}

py::dict sample_dict(const SampleRecord& r) {
    py::dict out;
    out["even"] = r.set.even.members();
    out["odd"] = r.set.odd.members();
    out["side"] = to_string(r.chosen_side);
    out["s1_size"] = r.s1_size;
    out["s2_size"] = r.s2_size;
    out["defect_size"] = r.defect_size;
    return out;
}

ExperimentConfig config_from(const std::string& command, const py::dict& kw) {
    ExperimentConfig cfg;
    const Command commands[] = {Command::Exact, Command::Clt,    Command::Critical,
                                Command::Birthday, Command::Sample, Command::Census};
    bool found = false;
    for (auto c : commands)
        if (command == to_string(c)) cfg.command = c, found = true;
    if (!found) throw DomainError("unknown command '" + command + "'");
    for (auto item : kw) {
        const auto key = item.first.cast<std::string>();
        const auto val = item.second;
        if (key == "d") cfg.d = val.cast<int>();
        else if (key == "p") cfg.p = val.cast<double>();
        else if (key == "lambda_" || key == "lam") cfg.lambda = val.cast<double>();
        else if (key == "regime") cfg.regime = parse_regime(val.cast<std::string>());
        else if (key == "seed") cfg.seed = val.cast<std::uint64_t>();
        else if (key == "instances") cfg.instances = val.cast<std::uint64_t>();
        else if (key == "trials") cfg.trials = val.cast<std::uint64_t>();
        else if (key == "n") cfg.n = val.cast<std::uint64_t>();
        else if (key == "format") cfg.format = val.cast<std::string>() == "json" ? OutputFormat::Json : OutputFormat::Csv;
        else if (key == "workers") cfg.workers = val.cast<unsigned>();
        else if (key == "oracle") cfg.oracle = val.cast<bool>();
        else if (key == "with_exact") cfg.with_exact = val.cast<bool>();
        else if (key == "variant") cfg.variant = parse_variant(val.cast<std::string>());
        else if (key == "sampler") cfg.sampler = val.cast<std::string>();
        else if (key == "d_grid") cfg.d_grid = val.cast<std::vector<int>>();
        else if (key == "accept") cfg.accept = val.cast<bool>();
        else throw DomainError("unknown option '" + key + "'");
    }
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_cubeperc, m) {
    m.doc() = "Independent sets in percolated hypercubes";
    m.attr("__version__") = CUBEPERC_VERSION;

    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<VertexError>(m, "VertexError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<FugacityError>(m, "FugacityError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
    py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_NotImplementedError);

    py::class_<PercolationInstance>(m, "PercolationInstance")
        .def_property_readonly("d", &PercolationInstance::d)
        .def_property_readonly("p", &PercolationInstance::p)
        .def_property_readonly("seed", &PercolationInstance::seed)
        .def("open_edge_count", &PercolationInstance::open_edge_count)
        .def("edge_open", py::overload_cast<Vertex, int>(&PercolationInstance::edge_open, py::const_), py::arg("v"),
             py::arg("coord"))
        .def("open_degree", [](const PercolationInstance& inst, Vertex v) {
            inst.dim().check_vertex(v);
            return open_degree(inst, v);
        })
        .def("degree_histogram", [](const PercolationInstance& inst, const std::string& side) {
            return degree_histogram(inst, side == "odd" ? Parity::Odd : Parity::Even);
        }, py::arg("side") = "even")
        .def("__repr__", [](const PercolationInstance& inst) { return instance_header_json(inst); });

    m.def("build_percolation", &build_percolation, py::arg("d"), py::arg("p"), py::arg("seed"));
    m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("instance"), py::arg("trial") = 0);

    m.def("phi_sums", [](const PercolationInstance& inst, double lambda) {
        const auto ph = phi_sums(inst, lambda);
        return py::make_tuple(ph.phi_even, ph.phi_odd);
    }, py::arg("inst"), py::arg("lam") = 1.0);
    m.def("vertex_weight", &vertex_weight, py::arg("inst"), py::arg("v"), py::arg("lam") = 1.0);
    m.def("mu_theory", &mu_theory, py::arg("d"), py::arg("p"), py::arg("lam") = 1.0);
    m.def("sigma_sq_theory", &sigma_sq_theory, py::arg("d"), py::arg("p"), py::arg("lam") = 1.0);
    m.def("cov_theory", &cov_theory, py::arg("d"), py::arg("p"), py::arg("lam") = 1.0);
    m.def("moment_theory", &moment_theory, py::arg("d"), py::arg("p"), py::arg("lam"), py::arg("k"));
    m.def("critical_p", &critical_p, py::arg("lam"));

    m.def("exact_partition", [](const PercolationInstance& inst, double lambda) {
        const auto z = lambda == 1.0 ? exact_partition(inst) : exact_partition_hardcore(inst, lambda);
        py::dict out;
        out["log_z"] = z.log_z;
        out["z_integer"] = z.z_integer ? to_pyint(*z.z_integer) : py::none();
        return out;
    }, py::arg("inst"), py::arg("lam") = 1.0);
    m.def("naive_count", &naive_count, py::arg("inst"));
    m.def("expected_partition", &expected_partition, py::arg("d"), py::arg("p"));
    m.def("defect_distribution_exact", [](const PercolationInstance& inst) {
        return defect_distribution_exact(inst).probs;
    }, py::arg("inst"));
    m.def("dimer_census", [](int d, double p) {
        const auto c = dimer_census(d, p);
        return py::make_tuple(c.pair_count, c.census);
    }, py::arg("d"), py::arg("p"));

    m.def("std_normal_cdf", &std_normal_cdf, py::arg("x"));
    m.def("lognormal_sum_cdf", &lognormal_sum_cdf, py::arg("x"), py::arg("lam") = 1.0);
    m.def("poisson_pmf", &poisson_pmf, py::arg("theta"), py::arg("k"));
    m.def("poisson_tail_exact", [](double theta, double t, const std::string& side) {
        return poisson_tail_exact(theta, t, side == "lower" ? TailSide::Lower
                                            : side == "two_sided" ? TailSide::TwoSided : TailSide::Upper);
    }, py::arg("theta"), py::arg("t"), py::arg("side") = "upper");
    m.def("poisson_tv_exact", [](double a, double b) { return poisson_tv_exact(a, b).value; }, py::arg("theta1"),
          py::arg("theta2"));
    m.def("tv_discrete", [](const std::vector<double>& p, const std::vector<double>& q) { return tv_discrete(p, q); });

    m.def("birthday", [](const PercolationInstance& inst, std::uint64_t n, std::uint64_t trials, std::uint64_t seed,
                         double lambda) {
        const auto meas = build_measure(inst, Parity::Even, lambda);
        Xoshiro256ss rng(seed);
        const auto run = run_birthday(meas, n, trials, rng);
        py::dict out;
        out["theta"] = theta(meas, n);
        out["mean_repeat"] = run.mean_repeat;
        out["mean_neighbor"] = run.mean_neighbor;
        out["p_no_collision"] = run.p_no_collision;
        out["collide_pmf"] = run.collide_pmf;
        return out;
    }, py::arg("inst"), py::arg("n"), py::arg("trials"), py::arg("seed"), py::arg("lam") = 1.0);

    m.def("approx_samples", [](const PercolationInstance& inst, std::uint64_t count, std::uint64_t seed, double lambda,
                               const std::string& variant) {
        const ApproxSampler sampler(inst, lambda, parse_variant(variant));
        Xoshiro256ss rng(seed);
        py::list out;
        for (std::uint64_t i = 0; i < count; ++i) out.append(sample_dict(sampler.sample(rng)));
        return out;
    }, py::arg("inst"), py::arg("count"), py::arg("seed"), py::arg("lam") = 1.0, py::arg("variant") = "tilted");
    m.def("tv_samplers_exact", [](const PercolationInstance& inst, double lambda, const std::string& variant) {
        return tv_samplers_exact(inst, lambda, parse_variant(variant));
    }, py::arg("inst"), py::arg("lam") = 1.0, py::arg("variant") = "tilted");

    m.def("_run_experiment", [](const std::string& command, const py::dict& kw) {
        const auto cfg = config_from(command, kw);
        std::ostringstream data;
        Report rep;
        {
            py::gil_scoped_release release;
            rep = run_experiment(cfg, data);
        }
        return py::make_tuple(data.str(), rep.summary.dump(), rep.manifest.dump(), rep.passed, rep.failures);
    });
}
