#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aop/analytic.hpp"
#include "aop/experiment.hpp"
#include "aop/md1_waiting.hpp"
#include "aop/mobility.hpp"
#include "aop/simulation.hpp"

namespace py = pybind11;
using namespace aop;

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Age of Positioning: closed forms and Monte Carlo simulation";

    py::register_exception<StabilityError>(m, "StabilityError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    py::enum_<Mode>(m, "Mode").value("MA", Mode::MA).value("DR", Mode::DR);
    py::enum_<Discipline>(m, "Discipline")
        .value("MM1", Discipline::MM1)
        .value("DM1", Discipline::DM1)
        .value("MD1", Discipline::MD1)
        .value("DD1", Discipline::DD1);

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<double, Mode, double, double>(), py::arg("v") = 5.0, py::arg("mode") = Mode::MA,
             py::arg("epsilon") = 0.0, py::arg("peb0") = 0.0)
        .def_property_readonly("v", &ModelParams::v)
        .def_property_readonly("mode", &ModelParams::mode)
        .def_property_readonly("epsilon", &ModelParams::epsilon)
        .def_property_readonly("kappa", [](const ModelParams& p) { return kappa(p); })
        .def("__repr__", [](const ModelParams& p) {
            return "ModelParams(v=" + std::to_string(p.v()) + ", mode=" + std::string(to_string(p.mode())) +
                   ", epsilon=" + std::to_string(p.epsilon()) + ")";
        });

    py::class_<QueueParams>(m, "QueueParams")
        .def(py::init<Discipline, double, double, double>(), py::arg("discipline"), py::arg("lam") = 20.0,
             py::arg("mu") = 20.0, py::arg("p") = 0.5)
        .def_property_readonly("discipline", &QueueParams::discipline)
        .def_property_readonly("lam", &QueueParams::lambda)
        .def_property_readonly("mu", &QueueParams::mu)
        .def_property_readonly("p", &QueueParams::p)
        .def_property_readonly("rho", &QueueParams::rho)
        .def("is_stable", &QueueParams::is_stable)
        .def("with_p", &QueueParams::with_p);

    py::class_<AopBreakdown>(m, "AopBreakdown")
        .def_readonly("e_g1", &AopBreakdown::e_g1)
        .def_readonly("e_g2", &AopBreakdown::e_g2)
        .def_readonly("e_g3", &AopBreakdown::e_g3)
        .def_readonly("e_q", &AopBreakdown::e_q)
        .def_readonly("aop", &AopBreakdown::aop)
        .def_readonly("discipline", &AopBreakdown::discipline);

    m.def("aop_analytic", &aop_analytic, py::arg("model"), py::arg("queue"), py::arg("md1_tol") = 1e-8,
          "Closed-form AoP breakdown for the queue's discipline.");
    m.def("solve_beta", [](const QueueParams& q) {
        const auto s = solve_beta(q);
        return py::make_tuple(s.beta, s.residual);
    }, py::arg("queue"), "D/M/1 root beta and its residual.");
    m.def("fw_cdf", &fw_cdf, py::arg("w"), py::arg("queue"), "M/D/1 waiting-time CDF.");
    m.def("g_of_s", &g_of_s, py::arg("s"), py::arg("queue"));
    m.def("t_k", py::overload_cast<std::size_t, const ModelParams&, const QueueParams&>(&t_k), py::arg("k"),
          py::arg("model"), py::arg("queue"));

    py::class_<OptimalPoll>(m, "OptimalPoll")
        .def_readonly("p", &OptimalPoll::p)
        .def_readonly("aop", &OptimalPoll::aop)
        .def_readonly("at_boundary", &OptimalPoll::at_boundary)
        .def_readonly("grid", &OptimalPoll::grid);
    m.def("optimal_p", [](const ModelParams& model, const QueueParams& queue, double p_min, std::size_t grid_points) {
        OptimizeOptions o;
        o.p_min = p_min;
        o.grid_points = grid_points;
        return optimal_p(model, queue, o);
    }, py::arg("model"), py::arg("queue"), py::arg("p_min") = 0.01, py::arg("grid_points") = 60);

    py::class_<AopEstimate>(m, "AopEstimate")
        .def_readonly("mean", &AopEstimate::mean)
        .def_readonly("ci95_halfwidth", &AopEstimate::ci95_halfwidth)
        .def_readonly("n_cycles", &AopEstimate::n_cycles)
        .def_readonly("horizon", &AopEstimate::horizon);
    m.def("simulate", [](const ModelParams& model, const QueueParams& queue, std::size_t replications,
                         std::size_t cycles, std::uint64_t seed, unsigned threads) {
        SimulationOptions o;
        o.replications = replications;
        o.cycles_per_replication = cycles;
        o.seed = seed;
        o.threads = threads;
        py::gil_scoped_release release;
        return simulate_aop(model, queue, o).pooled;
    }, py::arg("model"), py::arg("queue"), py::arg("replications") = 20, py::arg("cycles") = 10000,
          py::arg("seed") = 1, py::arg("threads") = 0, "Monte Carlo AoP pooled over replications.");

    py::class_<HopRecord>(m, "HopRecord")
        .def_readonly("duration", &HopRecord::duration)
        .def_readonly("theta", &HopRecord::theta)
        .def_readonly("delta_err", &HopRecord::delta_err)
        .def_readonly("polled", &HopRecord::polled);
    m.def("generate_hops", &generate_hops, py::arg("queue"), py::arg("model"), py::arg("horizon"), py::arg("seed"));

    m.attr("CSV_HEADER") = std::string(kResultCsvHeader);
}
