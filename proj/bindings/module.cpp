#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fptrec/control.hpp"
#include "fptrec/errors.hpp"
#include "fptrec/fpt.hpp"
#include "fptrec/graph.hpp"
#include "fptrec/io.hpp"
#include "fptrec/linalg.hpp"
#include "fptrec/metrics.hpp"

namespace py = pybind11;
using namespace fptrec;

namespace {

py::array_t<double> matrix_to_array(const linalg::Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    auto buf = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) buf(i, j) = m(i, j);
    return out;
}

py::array_t<double> vector_to_array(const linalg::Vector& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    auto buf = out.mutable_unchecked<1>();
    for (std::size_t i = 0; i < v.size(); ++i) buf(i) = v[i];
    return out;
}

fpt::TensorDomain parse_domain(const std::string& s) {
    if (s == "boundary") return fpt::TensorDomain::BoundaryByBoundary;
    if (s == "full") return fpt::TensorDomain::FullByFull;
    throw ValidationError("unknown tensor domain: " + s + " (want boundary|full)");
}

linalg::TolMode parse_mode(const std::string& s) {
    if (s == "relative") return linalg::TolMode::Relative;
    if (s == "absolute") return linalg::TolMode::Absolute;
    throw ValidationError("unknown tol mode: " + s + " (want relative|absolute)");
}

graph::VertexFunction interior_function(py::array_t<double, py::array::c_style> a) {
    if (a.ndim() != 1) throw ValidationError("expected a 1-d array");
    graph::VertexFunction f{graph::Domain::Interior,
                            linalg::Vector(static_cast<std::size_t>(a.shape(0)))};
    auto buf = a.unchecked<1>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i) f.values[static_cast<std::size_t>(i)] = buf(i);
    return f;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "centrality reconstruction from first-passage observations";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<graph::Graph>(m, "Graph")
        .def_static("from_json_file", &graph::Graph::from_json_file, py::arg("path"))
        .def_static("from_json_text", &graph::Graph::from_json_text, py::arg("text"))
        .def_property_readonly("size", &graph::Graph::size)
        .def_property_readonly("interior_size", &graph::Graph::interior_size)
        .def_property_readonly("boundary_size", &graph::Graph::boundary_size)
        .def_property_readonly("horizon",
                               [](const graph::Graph& g) -> py::object {
                                   if (g.horizon()) return py::cast(*g.horizon());
                                   return py::none();
                               })
        .def_property_readonly("ids",
                               [](const graph::Graph& g) {
                                   std::vector<std::string> out;
                                   for (std::size_t x = 0; x < g.size(); ++x)
                                       out.push_back(g.id(x));
                                   return out;
                               })
        .def("index_of", &graph::Graph::index_of, py::arg("id"))
        .def("is_boundary", &graph::Graph::is_boundary, py::arg("x"))
        .def("mu_known", &graph::Graph::mu_known, py::arg("x"))
        .def("mu", &graph::Graph::mu, py::arg("x"))
        .def("weight", &graph::Graph::weight, py::arg("x"), py::arg("y"))
        .def("__repr__", [](const graph::Graph& g) {
            return "<Graph " + std::to_string(g.size()) + " vertices, " +
                   std::to_string(g.boundary_size()) + " observed>";
        });

    py::class_<fpt::FptTensor>(m, "FptTensor")
        .def_property_readonly("horizon",
                               [](const fpt::FptTensor& r) { return r.horizon; })
        .def_property_readonly("domain",
                               [](const fpt::FptTensor& r) {
                                   return r.domain == fpt::TensorDomain::BoundaryByBoundary
                                              ? "boundary"
                                              : "full";
                               })
        .def_property_readonly("seed",
                               [](const fpt::FptTensor& r) -> py::object {
                                   if (r.seed) return py::cast(*r.seed);
                                   return py::none();
                               })
        .def_property_readonly("samples",
                               [](const fpt::FptTensor& r) -> py::object {
                                   if (r.samples) return py::cast(*r.samples);
                                   return py::none();
                               })
        .def("values",
             [](const fpt::FptTensor& r) {
                 const std::size_t side = r.side();
                 py::array_t<double> out(
                     {static_cast<std::size_t>(r.max_time()), side, side});
                 auto buf = out.mutable_unchecked<3>();
                 for (int t = 1; t <= r.max_time(); ++t)
                     for (std::size_t x = 0; x < side; ++x)
                         for (std::size_t y = 0; y < side; ++y)
                             buf(t - 1, x, y) = r.value(t, x, y);
                 return out;
             },
             "distributions as an array of shape (2T-1, n, n); slice t-1 holds time t")
        .def("escape_mass",
             [](const fpt::FptTensor& r) { return matrix_to_array(r.escape); })
        .def("__repr__", [](const fpt::FptTensor& r) {
            return "<FptTensor horizon " + std::to_string(r.horizon) + ", " +
                   std::to_string(r.side()) + "x" + std::to_string(r.side()) + ">";
        });

    m.def(
        "exact_fpt",
        [](const graph::Graph& g, int T, const std::string& domain) {
            return fpt::exact_fpt(g, T, parse_domain(domain));
        },
        py::arg("graph"), py::arg("T"), py::arg("domain") = "boundary",
        "first-passage distributions by the exact recursion (needs full centralities)");

    m.def(
        "simulate_fpt",
        [](const graph::Graph& g, long long samples, std::uint64_t seed, int T) {
            fpt::McConfig cfg;
            cfg.samples_per_pair = samples;
            cfg.seed = seed;
            cfg.horizon = T;
            return fpt::mc_fpt(g, cfg);
        },
        py::arg("graph"), py::arg("samples"), py::arg("seed"), py::arg("T"),
        "empirical first-passage distributions from seeded random walks");

    m.def("frne", &fpt::frne, py::arg("exact"), py::arg("empirical"),
          "Frobenius relative norm error between tensors, percent");

    m.def(
        "l2rne",
        [](py::array_t<double, py::array::c_style> truth,
           py::array_t<double, py::array::c_style> recovered) {
            return metrics::l2rne(interior_function(truth), interior_function(recovered));
        },
        py::arg("truth"), py::arg("recovered"),
        "relative recovery error in percent over matching vertex sets");

    m.def(
        "harmonic_basis",
        [](const graph::Graph& g) {
            py::list out;
            for (const auto& phi : graph::harmonic_basis(g))
                out.append(vector_to_array(phi.values));
            return out;
        },
        py::arg("graph"),
        "harmonic extension of each boundary indicator, in internal vertex order");

    m.def(
        "check_assumptions",
        [](const graph::Graph& g) {
            const auto rep = graph::check_assumptions(g);
            py::dict out;
            out["substochastic"] = rep.substochastic;
            out["unique_continuation"] = rep.unique_continuation;
            out["eigen_margin"] = rep.eigen_margin;
            return out;
        },
        py::arg("graph"));

    m.def(
        "reconstruct",
        [](const fpt::FptTensor& r, const graph::Graph& g, int T, double tol,
           const std::string& tol_mode) {
            const auto res = control::reconstruct_centrality(r, g, T, tol, parse_mode(tol_mode));
            std::vector<std::string> ids;
            for (std::size_t x = 0; x < g.interior_size(); ++x) ids.push_back(g.id(x));
            py::dict out;
            out["mu"] = vector_to_array(res.mu_interior.values);
            out["ids"] = ids;
            out["rank"] = res.rank_products;
            out["projection_only"] = res.projection_only;
            out["horizon_warning"] = res.horizon_warning;
            out["residuals"] = vector_to_array(res.residuals);
            out["sv_gram"] = vector_to_array(res.sv_gram);
            out["sv_products"] = vector_to_array(res.sv_products);
            out["tol_used"] = res.tol_used;
            return out;
        },
        py::arg("tensor"), py::arg("graph"), py::arg("T"), py::arg("tol") = 1e-12,
        py::arg("tol_mode") = "relative",
        "recover interior centralities from boundary passage data");

    m.def(
        "write_tensor_csv",
        [](const std::string& path, const fpt::FptTensor& r, const graph::Graph& g) {
            io::write_tensor_csv(path, r, g);
        },
        py::arg("path"), py::arg("tensor"), py::arg("graph"));

    m.def("read_tensor_csv", &io::read_tensor_csv, py::arg("path"), py::arg("graph"));
}
