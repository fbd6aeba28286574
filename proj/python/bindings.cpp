#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ev/decomposition.hpp"
#include "ev/dyadic.hpp"
#include "ev/forms.hpp"
#include "ev/harness.hpp"
#include "ev/maximal.hpp"
#include "ev/profiles.hpp"

namespace py = pybind11;
using namespace ev;

namespace {

SampledField field_from(py::array_t<double, py::array::c_style | py::array::forcecast> a, double L) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw std::invalid_argument("expected a square 2D array");
  Grid g{2, L, static_cast<std::int64_t>(a.shape(0))};
  validate_grid(g);
  return SampledField(g, std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<double> to_array(const SampledField& f) {
  py::array_t<double> out({f.n(), f.n()});
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

EntangledQuadruple quad(const std::vector<py::array_t<double>>& F, double L) {
  if (F.size() != 4) throw std::invalid_argument("expected four fields");
  EntangledQuadruple Q{field_from(F[0], L), field_from(F[1], L), field_from(F[2], L), field_from(F[3], L)};
  Q.validate();
  return Q;
}

KernelQuad kernels(const std::string& pair, double u, double v) {
  if (pair == "square") {
    const auto p = make_square_function_pair();
    return packet_quad(p.rho, p.sigma, u, v);
  }
  if (pair == "gaussian") {
    const auto p = gaussian_pair(1.0);
    return same_pair(p.rho, p.sigma);
  }
  throw std::invalid_argument("pair must be 'square' or 'gaussian'");
}

}  // namespace

PYBIND11_MODULE(_ev, m) {
  m.doc() = "numerical checks for entangled four-linear forms";

  py::class_<DyadicSquare>(m, "DyadicSquare")
      .def(py::init<int, std::int64_t, std::int64_t>(), py::arg("k"), py::arg("mx"), py::arg("my"))
      .def_readonly("k", &DyadicSquare::k)
      .def_readonly("mx", &DyadicSquare::mx)
      .def_readonly("my", &DyadicSquare::my)
      .def("side", &DyadicSquare::side)
      .def("contains", &DyadicSquare::contains)
      .def("__repr__", [](const DyadicSquare& s) {
        return "DyadicSquare(" + std::to_string(s.k) + ", " + std::to_string(s.mx) + ", " + std::to_string(s.my) + ")";
      });

  py::class_<ConvexTree>(m, "ConvexTree")
      .def(py::init<DyadicSquare, std::vector<DyadicSquare>>())
      .def("root", &ConvexTree::root)
      .def("members", [](const ConvexTree& t) { return std::vector<DyadicSquare>(t.members().begin(), t.members().end()); })
      .def("__len__", &ConvexTree::size);

  m.def("random_convex_tree", &random_convex_tree, py::arg("seed"), py::arg("max_depth"),
        py::arg("refine_probability"), py::arg("root") = DyadicSquare{0, 0, 0});
  m.def("boundary_ratio", [](const ConvexTree& t) { return boundary_weight(t).ratio_to_root(t.root()); });
  m.def("leaves", &leaves);

  m.def("phi_superposition", &phi_superposition);
  m.def("phi_hat", &phi_hat);
  m.def("psi_hat", &psi_hat);
  m.def("theta", &theta);
  m.def("vartheta", &vartheta);
  m.def("gaussian_pair_residual", [](double alpha, std::vector<double> ts, std::vector<double> taus) {
    return fourier_pair_residual_numeric(gaussian_pair(alpha), ts, taus).relative();
  });

  m.def(
      "box_average",
      [](const std::vector<py::array_t<double>>& F, double L, double p, double q, double t) {
        return box_average(quad(F, L), p, q, t);
      },
      py::arg("fields"), py::arg("L"), py::arg("p"), py::arg("q"), py::arg("t"));
  m.def(
      "pointwise_form",
      [](const std::vector<py::array_t<double>>& F, double L, double p, double q, double t, const std::string& pair,
         double u, double v) { return pointwise_form(quad(F, L), kernels(pair, u, v), p, q, t); },
      py::arg("fields"), py::arg("L"), py::arg("p"), py::arg("q"), py::arg("t"), py::arg("pair") = "square",
      py::arg("u") = 0.0, py::arg("v") = 0.0);
  m.def(
      "truncated_form",
      [](const std::vector<py::array_t<double>>& F, double L, int N, int spo, const std::string& pair, double u,
         double v, bool frequency_side) {
        const auto Q = quad(F, L);
        const auto cfg = TruncationConfig::symmetric(N, spo);
        const auto mu = CoefficientSequence::constant(cfg, 1.0);
        const auto K = kernels(pair, u, v);
        return (frequency_side ? frequency_side_form(Q, K, mu, cfg) : truncated_form(Q, K, mu, cfg)).value;
      },
      py::arg("fields"), py::arg("L"), py::arg("N") = 2, py::arg("steps_per_octave") = 2,
      py::arg("pair") = "square", py::arg("u") = 0.0, py::arg("v") = 0.0, py::arg("frequency_side") = false);

  m.def(
      "theta_average",
      [](py::array_t<double> F, double L, double t) { return to_array(theta_average(field_from(F, L), t)); },
      py::arg("field"), py::arg("L"), py::arg("t"));
  m.def(
      "tree_size",
      [](py::array_t<double> F, double L, const ConvexTree& tree) { return tree_size(field_from(F, L), tree).value; },
      py::arg("field"), py::arg("L"), py::arg("tree"));
  m.def(
      "quadratic_maximal",
      [](py::array_t<double> F, double L) { return to_array(quadratic_maximal(field_from(F, L)).values); },
      py::arg("field"), py::arg("L"));

  m.def("suites", [] {
    std::vector<std::string> out;
    for (const auto& s : suite_registry()) out.push_back(s.name);
    return out;
  });
  m.def(
      "run_suite",
      [](const std::string& config, const std::string& suite, std::optional<std::int64_t> trials) {
        auto c = load_config(config, suite);
        if (trials) c.trials = *trials;
        return py::module_::import("json").attr("loads")(run_suite(c).to_json().dump());
      },
      py::arg("config"), py::arg("suite"), py::arg("trials") = py::none());
}
