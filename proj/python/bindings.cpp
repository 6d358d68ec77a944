#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cantorlab/pipeline.hpp"

namespace py = pybind11;
using namespace cantorlab;

namespace {

struct PyTower {
  std::shared_ptr<const GammaTower> tower;
  PotentialContext ctx;
};

PyTower make_tower(const std::string& gamma, int levels, const std::string& variant, unsigned precision) {
  PrecisionGuard guard(precision);
  const TowerVariant v = parse_variant(variant);
  auto t = v == TowerVariant::kInterval
               ? std::make_shared<const GammaTower>(interval_tower(precision))
               : std::make_shared<const GammaTower>(build_tower(GammaSpec::constant(parse_rational(gamma)), v, levels, precision));
  return {t, make_potential_context(t)};
}

std::vector<std::pair<std::string, std::string>> level_intervals(const PyTower& t, int s) {
  PrecisionGuard guard(t.tower->precision);
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [lo, hi] : level_set(*t.tower, s).intervals) out.emplace_back(dec(lo), dec(hi));
  return out;
}

py::dict jacobi(const PyTower& t, int s, int n, int m) {
  PrecisionGuard guard(t.tower->precision);
  auto mu = pullback_quadrature(*t.tower, s, m > 0 ? m : default_quadrature_size(n, *t.tower, s));
  auto j = stieltjes(mu, n);
  std::vector<std::string> a, b;
  for (const auto& x : j.a) a.push_back(dec(x));
  for (const auto& x : j.b) b.push_back(dec(x));
  py::dict d;
  d["a"] = a;
  d["b"] = b;
  d["trusted_n"] = j.trusted_n;
  d["precision"] = j.precision;
  return d;
}

py::dict chebyshev(const PyTower& t, int s, int n, int density) {
  PrecisionGuard guard(t.tower->precision);
  auto r = remez(level_set(*t.tower, s), n, density);
  std::vector<std::string> coeffs;
  for (const auto& x : r.monomial) coeffs.push_back(dec(x));
  py::dict d;
  d["norm"] = dec(r.norm);
  d["monomial"] = coeffs;
  d["alternation"] = r.alternation;
  d["certified"] = r.certified;
  return d;
}

py::dict run(const std::string& config_json, const std::string& output) {
  RunResult r;
  {
    py::gil_scoped_release release;
    try {
      ExperimentConfig c = parse_config(Json::parse(config_json));
      apply_environment(c);
      RunOptions o;
      if (!output.empty()) o.output = output;
      r = run_experiment(c, o);
    } catch (const LabError& e) {
      r.exit_code = e.kind() == ErrorKind::kInvalidArgument ? 2 : (e.kind() == ErrorKind::kNumerical ? 3 : 1);
      r.message = e.what();
    }
  }
  py::dict d;
  d["exit_code"] = r.exit_code;
  d["message"] = r.message;
  d["directory"] = r.directory.string();
  d["files"] = r.files;
  return d;
}

std::string compare(const std::string& a, const std::string& b, const std::vector<std::string>& keys) {
  PrecisionGuard guard(256);
  return compare_runs(a, b, keys).str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Potential theory and orthogonal polynomials on generalized Julia sets";

  py::register_exception<LabError>(m, "LabError", PyExc_ValueError);

  py::class_<PyTower>(m, "Tower")
      .def(py::init(&make_tower), py::arg("gamma") = "1/8", py::arg("levels") = 4, py::arg("variant") = "K-gamma",
           py::arg("precision") = 256)
      .def_property_readonly("levels", [](const PyTower& t) { return t.tower->s_max; })
      .def("capacity",
           [](const PyTower& t, int s) {
             PrecisionGuard guard(t.tower->precision);
             return dec(capacity(t.ctx, s));
           })
      .def("capacity_limit",
           [](const PyTower& t) {
             PrecisionGuard guard(t.tower->precision);
             return dec(capacity_limit(t.ctx));
           })
      .def("green",
           [](const PyTower& t, const std::string& re, const std::string& im) {
             PrecisionGuard guard(t.tower->precision);
             return dec(green(t.ctx, Complex(parse_real(re), parse_real(im))).value);
           },
           py::arg("re"), py::arg("im") = "0")
      .def("equilibrium_cdf",
           [](const PyTower& t, const std::string& c) {
             PrecisionGuard guard(t.tower->precision);
             return dec(equilibrium_cdf(t.ctx, parse_real(c)).mass);
           })
      .def("level_set", &level_intervals, py::arg("s"))
      .def("jacobi", &jacobi, py::arg("s"), py::arg("n"), py::arg("m") = 0)
      .def("chebyshev", &chebyshev, py::arg("s"), py::arg("n"), py::arg("density") = 32);

  m.def("run", &run, py::arg("config_json"), py::arg("output") = "");
  m.def("compare", &compare, py::arg("manifest_a"), py::arg("manifest_b"), py::arg("keys"));
  m.def("known_products", &known_products);
}
