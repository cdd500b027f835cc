// Copyright 2026 The ovl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "ovl/cli.hpp"
#include "ovl/config.hpp"
#include "ovl/forward.hpp"
#include "ovl/metrics.hpp"
#include "ovl/sampler.hpp"
#include "ovl/toylab.hpp"

namespace py = pybind11;
using namespace ovl;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Points to_points(const Array& a) {
  if (a.ndim() != 2) throw InvalidArgument("expected a 2-D array of shape (n, dim)");
  Points p(static_cast<std::size_t>(a.shape(1)));
  p.values.assign(a.data(), a.data() + a.size());
  return p;
}

Array from_points(const Points& p) {
  Array out({static_cast<py::ssize_t>(p.size()), static_cast<py::ssize_t>(p.dim)});
  std::copy(p.values.begin(), p.values.end(), out.mutable_data());
  return out;
}

Array from_vector(const std::vector<double>& v) {
  Array out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::tuple dataset_tuple(const LabeledDataset& ds) {
  py::array_t<int> labels(std::vector<py::ssize_t>{static_cast<py::ssize_t>(ds.labels.size())});
  std::copy(ds.labels.begin(), ds.labels.end(), labels.mutable_data());
  return py::make_tuple(from_points(ds.samples), labels);
}

LabeledDataset to_dataset(const Array& x, const py::array_t<int, py::array::c_style | py::array::forcecast>& y,
                          int num_classes) {
  LabeledDataset ds;
  ds.samples = to_points(x);
  ds.labels.assign(y.data(), y.data() + y.size());
  ds.num_classes = num_classes;
  if (ds.num_classes == 0) {
    for (int l : ds.labels) ds.num_classes = std::max(ds.num_classes, l + 1);
  }
  ds.validate();
  return ds;
}

ToyMixtureSpec mixture(const std::vector<std::vector<double>>& means, const std::vector<double>& weights,
                       double scale) {
  ToyMixtureSpec m;
  m.dim = means.empty() ? 1 : static_cast<int>(means.front().size());
  m.means = means;
  m.weights = weights;
  m.scales.assign(means.size(), scale);
  m.validate();
  return m;
}

}  // namespace

PYBIND11_MODULE(_ovl, m) {
  m.doc() = "Class-conditional diffusion on long-tailed toy data";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<DiffusionSchedule>(m, "Schedule")
      .def_property_readonly("steps", &DiffusionSchedule::steps)
      .def_property_readonly("betas", [](const DiffusionSchedule& s) { return from_vector(s.betas()); })
      .def_property_readonly("alphas", [](const DiffusionSchedule& s) { return from_vector(s.alphas()); })
      .def_property_readonly("alpha_bars", [](const DiffusionSchedule& s) { return from_vector(s.alpha_bars()); })
      .def_property_readonly("sigmas", [](const DiffusionSchedule& s) { return from_vector(s.sigmas()); });

  m.def(
      "linear_schedule",
      [](double beta1, double beta_t, int steps, const std::string& sigma_mode) {
        return make_linear_schedule(beta1, beta_t, steps, parse_sigma_mode(sigma_mode));
      },
      py::arg("beta1"), py::arg("beta_t"), py::arg("steps"), py::arg("sigma_mode") = "beta");
  m.def(
      "scaled_linear_schedule",
      [](int steps, const std::string& sigma_mode) {
        return make_scaled_linear_schedule(steps, parse_sigma_mode(sigma_mode));
      },
      py::arg("steps"), py::arg("sigma_mode") = "beta");
  m.def(
      "tau_at",
      [](double tau0, double temperature, double t) {
        return tau_at(TauSchedule::exponential(tau0, temperature), t);
      },
      py::arg("tau0"), py::arg("temperature"), py::arg("t"));

  m.def(
      "q_sample",
      [](const std::vector<double>& x0, int t, const std::vector<double>& eps, const DiffusionSchedule& s) {
        return from_vector(q_sample(x0, t, eps, s).x_t);
      },
      py::arg("x0"), py::arg("t"), py::arg("eps"), py::arg("schedule"));

  m.def(
      "longtail_counts",
      [](int classes, long n_max, double imb) { return longtail_counts({classes, n_max, imb}); },
      py::arg("classes"), py::arg("n_max"), py::arg("imb"));
  m.def(
      "gmm_dataset",
      [](const std::vector<std::vector<double>>& means, const std::vector<long>& counts, double scale,
         std::uint64_t seed) {
        return dataset_tuple(generate_gmm_dataset(mixture(means, weights_from_counts(counts), scale), counts, seed));
      },
      py::arg("means"), py::arg("counts"), py::arg("scale") = 1.0, py::arg("seed") = 0,
      "Returns (x, labels) drawn from isotropic Gaussians, one per class.");

  m.def(
      "ancestral_sample_oracle",
      [](const std::vector<double>& mean, double scale, const DiffusionSchedule& s, std::size_t count,
         std::uint64_t seed) {
        OracleGaussianModel model(mean, scale, s);
        return from_points(ancestral_sample(model, {}, s, {0.0, count, seed}, 0));
      },
      py::arg("mean"), py::arg("scale"), py::arg("schedule"), py::arg("count"), py::arg("seed") = 0,
      "Ancestral sampling driven by the exact posterior noise of N(mean, scale^2 I).");

  m.def("frechet_distance", [](const Array& a, const Array& b) { return frechet_distance(to_points(a), to_points(b)); });
  m.def(
      "knn_precision_recall",
      [](const Array& real, const Array& gen, int k) {
        const auto pr = knn_precision_recall(to_points(real), to_points(gen), k);
        return py::make_tuple(pr.precision, pr.recall);
      },
      py::arg("real"), py::arg("gen"), py::arg("k") = 5);
  m.def("f_beta", &f_beta, py::arg("precision"), py::arg("recall"), py::arg("beta"));
  m.def(
      "prd_f_beta",
      [](const Array& real, const Array& gen, int clusters, double beta, std::uint64_t seed, int runs) {
        const auto fb = prd_f_beta(to_points(real), to_points(gen), clusters, beta, seed, runs);
        return py::make_tuple(fb.f_beta, fb.f_inv_beta);
      },
      py::arg("real"), py::arg("gen"), py::arg("clusters"), py::arg("beta") = 8.0, py::arg("seed") = 0,
      py::arg("runs") = 10);
  m.def(
      "overlap_rate",
      [](const std::vector<Array>& gen_per_class, const std::vector<std::vector<double>>& means,
         const std::vector<double>& weights, double scale) {
        std::vector<Points> gen;
        for (const auto& g : gen_per_class) gen.push_back(to_points(g));
        return overlap_rate(gen, mixture(means, weights, scale));
      },
      py::arg("gen_per_class"), py::arg("means"), py::arg("weights"), py::arg("scale") = 1.0);
  m.def(
      "interval_split",
      [](const std::vector<long>& counts) {
        DatasetStats st;
        st.counts = counts;
        for (long c : counts) st.total += c;
        for (long c : counts) st.weights.push_back(st.total ? static_cast<double>(c) / st.total : 0.0);
        std::vector<std::string> out;
        for (Interval iv : interval_split(st)) out.emplace_back(to_string(iv));
        return out;
      },
      py::arg("counts"));
  m.def(
      "linear_probe",
      [](const Array& xtr, const py::array_t<int, py::array::c_style | py::array::forcecast>& ytr, const Array& xte,
         const py::array_t<int, py::array::c_style | py::array::forcecast>& yte, int num_classes) {
        const auto r = linear_probe(to_dataset(xtr, ytr, num_classes), to_dataset(xte, yte, num_classes));
        py::dict d;
        d["accuracy"] = r.accuracy;
        d["macro_precision"] = r.macro_precision;
        d["macro_recall"] = r.macro_recall;
        d["class_recall"] = r.class_recall;
        d["class_precision"] = r.class_precision;
        return d;
      },
      py::arg("x_train"), py::arg("y_train"), py::arg("x_test"), py::arg("y_test"), py::arg("num_classes") = 0);

  m.def(
      "toy_landscape",
      [](const std::string& mode, const std::string& variant, double tau, double margin, double pi1, double m1,
         double m2, double sigma, double lo, double hi, double step) {
        ToyObjective obj{parse_toy_mode(mode), {parse_pcl_kind(variant), margin}, tau};
        const GridAxis ax{lo, hi, step};
        const auto g = landscape(make_toy_spec(pi1, m1, m2, sigma), obj, ax, ax);
        const auto n = static_cast<py::ssize_t>(ax.count());
        Array loss({n, n});
        std::copy(g.loss.begin(), g.loss.end(), loss.mutable_data());
        std::vector<double> axis;
        for (int i = 0; i < ax.count(); ++i) axis.push_back(ax.at(i));
        return py::make_tuple(from_vector(axis), loss, py::make_tuple(g.argmin_m1(), g.argmin_m2()));
      },
      py::arg("mode"), py::arg("variant") = "exponential", py::arg("tau") = 0.0, py::arg("margin") = 2.0,
      py::arg("pi1") = 0.95, py::arg("m1") = 0.0, py::arg("m2") = 2.0, py::arg("sigma") = 1.0, py::arg("lo") = -1.0,
      py::arg("hi") = 3.0, py::arg("step") = 0.05,
      "Returns (axis, loss[m1, m2], (argmin_m1, argmin_m2)).");

  m.def(
      "run",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "ovl");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs an `ovl` subcommand; returns (exit_code, stdout, stderr).");
}
