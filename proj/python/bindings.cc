// Copyright 2026 The revcorr Authors.
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

#include <algorithm>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "revcorr/aci.h"
#include "revcorr/config.h"
#include "revcorr/experiment.h"
#include "revcorr/noisegen.h"
#include "revcorr/pipeline.h"
#include "revcorr/predict.h"
#include "revcorr/pyramid_basis.h"
#include "revcorr/signal.h"
#include "revcorr/tf_rep.h"

namespace py = pybind11;

namespace revcorr {
namespace {

py::array_t<double> ToArray(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Waveform FromArray(const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
                   double fs) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
  Waveform w;
  w.fs = fs;
  w.samples.assign(a.data(), a.data() + a.size());
  return w;
}

}  // namespace
}  // namespace revcorr

PYBIND11_MODULE(_revcorr, m) {
  using namespace revcorr;
  m.doc() = "Reverse-correlation toolkit for phoneme-in-noise experiments.";

  py::enum_<NoiseKind>(m, "NoiseKind")
      .value("WHITE", NoiseKind::kWhite)
      .value("BUMP", NoiseKind::kBump)
      .value("MPS", NoiseKind::kMps);

  m.def(
      "generate_noise",
      [](const std::string& kind, std::uint64_t seed) {
        const NoiseToken t = GenerateNoise(NoiseSpec::Default(ParseNoiseKind(kind)), seed);
        return ToArray(t.waveform.samples);
      },
      py::arg("kind"), py::arg("seed"), "One 0.86 s noise token at 16 kHz with default settings.");

  m.def(
      "level_db", [](const py::array_t<double>& x) { return LevelDb(FromArray(x, kDefaultFs)); },
      py::arg("samples"), "Level in dB SPL (RMS 1 reads 100 dB).");

  m.def(
      "tf_representation",
      [](const py::array_t<double>& x) { return TfRepresentation(FromArray(x, kDefaultFs)).values; },
      py::arg("samples"), "86 x 64 time-frequency matrix of a 0.86 s waveform.");

  m.def("tf_band_centers", &TfBandCenters);

  py::class_<PyramidBasis>(m, "PyramidBasis")
      .def(py::init([] { return PyramidBasis::Build(); }))
      .def_property_readonly("rows", &PyramidBasis::rows)
      .def_property_readonly("cols", &PyramidBasis::cols)
      .def("level_size", &PyramidBasis::LevelSize, py::arg("level"))
      .def("synthesize", &PyramidBasis::Synthesize, py::arg("beta"))
      .def("project", &PyramidBasis::Project, py::arg("x"))
      .def("hash", &PyramidBasis::Hash);

  py::class_<Aci>(m, "Aci")
      .def_readonly("weights", &Aci::weights)
      .def_readonly("beta", &Aci::beta)
      .def_readonly("intercept", &Aci::intercept)
      .def_readonly("lambda_", &Aci::lambda)
      .def_readonly("is_null", &Aci::is_null)
      .def("predict_prob", [](const Aci& a, const Eigen::VectorXd& x) { return PredictProb(a, x); });

  m.def("load_aci", &LoadAci, py::arg("prefix"));

  m.def(
      "fit_aci",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::uint64_t seed) {
        FitDataset data{x, y, {}};
        FitOptions opt;
        opt.cv.seed = seed;
        FitResult fit;
        {
          py::gil_scoped_release release;
          fit = FitAci(data, PyramidBasis::Build(), opt);
        }
        return py::make_tuple(fit.aci, fit.warnings);
      },
      py::arg("x"), py::arg("y"), py::arg("seed") = 1,
      "Lasso GLM with 10-fold cross-validation. Rows of x are vectorised T-F matrices, "
      "y codes aba as 1. Returns (aci, warnings).");

  m.def("chance_boundary", &ChanceBoundary, py::arg("n"), py::arg("z") = 1.645);
  m.def("delta_pa", &DeltaPa, py::arg("pa"), py::arg("pa_null"));
  m.def(
      "signal_detection",
      [](double hit, double fa) {
        const SdtResult r = SignalDetection(hit, fa);
        return py::make_tuple(r.dprime, r.criterion);
      },
      py::arg("hit_rate"), py::arg("false_alarm_rate"), "Returns (d', c).");
  m.def("staircase_equilibrium", &StaircaseEquilibrium, py::arg("up_down_ratio") = 2.41);

  m.def(
      "default_config_ini", [] { return ToIni(PipelineConfig{}); },
      "INI text of the default pipeline configuration.");
}
