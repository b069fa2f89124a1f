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

#include "revcorr/predict.h"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "revcorr/lasso.h"
#include "revcorr/manifest.h"

namespace revcorr {
namespace {

double Softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double Deviance(double eta, double y) { return 2.0 * (Softplus(eta) - y * eta); }

bool Hit(double eta, double y) { return (eta >= 0.0) == (y == 1.0); }

Eigen::VectorXd Rows(const Eigen::VectorXd& v, std::span<const int> rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = v[rows[i]];
  return out;
}

Eigen::MatrixXd RowsOf(const Eigen::MatrixXd& x, std::span<const int> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = x.row(rows[i]);
  return out;
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

double CvdPerTrial(const Aci& aci, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   std::span<const int> rows) {
  if (rows.empty()) throw std::invalid_argument("empty test set");
  const Eigen::VectorXd eta = LinearPredictor(aci, RowsOf(x, rows));
  double dev = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) dev += Deviance(eta[i], y[rows[i]]);
  return dev / rows.size();
}

double PredictionAccuracy(const Aci& aci, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          std::span<const int> rows) {
  if (rows.empty()) throw std::invalid_argument("empty test set");
  const Eigen::VectorXd eta = LinearPredictor(aci, RowsOf(x, rows));
  int hits = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) hits += Hit(eta[i], y[rows[i]]);
  return 100.0 * hits / rows.size();
}

double DeltaPa(double pa, double pa_null) {
  if (pa_null >= 100.0) return 0.0;
  return (pa - pa_null) / (100.0 - pa_null) * 100.0;
}

bool Significant(std::span<const double> fold_delta_cvd) {
  const std::size_t k = fold_delta_cvd.size();
  if (k < 2) throw std::invalid_argument("significance needs at least two folds");
  double mean = 0.0;
  for (double v : fold_delta_cvd) mean += v;
  mean /= k;
  double ss = 0.0;
  for (double v : fold_delta_cvd) ss += (v - mean) * (v - mean);
  const double sem = std::sqrt(ss / (k - 1)) / std::sqrt(static_cast<double>(k));
  return mean + 1.64 * sem < 0.0;
}

double ChanceBoundary(int n, double z) {
  if (n < 1) throw std::invalid_argument("chance boundary needs n >= 1");
  return 50.0 + 100.0 * z * std::sqrt(0.25 / n);
}

double DeltaPaChanceBoundary(int n, double z) { return 2.0 * (ChanceBoundary(n, z) - 50.0); }

PredictionReport EvaluateFolds(const FitDataset& data, const std::vector<int>& fold_of,
                               const std::vector<double>& null_intercepts,
                               const std::function<const Aci&(int)>& model_for_fold,
                               bool incorrect_only) {
  const int n = data.size();
  if (static_cast<int>(fold_of.size()) != n) throw std::invalid_argument("fold table mismatch");
  if (incorrect_only && static_cast<int>(data.correct.size()) != n) {
    throw std::invalid_argument("incorrect-only evaluation needs correctness flags");
  }
  const int k = static_cast<int>(null_intercepts.size());
  PredictionReport r;
  r.incorrect_only = incorrect_only;
  int hits = 0, null_hits = 0;
  for (int f = 0; f < k; ++f) {
    std::vector<int> rows;
    for (int i = 0; i < n; ++i) {
      if (fold_of[i] == f && (!incorrect_only || !data.correct[i])) rows.push_back(i);
    }
    if (rows.empty()) {
      r.warnings.push_back("fold " + std::to_string(f) + " has no test trials; skipped");
      continue;
    }
    const Aci& model = model_for_fold(f);
    const Eigen::VectorXd eta = LinearPredictor(model, RowsOf(data.x, rows));
    const Eigen::VectorXd y = Rows(data.y, rows);
    const double c0 = null_intercepts[f];
    double dev = 0.0, dev0 = 0.0;
    int fh = 0, fh0 = 0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      dev += Deviance(eta[i], y[i]);
      dev0 += Deviance(c0, y[i]);
      fh += Hit(eta[i], y[i]);
      fh0 += Hit(c0, y[i]);
    }
    const double m = static_cast<double>(rows.size());
    r.fold_delta_cvd_t.push_back((dev - dev0) / m);
    r.fold_delta_pa.push_back(DeltaPa(100.0 * fh / m, 100.0 * fh0 / m));
    hits += fh;
    null_hits += fh0;
    r.n_trials += static_cast<int>(rows.size());
  }
  if (r.n_trials == 0) throw std::invalid_argument("no test trials to evaluate");
  r.delta_cvd_t = Mean(r.fold_delta_cvd_t);
  r.pa = 100.0 * hits / r.n_trials;
  r.pa_null = 100.0 * null_hits / r.n_trials;
  r.delta_pa = DeltaPa(r.pa, r.pa_null);
  r.significant = r.fold_delta_cvd_t.size() >= 2 && Significant(r.fold_delta_cvd_t);
  r.chance_delta_pa = DeltaPaChanceBoundary(r.n_trials);
  return r;
}

PredictionReport AutoPrediction(const FitResult& fit, const FitDataset& data, bool incorrect_only) {
  return EvaluateFolds(data, fit.fold_of, fit.fold_null_intercepts,
                       [&](int f) -> const Aci& { return fit.fold_acis[f]; }, incorrect_only);
}

PredictionReport CrossPredict(const Aci& source, const FitResult& target,
                              const FitDataset& target_data, bool incorrect_only) {
  return EvaluateFolds(target_data, target.fold_of, target.fold_null_intercepts,
                       [&](int) -> const Aci& { return source; }, incorrect_only);
}

CrossPredMatrix CrossPrediction(std::span<const CrossPredEntry> entries, bool incorrect_only) {
  CrossPredMatrix m;
  const std::size_t n = entries.size();
  std::vector<PredictionReport> autos;
  for (const auto& e : entries) {
    if (e.fit == nullptr || e.data == nullptr) throw std::invalid_argument("incomplete entry");
    m.labels.push_back(e.label);
    autos.push_back(AutoPrediction(*e.fit, *e.data, incorrect_only));
  }
  m.cells.assign(n, std::vector<CrossPredCell>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      CrossPredCell& cell = m.cells[i][j];
      cell.masked = !autos[j].significant;
      cell.report = i == j ? autos[i]
                           : CrossPredict(entries[j].fit->aci, *entries[i].fit, *entries[i].data,
                                          incorrect_only);
    }
  }
  return m;
}

void WriteCrossPredCsv(const std::filesystem::path& dir, const CrossPredMatrix& m) {
  auto write = [&](const char* name, const std::function<std::string(const CrossPredCell&)>& f) {
    std::string text = "dataset";
    for (const auto& l : m.labels) text += "," + l;
    text += "\n";
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
      text += m.labels[i];
      for (const auto& cell : m.cells[i]) text += "," + f(cell);
      text += "\n";
    }
    WriteFileAtomic(dir / name, text);
  };
  write("delta_pa.csv", [](const CrossPredCell& c) { return Num(c.report.delta_pa); });
  write("delta_cvd_t.csv", [](const CrossPredCell& c) { return Num(c.report.delta_cvd_t); });
  write("significant.csv", [](const CrossPredCell& c) { return std::string(c.report.significant ? "1" : "0"); });
  write("masked.csv", [](const CrossPredCell& c) { return std::string(c.masked ? "1" : "0"); });
}

std::string SummaryHeader() {
  return "label,variant,n_trials,delta_cvd_t,significant,pa,pa_null,delta_pa,chance_delta_pa";
}

std::string SummaryRow(const std::string& label, const PredictionReport& r) {
  return label + "," + (r.incorrect_only ? "incorrect_only" : "all_trials") + "," +
         std::to_string(r.n_trials) + "," + Num(r.delta_cvd_t) + "," + (r.significant ? "1" : "0") +
         "," + Num(r.pa) + "," + Num(r.pa_null) + "," + Num(r.delta_pa) + "," +
         Num(r.chance_delta_pa);
}

}  // namespace revcorr
