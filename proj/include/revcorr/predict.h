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

#ifndef REVCORR_PREDICT_H_
#define REVCORR_PREDICT_H_

#include <Eigen/Core>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "revcorr/aci.h"

namespace revcorr {

// Mean of -2 log-likelihood over the given rows. Throws on an empty set.
double CvdPerTrial(const Aci& aci, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                   std::span<const int> rows);

// Percentage of rows where the prediction (P >= 0.5 means "aba") matches
// the response actually given. Throws on an empty set.
double PredictionAccuracy(const Aci& aci, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          std::span<const int> rows);

// (PA - PA_null) / (100 - PA_null) * 100.
double DeltaPa(double pa, double pa_null);

// mean + 1.64 SEM < 0. Throws with fewer than two values.
bool Significant(std::span<const double> fold_delta_cvd);

// One-sided binomial chance boundary (normal approximation) in percent:
// 50 + 100 z sqrt(0.25 / n).
double ChanceBoundary(int n, double z = 1.645);
// The same boundary on the Delta PA scale: 2 (boundary - 50).
double DeltaPaChanceBoundary(int n, double z = 1.645);

struct PredictionReport {
  bool incorrect_only = false;
  int n_trials = 0;
  double delta_cvd_t = 0.0;  // mean over folds
  std::vector<double> fold_delta_cvd_t;
  double pa = 0.0;  // pooled over held-out trials
  double pa_null = 0.0;
  double delta_pa = 0.0;
  std::vector<double> fold_delta_pa;
  bool significant = false;
  double chance_delta_pa = 0.0;
  std::vector<std::string> warnings;

  bool above_chance() const { return delta_pa > chance_delta_pa; }
};

// Evaluates one model per fold on that fold's held-out rows against the
// intercept-only model of the same training rows. `model_for_fold(f)`
// returns the model to test on fold f.
PredictionReport EvaluateFolds(const FitDataset& data, const std::vector<int>& fold_of,
                               const std::vector<double>& null_intercepts,
                               const std::function<const Aci&(int)>& model_for_fold,
                               bool incorrect_only);

// Held-out performance of the fold models of `fit` on their own data.
PredictionReport AutoPrediction(const FitResult& fit, const FitDataset& data,
                                bool incorrect_only = false);

// `source` used as-is on the held-out folds of `target`.
PredictionReport CrossPredict(const Aci& source, const FitResult& target,
                              const FitDataset& target_data, bool incorrect_only = false);

struct CrossPredCell {
  PredictionReport report;
  bool masked = false;  // source ACI failed its own auto-prediction test
};

// Row i = dataset i, column j = ACI j; the diagonal holds auto-predictions.
struct CrossPredMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<CrossPredCell>> cells;
};

struct CrossPredEntry {
  std::string label;
  const FitResult* fit = nullptr;
  const FitDataset* data = nullptr;
};

CrossPredMatrix CrossPrediction(std::span<const CrossPredEntry> entries, bool incorrect_only = false);

// delta_pa.csv, delta_cvd_t.csv, significant.csv and masked.csv in `dir`.
void WriteCrossPredCsv(const std::filesystem::path& dir, const CrossPredMatrix& m);

// One line per report: label, variant, n, delta_cvd_t, significant, PA,
// PA_null, delta_pa, chance boundary.
std::string SummaryHeader();
std::string SummaryRow(const std::string& label, const PredictionReport& r);

}  // namespace revcorr

#endif  // REVCORR_PREDICT_H_
