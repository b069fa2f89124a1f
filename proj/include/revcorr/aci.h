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

#ifndef REVCORR_ACI_H_
#define REVCORR_ACI_H_

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "revcorr/experiment.h"
#include "revcorr/lasso.h"
#include "revcorr/pyramid_basis.h"

namespace revcorr {

// Per-element affine map applied to raw T-F predictors: (x - mean) / scale.
struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardization Identity(int size);
  // Column means and sample standard deviations; constant columns get scale 1.
  static Standardization Fit(const Eigen::MatrixXd& x);
  Eigen::MatrixXd Apply(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd Apply(const Eigen::VectorXd& x) const;
};

// Response coding of the model: "aba" = 1, "ada" = 0.
inline double ResponseCode(Target response) { return response == Target::kAba ? 1.0 : 0.0; }

// Noise-alone T-F predictors (one vectorised matrix per row) and responses.
struct FitDataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<bool> correct;

  int size() const { return static_cast<int>(y.size()); }
};

struct Aci {
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(kTfFrames, kTfBands);
  Eigen::VectorXd beta;
  double intercept = 0.0;
  double lambda = 0.0;
  bool is_null = true;
  Standardization standardization = Standardization::Identity(kTfSize);
  int folds = 0;
  std::uint64_t seed = 0;
  std::string basis_hash;
  std::vector<double> lambdas;
  std::vector<double> mean_deviance;

  Eigen::VectorXd WeightVector() const;
  static Aci Null(double intercept = 0.0);
};

// P(response = "aba" | x) = sigmoid(standardize(x) . weights + intercept).
double PredictProb(const Aci& aci, const Eigen::VectorXd& x);
// Linear predictor for every row of x.
Eigen::VectorXd LinearPredictor(const Aci& aci, const Eigen::MatrixXd& x);

struct FitOptions {
  CvOptions cv;
  bool standardize = true;
};

struct FitResult {
  Aci aci;
  CvResult cv;
  // Models fitted on the training part of each fold at lambda*, sharing
  // the standardisation of `aci`.
  std::vector<Aci> fold_acis;
  std::vector<double> fold_null_intercepts;
  std::vector<int> fold_of;
  std::vector<std::string> warnings;
};

// Standardise, project onto the pyramid basis, cross-validate the lasso
// path and map the selected coefficients back to T-F weights. Data with a
// single response class yields an intercept-only null ACI and a warning.
FitResult FitAci(const FitDataset& data, const PyramidBasis& basis, const FitOptions& options = {});

// Writes <prefix>.weights.csv (86 x 64) and <prefix>.meta.csv (scalars and
// coefficient vectors).
void SaveAci(const std::filesystem::path& prefix, const Aci& aci);
Aci LoadAci(const std::filesystem::path& prefix);

// Lambda, mean deviance, per-fold deviance, non-zero count, convergence.
void WriteDeviancePath(const std::filesystem::path& path, const CvResult& cv);

}  // namespace revcorr

#endif  // REVCORR_ACI_H_
