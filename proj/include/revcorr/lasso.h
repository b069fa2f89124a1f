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

#ifndef REVCORR_LASSO_H_
#define REVCORR_LASSO_H_

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace revcorr {

// Twenty values log-spaced from 0.1 down to 1.1e-3 (largest first).
std::vector<double> DefaultLambdas(int count = 20, double lo = 1.1e-3, double hi = 0.1);

// Weighted mean logistic negative log-likelihood of y (0/1) under
// P(y = 1) = sigmoid(z beta + c); `w` holds non-negative row weights that
// sum to one.
double LogisticLoss(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                    const Eigen::VectorXd& beta, double c);

// Gradient of LogisticLoss with respect to beta and c.
void LogisticGradient(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& w, const Eigen::VectorXd& beta, double c,
                      Eigen::VectorXd* grad_beta, double* grad_c);

double Sigmoid(double x);

struct LassoOptions {
  double tolerance = 1e-6;  // relative objective change
  int max_iterations = 10000;
};

struct LassoFit {
  double lambda = 0.0;
  Eigen::VectorXd beta;
  double intercept = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = true;
  int nonzeros() const;
};

// Minimises LogisticLoss + lambda |beta|_1 (intercept unpenalised) along a
// decreasing lambda sequence with warm starts. Each lambda is solved by
// accelerated proximal gradient with adaptive restart on a working set
// grown until the optimality conditions hold for every column.
std::vector<LassoFit> FitLassoPath(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& w, const std::vector<double>& lambdas,
                                   const LassoOptions& options = {});

// Intercept-only maximum-likelihood fit: logit of the weighted mean of y.
double NullIntercept(const Eigen::VectorXd& y, const Eigen::VectorXd& w);

// Random partition: shuffled ranks modulo k. Throws if k > n or k < 2.
std::vector<int> AssignFolds(int n, int k, std::uint64_t seed);

struct CvOptions {
  std::vector<double> lambdas = DefaultLambdas();
  int folds = 10;
  std::uint64_t seed = 1;
  LassoOptions lasso;
  // Keep the minimum only if its held-out deviance is significantly below
  // the intercept-only model across folds (one-sided, 95%).
  bool test_minimum = true;
};

struct FoldModel {
  Eigen::VectorXd beta;
  double intercept = 0.0;
  double null_intercept = 0.0;
};

struct CvResult {
  std::vector<double> lambdas;            // as fitted, largest first
  std::vector<int> fold_of;
  Eigen::MatrixXd fold_deviance;          // folds x lambdas, per held-out trial
  Eigen::VectorXd mean_deviance;
  Eigen::VectorXi nonzeros;               // full-data fit per lambda
  std::vector<bool> converged;            // full-data fit per lambda
  int best_index = 0;
  double lambda_star = 0.0;
  LassoFit final_fit;                     // all data at lambda_star
  std::vector<FoldModel> fold_models;     // training folds at lambda_star
  Eigen::VectorXd fold_null_deviance;     // intercept-only, per held-out trial
  bool is_null = false;
};

// k-fold cross-validation over the lambda grid. lambda* minimises the mean
// held-out deviance per trial; the final fit uses all rows. The result is
// null when the fit at lambda* is all zero, or when test_minimum is set and
// the minimum does not beat the intercept-only model; null fits have
// beta = 0 and the intercept-only intercept.
CvResult CrossValidate(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                       const CvOptions& options = {});

}  // namespace revcorr

#endif  // REVCORR_LASSO_H_
