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

#include "revcorr/aci.h"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "revcorr/manifest.h"

namespace revcorr {

Standardization Standardization::Identity(int size) {
  return {Eigen::VectorXd::Zero(size), Eigen::VectorXd::Ones(size)};
}

Standardization Standardization::Fit(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw std::invalid_argument("standardization needs two or more rows");
  Standardization s;
  s.mean = x.colwise().mean().transpose();
  s.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean[j]).square().sum() / (x.rows() - 1);
    s.scale[j] = var > 0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardization::Apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) throw std::invalid_argument("standardization: width mismatch");
  return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

Eigen::VectorXd Standardization::Apply(const Eigen::VectorXd& x) const {
  if (x.size() != mean.size()) throw std::invalid_argument("standardization: length mismatch");
  return (x - mean).cwiseQuotient(scale);
}

Eigen::VectorXd Aci::WeightVector() const {
  return Eigen::Map<const Eigen::VectorXd>(weights.data(), weights.size());
}

Aci Aci::Null(double intercept) {
  Aci a;
  a.intercept = intercept;
  return a;
}

double PredictProb(const Aci& aci, const Eigen::VectorXd& x) {
  return Sigmoid(aci.standardization.Apply(x).dot(aci.WeightVector()) + aci.intercept);
}

Eigen::VectorXd LinearPredictor(const Aci& aci, const Eigen::MatrixXd& x) {
  if (x.cols() != aci.weights.size()) throw std::invalid_argument("predictor width mismatch");
  // Fold the standardisation into the weights instead of copying x.
  const Eigen::VectorXd w = aci.WeightVector().cwiseQuotient(aci.standardization.scale);
  Eigen::VectorXd eta = x * w;
  eta.array() += aci.intercept - aci.standardization.mean.dot(w);
  return eta;
}

namespace {

Aci MakeAci(const PyramidBasis& basis, const Eigen::VectorXd& beta, double intercept,
            double lambda, const Standardization& st) {
  Aci a;
  a.beta = beta;
  a.intercept = intercept;
  a.lambda = lambda;
  a.is_null = (beta.array() == 0.0).all();
  a.standardization = st;
  const Eigen::VectorXd w = basis.Synthesize(beta);
  a.weights = Eigen::Map<const Eigen::MatrixXd>(w.data(), basis.frames(), basis.bands());
  a.basis_hash = basis.Hash();
  return a;
}

}  // namespace

FitResult FitAci(const FitDataset& data, const PyramidBasis& basis, const FitOptions& options) {
  const int n = data.size();
  if (data.x.rows() != n || data.x.cols() != basis.rows()) {
    throw std::invalid_argument("fit: predictor matrix does not match the responses or basis");
  }
  if (n < 100) throw std::invalid_argument("fit: at least 100 trials are required");
  FitResult result;
  const Standardization st =
      options.standardize ? Standardization::Fit(data.x) : Standardization::Identity(basis.rows());

  const double n_aba = data.y.sum();
  if (n_aba == 0.0 || n_aba == n) {
    result.warnings.push_back("all responses identical; intercept-only fit");
    result.fold_of = AssignFolds(n, options.cv.folds, options.cv.seed);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const double c = NullIntercept(data.y, ones);
    result.aci = MakeAci(basis, Eigen::VectorXd::Zero(basis.cols()), c, options.cv.lambdas.front(), st);
    for (int f = 0; f < options.cv.folds; ++f) {
      result.fold_acis.push_back(result.aci);
      result.fold_null_intercepts.push_back(c);
    }
    result.aci.folds = options.cv.folds;
    result.aci.seed = options.cv.seed;
    return result;
  }

  const Eigen::MatrixXd z = basis.Project(st.Apply(data.x));
  result.cv = CrossValidate(z, data.y, options.cv);
  const CvResult& cv = result.cv;
  result.aci = MakeAci(basis, cv.final_fit.beta, cv.final_fit.intercept, cv.lambda_star, st);
  result.aci.is_null = cv.is_null || result.aci.is_null;
  result.aci.folds = options.cv.folds;
  result.aci.seed = options.cv.seed;
  result.aci.lambdas = cv.lambdas;
  result.aci.mean_deviance.assign(cv.mean_deviance.data(),
                                  cv.mean_deviance.data() + cv.mean_deviance.size());
  result.fold_of = cv.fold_of;
  for (const FoldModel& m : cv.fold_models) {
    result.fold_acis.push_back(MakeAci(basis, m.beta, m.intercept, cv.lambda_star, st));
    result.fold_null_intercepts.push_back(m.null_intercept);
  }
  for (std::size_t l = 0; l < cv.converged.size(); ++l) {
    if (!cv.converged[l]) {
      result.warnings.push_back("lambda " + std::to_string(cv.lambdas[l]) + " did not converge");
    }
  }
  return result;
}

namespace {

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Row(const std::string& key, const double* v, Eigen::Index n) {
  std::string s = key;
  for (Eigen::Index i = 0; i < n; ++i) s += "," + Num(v[i]);
  return s + "\n";
}

std::vector<std::string> Split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::filesystem::path WithSuffix(const std::filesystem::path& prefix, const char* suffix) {
  return prefix.string() + suffix;
}

}  // namespace

void SaveAci(const std::filesystem::path& prefix, const Aci& aci) {
  std::string weights;
  for (Eigen::Index i = 0; i < aci.weights.rows(); ++i) {
    for (Eigen::Index j = 0; j < aci.weights.cols(); ++j) {
      weights += (j ? "," : "") + Num(aci.weights(i, j));
    }
    weights += "\n";
  }
  std::string meta = "format,revcorr-aci-1\n";
  meta += "layout,frames-by-bands-" + std::to_string(aci.weights.rows()) + "x" +
          std::to_string(aci.weights.cols()) + "\n";
  meta += "basis_hash," + aci.basis_hash + "\n";
  meta += "intercept," + Num(aci.intercept) + "\n";
  meta += "lambda," + Num(aci.lambda) + "\n";
  meta += std::string("is_null,") + (aci.is_null ? "1" : "0") + "\n";
  meta += "folds," + std::to_string(aci.folds) + "\n";
  meta += "seed," + std::to_string(aci.seed) + "\n";
  meta += Row("beta", aci.beta.data(), aci.beta.size());
  meta += Row("std_mean", aci.standardization.mean.data(), aci.standardization.mean.size());
  meta += Row("std_scale", aci.standardization.scale.data(), aci.standardization.scale.size());
  meta += Row("lambdas", aci.lambdas.data(), static_cast<Eigen::Index>(aci.lambdas.size()));
  meta += Row("mean_deviance", aci.mean_deviance.data(),
              static_cast<Eigen::Index>(aci.mean_deviance.size()));
  WriteFileAtomic(WithSuffix(prefix, ".weights.csv"), weights);
  WriteFileAtomic(WithSuffix(prefix, ".meta.csv"), meta);
}

Aci LoadAci(const std::filesystem::path& prefix) {
  Aci aci;
  std::map<std::string, std::vector<std::string>> meta;
  {
    std::istringstream in(ReadFile(WithSuffix(prefix, ".meta.csv")));
    std::string line;
    while (std::getline(in, line)) {
      auto cells = Split(line);
      if (cells.empty()) continue;
      const std::string key = cells.front();
      cells.erase(cells.begin());
      meta[key] = cells;
    }
  }
  auto scalar = [&](const std::string& key) -> std::string {
    auto it = meta.find(key);
    if (it == meta.end() || it->second.size() != 1) {
      throw std::runtime_error("ACI metadata lacks " + key);
    }
    return it->second.front();
  };
  auto vec = [&](const std::string& key) {
    std::vector<double> v;
    auto it = meta.find(key);
    if (it != meta.end()) {
      for (const auto& s : it->second) v.push_back(ParseNumber(s));
    }
    return v;
  };
  if (scalar("format") != "revcorr-aci-1") throw std::runtime_error("unknown ACI format");
  aci.basis_hash = scalar("basis_hash");
  aci.intercept = ParseNumber(scalar("intercept"));
  aci.lambda = ParseNumber(scalar("lambda"));
  aci.is_null = scalar("is_null") == "1";
  aci.folds = std::stoi(scalar("folds"));
  aci.seed = std::stoull(scalar("seed"));
  const auto beta = vec("beta");
  aci.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
  const auto mean = vec("std_mean");
  const auto scale = vec("std_scale");
  if (mean.size() != scale.size()) throw std::runtime_error("ACI standardization is inconsistent");
  aci.standardization.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  aci.standardization.scale = Eigen::Map<const Eigen::VectorXd>(scale.data(), static_cast<Eigen::Index>(scale.size()));
  aci.lambdas = vec("lambdas");
  aci.mean_deviance = vec("mean_deviance");

  std::istringstream in(ReadFile(WithSuffix(prefix, ".weights.csv")));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> r;
    for (const auto& s : Split(line)) r.push_back(ParseNumber(s));
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw std::runtime_error("empty ACI weights");
  aci.weights.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw std::runtime_error("ragged ACI weights");
    for (std::size_t j = 0; j < rows[i].size(); ++j) aci.weights(i, j) = rows[i][j];
  }
  if (aci.standardization.mean.size() != aci.weights.size()) {
    throw std::runtime_error("ACI standardization does not match the weights");
  }
  return aci;
}

void WriteDeviancePath(const std::filesystem::path& path, const CvResult& cv) {
  std::string text = "lambda,mean_deviance";
  for (Eigen::Index f = 0; f < cv.fold_deviance.rows(); ++f) text += ",fold" + std::to_string(f);
  text += ",nonzeros,converged,selected\n";
  for (std::size_t l = 0; l < cv.lambdas.size(); ++l) {
    text += Num(cv.lambdas[l]) + "," + Num(cv.mean_deviance[l]);
    for (Eigen::Index f = 0; f < cv.fold_deviance.rows(); ++f) {
      text += "," + Num(cv.fold_deviance(f, l));
    }
    text += "," + std::to_string(cv.nonzeros[l]) + "," + (cv.converged[l] ? "1" : "0") + "," +
            (static_cast<int>(l) == cv.best_index ? "1" : "0") + "\n";
  }
  WriteFileAtomic(path, text);
}

}  // namespace revcorr
