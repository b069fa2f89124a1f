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

#include "revcorr/lasso.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "revcorr/parallel.h"
#include "revcorr/rng.h"

namespace revcorr {
namespace {

double Softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double LossFromEta(const Eigen::VectorXd& eta, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& w) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    if (w[i] != 0.0) s += w[i] * (Softplus(eta[i]) - y[i] * eta[i]);
  }
  return s;
}

// w .* (sigmoid(eta) - y)
Eigen::VectorXd Residual(const Eigen::VectorXd& eta, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& w) {
  Eigen::VectorXd r(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) r[i] = w[i] * (Sigmoid(eta[i]) - y[i]);
  return r;
}

double SoftThreshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Largest eigenvalue of [z 1]^T diag(w) [z 1] / 4, by power iteration.
double LipschitzEstimate(const Eigen::MatrixXd& z, const Eigen::VectorXd& w) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(z.cols() + 1);
  v.normalize();
  double lambda = 0.25;
  for (int it = 0; it < 30; ++it) {
    Eigen::VectorXd u = z * v.head(z.cols());
    u.array() += v[z.cols()];
    u.array() *= w.array();
    Eigen::VectorXd next(z.cols() + 1);
    next.head(z.cols()).noalias() = z.transpose() * u;
    next[z.cols()] = u.sum();
    const double norm = next.norm();
    if (!(norm > 0)) break;
    lambda = norm / 4.0;
    v = next / norm;
  }
  return std::max(lambda, 1e-12);
}

// Adds the columns with |grad| above `threshold` that are not yet in the
// set, keeping at most max(64, support size) of the largest. Returns
// whether anything was added. The support itself is always included.
bool AddStrongest(const Eigen::VectorXd& grad, const Eigen::VectorXd& beta, double threshold,
                  std::vector<bool>& in_set) {
  std::vector<Eigen::Index> candidates;
  Eigen::Index support = 0;
  for (Eigen::Index j = 0; j < grad.size(); ++j) {
    if (beta[j] != 0.0) {
      in_set[j] = true;
      ++support;
    } else if (!in_set[j] && std::abs(grad[j]) > threshold) {
      candidates.push_back(j);
    }
  }
  const std::size_t cap = static_cast<std::size_t>(std::max<Eigen::Index>(64, support));
  if (candidates.size() > cap) {
    std::nth_element(candidates.begin(), candidates.begin() + cap, candidates.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(grad[a]) > std::abs(grad[b]); });
    candidates.resize(cap);
  }
  for (Eigen::Index j : candidates) in_set[j] = true;
  return !candidates.empty();
}

struct InnerResult {
  int iterations = 0;
  bool converged = false;
};

// Accelerated proximal gradient on the columns of `za`; beta and c are
// updated in place.
InnerResult SolveInner(const Eigen::MatrixXd& za, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& w, double lambda, Eigen::VectorXd& beta,
                       double& c, const LassoOptions& options, int budget, double& lip) {
  InnerResult result;
  // Start below the last accepted step constant; backtracking raises it.
  lip = lip > 0 ? 0.5 * lip : LipschitzEstimate(za, w);
  Eigen::VectorXd eta = za * beta;
  eta.array() += c;
  Eigen::VectorXd prev_beta = beta, prev_eta = eta;
  double prev_c = c;
  double objective = LossFromEta(eta, y, w) + lambda * beta.lpNorm<1>();
  double t = 1.0;
  Eigen::VectorXd yb, yeta, g, nb, neta, r;
  for (int it = 1; it <= budget; ++it) {
    result.iterations = it;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double m = (t - 1.0) / t_next;
    yb = beta + m * (beta - prev_beta);
    const double yc = c + m * (c - prev_c);
    yeta = eta + m * (eta - prev_eta);
    const double fy = LossFromEta(yeta, y, w);
    r = Residual(yeta, y, w);
    g.noalias() = za.transpose() * r;
    const double gc = r.sum();

    double fn = 0.0, nc = 0.0;
    for (;;) {
      nb.resize(yb.size());
      for (Eigen::Index j = 0; j < yb.size(); ++j) {
        nb[j] = SoftThreshold(yb[j] - g[j] / lip, lambda / lip);
      }
      nc = yc - gc / lip;
      neta.noalias() = za * nb;
      neta.array() += nc;
      fn = LossFromEta(neta, y, w);
      const double dc = nc - yc;
      const double quad = g.dot(nb - yb) + gc * dc +
                          0.5 * lip * ((nb - yb).squaredNorm() + dc * dc);
      if (fn <= fy + quad + 1e-15 * std::abs(fy)) break;
      lip *= 2.0;
    }
    const double next_objective = fn + lambda * nb.lpNorm<1>();
    prev_beta.swap(beta);
    beta.swap(nb);
    prev_eta.swap(eta);
    eta.swap(neta);
    prev_c = c;
    c = nc;
    if (next_objective > objective) {
      t = 1.0;  // restart the momentum
    } else {
      t = t_next;
      const double change = (objective - next_objective) / std::max(std::abs(next_objective), 1e-300);
      if (change < options.tolerance) {
        objective = next_objective;
        result.converged = true;
        break;
      }
    }
    objective = next_objective;
  }
  return result;
}

}  // namespace

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> DefaultLambdas(int count, double lo, double hi) {
  if (count < 1 || !(lo > 0) || !(hi >= lo)) throw std::invalid_argument("bad lambda grid");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    const double u = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out[i] = std::exp(std::log(hi) + u * (std::log(lo) - std::log(hi)));
  }
  return out;
}

double LogisticLoss(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                    const Eigen::VectorXd& beta, double c) {
  Eigen::VectorXd eta = z * beta;
  eta.array() += c;
  return LossFromEta(eta, y, w);
}

void LogisticGradient(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& w, const Eigen::VectorXd& beta, double c,
                      Eigen::VectorXd* grad_beta, double* grad_c) {
  Eigen::VectorXd eta = z * beta;
  eta.array() += c;
  const Eigen::VectorXd r = Residual(eta, y, w);
  *grad_beta = z.transpose() * r;
  *grad_c = r.sum();
}

int LassoFit::nonzeros() const {
  return static_cast<int>((beta.array() != 0.0).count());
}

double NullIntercept(const Eigen::VectorXd& y, const Eigen::VectorXd& w) {
  const double total = w.sum();
  if (!(total > 0)) throw std::invalid_argument("no training weight");
  const double p = std::clamp(w.dot(y) / total, 1e-12, 1.0 - 1e-12);
  return std::log(p / (1.0 - p));
}

std::vector<LassoFit> FitLassoPath(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& w, const std::vector<double>& lambdas,
                                   const LassoOptions& options) {
  const Eigen::Index n = z.rows(), p = z.cols();
  if (y.size() != n || w.size() != n) throw std::invalid_argument("lasso: size mismatch");
  if (!std::is_sorted(lambdas.rbegin(), lambdas.rend())) {
    throw std::invalid_argument("lambdas must be in decreasing order");
  }
  const Eigen::VectorXd wn = w / w.sum();

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double c = NullIntercept(y, wn);
  Eigen::VectorXd eta = Eigen::VectorXd::Constant(n, c);
  Eigen::VectorXd grad = z.transpose() * Residual(eta, y, wn);
  double prev_lambda = grad.cwiseAbs().maxCoeff();

  std::vector<LassoFit> path;
  double lip = 0.0;
  for (double lambda : lambdas) {
    // Current support plus the strongest strong-rule candidates; the
    // optimality check below adds whatever this misses.
    std::vector<bool> in_set(p, false);
    AddStrongest(grad, beta, 2.0 * lambda - prev_lambda, in_set);
    LassoFit fit;
    fit.lambda = lambda;
    int budget = options.max_iterations;
    bool converged = true;
    for (int round = 0; round < 100; ++round) {
      std::vector<Eigen::Index> active;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (in_set[j]) active.push_back(j);
      }
      Eigen::MatrixXd za(n, static_cast<Eigen::Index>(active.size()));
      Eigen::VectorXd ba(static_cast<Eigen::Index>(active.size()));
      for (std::size_t k = 0; k < active.size(); ++k) {
        za.col(k) = z.col(active[k]);
        ba[k] = beta[active[k]];
      }
      const InnerResult inner = SolveInner(za, y, wn, lambda, ba, c, options, budget, lip);
      fit.iterations += inner.iterations;
      budget -= inner.iterations;
      beta.setZero();
      for (std::size_t k = 0; k < active.size(); ++k) beta[active[k]] = ba[k];

      eta.noalias() = za * ba;
      eta.array() += c;
      grad.noalias() = z.transpose() * Residual(eta, y, wn);
      const bool violated = AddStrongest(grad, beta, lambda * (1.0 + 1e-3), in_set);
      if (!inner.converged || budget <= 0) {
        converged = false;
        break;
      }
      if (!violated) break;
    }
    fit.beta = beta;
    fit.intercept = c;
    fit.objective = LossFromEta(eta, y, wn) + lambda * beta.lpNorm<1>();
    fit.converged = converged;
    path.push_back(std::move(fit));
    prev_lambda = lambda;
  }
  return path;
}

std::vector<int> AssignFolds(int n, int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("need at least two folds");
  if (k > n) throw std::invalid_argument("more folds than trials");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold(n);
  for (int rank = 0; rank < n; ++rank) fold[order[rank]] = rank % k;
  return fold;
}

CvResult CrossValidate(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                       const CvOptions& options) {
  const int n = static_cast<int>(z.rows());
  if (y.size() != n) throw std::invalid_argument("cross-validation: size mismatch");
  if (options.lambdas.empty()) throw std::invalid_argument("empty lambda grid");
  CvResult cv;
  cv.lambdas = options.lambdas;
  std::sort(cv.lambdas.rbegin(), cv.lambdas.rend());
  const int k = options.folds;
  cv.fold_of = AssignFolds(n, k, options.seed);
  const int n_lambda = static_cast<int>(cv.lambdas.size());

  // Index k is the full-data path.
  std::vector<std::vector<LassoFit>> paths(k + 1);
  std::vector<Eigen::VectorXd> weights(k + 1);
  for (int f = 0; f <= k; ++f) {
    weights[f] = Eigen::VectorXd::Ones(n);
    if (f < k) {
      for (int i = 0; i < n; ++i) {
        if (cv.fold_of[i] == f) weights[f][i] = 0.0;
      }
    }
  }
  ParallelFor(k + 1, DefaultWorkers(), [&](int f) {
    paths[f] = FitLassoPath(z, y, weights[f], cv.lambdas, options.lasso);
  });

  cv.fold_deviance.resize(k, n_lambda);
  for (int f = 0; f < k; ++f) {
    for (int l = 0; l < n_lambda; ++l) {
      const LassoFit& fit = paths[f][l];
      double dev = 0.0;
      int count = 0;
      for (int i = 0; i < n; ++i) {
        if (cv.fold_of[i] != f) continue;
        const double eta = z.row(i).dot(fit.beta) + fit.intercept;
        dev += 2.0 * (Softplus(eta) - y[i] * eta);
        ++count;
      }
      cv.fold_deviance(f, l) = dev / count;
    }
  }
  cv.mean_deviance = cv.fold_deviance.colwise().mean().transpose();
  // Ties (within rounding) go to the larger lambda.
  const double best = cv.mean_deviance.minCoeff();
  cv.best_index = 0;
  while (cv.mean_deviance[cv.best_index] > best + 1e-12 * std::abs(best)) ++cv.best_index;
  cv.lambda_star = cv.lambdas[cv.best_index];
  cv.nonzeros.resize(n_lambda);
  for (int l = 0; l < n_lambda; ++l) {
    cv.nonzeros[l] = paths[k][l].nonzeros();
    cv.converged.push_back(paths[k][l].converged);
  }
  cv.final_fit = paths[k][cv.best_index];
  for (int f = 0; f < k; ++f) {
    const LassoFit& fit = paths[f][cv.best_index];
    cv.fold_models.push_back({fit.beta, fit.intercept, NullIntercept(y, weights[f])});
  }
  cv.fold_null_deviance.resize(k);
  Eigen::VectorXd gain(k);
  for (int f = 0; f < k; ++f) {
    const double c = cv.fold_models[f].null_intercept;
    double dev = 0.0;
    int count = 0;
    for (int i = 0; i < n; ++i) {
      if (cv.fold_of[i] != f) continue;
      dev += 2.0 * (Softplus(c) - y[i] * c);
      ++count;
    }
    cv.fold_null_deviance[f] = dev / count;
    gain[f] = cv.fold_deviance(f, cv.best_index) - cv.fold_null_deviance[f];
  }
  const double sem = std::sqrt((gain.array() - gain.mean()).square().sum() / (k - 1) / k);
  const bool beats_null = gain.mean() + 1.64 * sem < 0.0;
  cv.is_null = cv.final_fit.nonzeros() == 0 || (options.test_minimum && !beats_null);
  if (cv.is_null) {
    cv.final_fit.beta.setZero();
    cv.final_fit.intercept = NullIntercept(y, weights[k]);
    for (FoldModel& m : cv.fold_models) {
      m.beta.setZero();
      m.intercept = m.null_intercept;
    }
  }
  return cv;
}

}  // namespace revcorr
