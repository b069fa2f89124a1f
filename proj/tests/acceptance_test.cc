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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Runs for roughly an hour on one core.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "revcorr/aci.h"
#include "revcorr/config.h"
#include "revcorr/experiment.h"
#include "revcorr/lasso.h"
#include "revcorr/manifest.h"
#include "revcorr/noisegen.h"
#include "revcorr/parallel.h"
#include "revcorr/pipeline.h"
#include "revcorr/predict.h"
#include "revcorr/pyramid_basis.h"
#include "revcorr/rng.h"
#include "revcorr/signal.h"
#include "revcorr/tf_rep.h"

namespace revcorr {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Detail {
 public:
  template <typename T>
  Detail& operator<<(const T& v) {
    out_ << v;
    return *this;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

fs::path WorkDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "revcorr_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

double Correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::ArrayXd x = a.array() - a.mean();
  const Eigen::ArrayXd y = b.array() - b.mean();
  return (x * y).sum() / std::sqrt((x * x).sum() * (y * y).sum());
}

// White-noise T-F predictors for `n` tokens with seeds derived from `tag`.
Eigen::MatrixXd WhitePredictors(int n, const std::string& tag) {
  const NoiseSpec spec = NoiseSpec::Default(NoiseKind::kWhite);
  const TfAnalyzer analyzer;
  Eigen::MatrixXd x(n, kTfSize);
  ParallelFor(n, DefaultWorkers(), [&](int i) {
    x.row(i) = Vectorize(analyzer.Analyze(GenerateNoise(spec, DeriveSeed(11, tag, i)).waveform))
                   .transpose();
  });
  return x;
}

// A two-lobed T-F weight pattern: positive around (frame 40, band 30),
// negative around (frame 50, band 40).
Eigen::VectorXd PlantedWeights() {
  Eigen::MatrixXd w(kTfFrames, kTfBands);
  for (int i = 0; i < kTfFrames; ++i) {
    for (int j = 0; j < kTfBands; ++j) {
      w(i, j) = std::exp(-0.5 * (std::pow((i - 40) / 3.0, 2) + std::pow((j - 30) / 3.0, 2))) -
                std::exp(-0.5 * (std::pow((i - 50) / 3.0, 2) + std::pow((j - 40) / 3.0, 2)));
    }
  }
  return Vectorize(TfMatrix{w});
}

// Linear predictor of the plant on standardised predictors, scaled to unit
// standard deviation.
Eigen::VectorXd PlantedDrive(const Eigen::MatrixXd& x, const Eigen::VectorXd& w) {
  const Eigen::MatrixXd xs = Standardization::Fit(x).Apply(x);
  Eigen::VectorXd lin = xs * w;
  const double sd = std::sqrt((lin.array() - lin.mean()).square().mean());
  return lin / sd;
}

Eigen::VectorXd Bernoulli(const Eigen::VectorXd& eta, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd y(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) y[i] = Uniform(rng, 0, 1) < Sigmoid(eta[i]) ? 1 : 0;
  return y;
}

// Accuracy of the generating model against the constant guess, as Delta PA.
double OracleDeltaPa(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
  int hits = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) hits += (eta[i] >= 0) == (y[i] == 1.0);
  const double majority = std::max(y.mean(), 1.0 - y.mean());
  return DeltaPa(100.0 * hits / y.size(), 100.0 * majority);
}

// Normal quantile by bisection on erfc, independent of the library code.
double NormalQuantile(double p) {
  double lo = -12.0, hi = 12.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid / std::sqrt(2.0)) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PipelineConfig QuarterScaleConfig(const fs::path& out) {
  PipelineConfig c;
  c.out_dir = out;
  c.seed = 1;
  c.synthetic_targets = true;
  c.session.n_blocks = 15;
  c.session.trials_per_block = 200;
  return c;
}

// Records of the end-to-end run, shared by criteria 5 and 6.
std::vector<TrialRecord>* g_quarter_records = nullptr;

Outcome NoiseStatistics() {
  PipelineConfig c;
  c.out_dir = WorkDir("noise");
  const std::vector<NoiseKind> kinds = {NoiseKind::kWhite, NoiseKind::kBump, NoiseKind::kMps};
  const auto results = RunValidateNoise(c, kinds, 1000);
  Detail d;
  bool pass = true;
  for (const auto& r : results) {
    d << ToString(r.kind) << ":";
    for (const auto& check : r.report.checks) {
      d << " [" << check.name << " " << check.measured << " vs " << check.expected << "+-"
        << check.tolerance << (check.pass ? "" : " FAIL") << "]";
      pass = pass && check.pass;
    }
    d << "; ";
  }
  return {pass, d.str()};
}

Outcome StaircaseConvergence() {
  const double analytic = StaircaseEquilibrium(2.41);
  BlockSetup setup;
  setup.trials = 4000;
  setup.master_seed = 3;
  LogisticObserver observer(-12.0, 2.0, 4);
  TargetPair targets;
  targets.aba.samples.assign(kStimulusLength, 0.0);
  targets.ada.samples.assign(kStimulusLength, 0.0);
  const BlockResult r = RunBlock(setup, targets, observer);
  int n = 0, correct = 0;
  for (const auto& t : r.records) {
    if (t.phase != Phase::kMeasure) continue;
    ++n;
    correct += t.correct;
  }
  const double pc = 100.0 * correct / n;
  const bool pass = !r.aborted && std::abs(pc - 70.7) <= 1.5 &&
                    std::abs(analytic - 2.41 / 3.41) < 1e-12;
  Detail d;
  d << "measuring-phase pc " << pc << "% over " << n << " trials (target 70.7 +-1.5); analytic "
    << analytic << " vs 2.41/3.41 = " << 2.41 / 3.41;
  return {pass, d.str()};
}

Outcome ChanceBoundaries() {
  const double a = ChanceBoundary(4000);
  const double b = ChanceBoundary(1172);
  Detail d;
  d << "n=4000: " << a << "% (51.3), n=1172: " << b << "% (52.39)";
  return {std::abs(a - 51.3) <= 0.05 && std::abs(b - 52.39) <= 0.05, d.str()};
}

Outcome GlmCorrectness() {
  Detail d;
  bool pass = true;

  // Analytic gradient against central differences.
  {
    Rng rng(1);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd z(50, 20);
    for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = normal(rng);
    Eigen::VectorXd y(50), beta(20);
    for (auto& v : y) v = Uniform(rng, 0, 1) < 0.5;
    for (auto& v : beta) v = 0.3 * normal(rng);
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(50, 1.0 / 50);
    Eigen::VectorXd g;
    double gc = 0;
    LogisticGradient(z, y, w, beta, 0.2, &g, &gc);
    double worst = 0.0;
    for (int j = 0; j < 20; ++j) {
      Eigen::VectorXd p = beta, m = beta;
      p[j] += 1e-6;
      m[j] -= 1e-6;
      const double fd = (LogisticLoss(z, y, w, p, 0.2) - LogisticLoss(z, y, w, m, 0.2)) / 2e-6;
      worst = std::max(worst, std::abs(fd - g[j]) / std::abs(g[j]));
    }
    d << "gradient rel err " << worst << "; ";
    pass = pass && worst < 1e-5;
  }

  const PyramidBasis basis = PyramidBasis::Build();
  const Eigen::MatrixXd x = WhitePredictors(4000, "acceptance/glm");
  const Eigen::VectorXd plant = PlantedWeights();
  const Eigen::VectorXd drive = PlantedDrive(x, plant);

  // Planted recovery at the cross-validated lambda.
  {
    FitDataset data{x, Bernoulli(drive, 5), {}};
    const FitResult fit = FitAci(data, basis);
    const double corr = Correlation(fit.aci.WeightVector(), plant);
    const bool interior = fit.cv.best_index > 0 &&
                          fit.cv.best_index + 1 < static_cast<int>(fit.cv.lambdas.size());
    d << "planted recovery corr " << corr << " at lambda* " << fit.aci.lambda
      << (interior ? " (interior)" : " (grid edge)") << ", oracle dPA "
      << OracleDeltaPa(drive, data.y) << "%; ";
    pass = pass && corr > 0.7;
  }

  // Coin flips.
  {
    Rng rng(6);
    FitDataset data{x, Eigen::VectorXd(4000), {}};
    for (auto& v : data.y) v = Uniform(rng, 0, 1) < 0.5;
    const FitResult fit = FitAci(data, basis);
    d << "coin flip null " << (fit.aci.is_null ? "yes" : "no") << " (" << fit.cv.final_fit.nonzeros()
      << " nonzero); ";
    pass = pass && fit.aci.is_null;
  }

  // Lambda 0.1 on 4000 trials whose plant has the accuracy gain of a human
  // listener (Delta PA around 10%).
  {
    const Eigen::VectorXd eta = 0.25 * drive;
    FitDataset data{x, Bernoulli(eta, 7), {}};
    FitOptions opt;
    opt.cv.lambdas = {0.1};
    const FitResult fit = FitAci(data, basis, opt);
    const int nz = fit.cv.final_fit.nonzeros();
    d << "lambda 0.1 on human-scale data (oracle dPA " << OracleDeltaPa(eta, data.y) << "%): "
      << nz << " nonzero";
    pass = pass && nz == 0 && fit.aci.weights.cwiseAbs().maxCoeff() == 0.0;
  }
  return {pass, d.str()};
}

Outcome EndToEnd() {
  const PipelineConfig c = QuarterScaleConfig(WorkDir("quarter"));
  const auto t0 = std::chrono::steady_clock::now();
  SimulateSummary sim = RunSimulate(c);
  const FitCommandResult fits = RunFit(c);
  RunCrossPred(c);
  RunReport(c);
  const double minutes =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
  g_quarter_records = new std::vector<TrialRecord>(std::move(sim.records));

  std::map<NoiseKind, double> dpa;
  bool pass = fits.fits.size() == 3;
  Detail d;
  for (const auto& f : fits.fits) {
    const PredictionReport& r = f.auto_all;
    const double boundary = std::max(2.6, r.chance_delta_pa);
    dpa[f.kind] = r.delta_pa;
    d << ToString(f.kind) << ": dPA " << r.delta_pa << "% (boundary " << boundary << ", n "
      << r.n_trials << "), dCVD_t " << r.delta_cvd_t << (r.significant ? " significant" : " n.s.")
      << ", dPA_inc " << f.auto_incorrect.delta_pa << "%; ";
    pass = pass && r.delta_pa > boundary && r.significant;
  }
  const bool ordered = dpa[NoiseKind::kBump] >= dpa[NoiseKind::kWhite] &&
                       dpa[NoiseKind::kMps] >= dpa[NoiseKind::kWhite];
  d << "bump, mps >= white: " << (ordered ? "yes" : "no") << "; " << minutes << " min";
  return {pass && ordered, d.str()};
}

Outcome SdtOracle() {
  const std::vector<std::pair<double, double>> rates = {
      {0.5, 0.5},  {0.69, 0.31}, {0.84, 0.16}, {0.9, 0.1},  {0.75, 0.4},  {0.6, 0.55},
      {0.95, 0.2}, {0.3, 0.1},   {0.99, 0.01}, {0.7, 0.7},  {0.55, 0.05}, {0.8, 0.35}};
  double worst = 0.0;
  for (const auto& [h, f] : rates) {
    const SdtResult r = SignalDetection(h, f);
    const double zh = NormalQuantile(h), zf = NormalQuantile(f);
    worst = std::max({worst, std::abs(r.dprime - (zh - zf)), std::abs(r.criterion + 0.5 * (zh + zf))});
  }
  Detail d;
  d << rates.size() << " rate pairs, max deviation " << worst << "; ";
  bool pass = worst <= 0.01;

  // d' across SNR bins of the end-to-end run, pooled over conditions.
  // Bins with fewer than 20 trials of either target are skipped. A drop
  // between neighbouring bins counts as a violation only when it exceeds
  // the sampling SE of the difference (binomial variance of d').
  if (g_quarter_records == nullptr) return {false, d.str() + "no simulation output"};
  const BehavioralSummary s = BehavioralMetrics(*g_quarter_records);
  struct Point {
    double snr, dprime, var;
  };
  auto phi = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); };
  auto rate_var = [&](double p, int n) {
    const double z = NormalQuantile(p);
    return p * (1.0 - p) / (n * phi(z) * phi(z));
  };
  std::vector<Point> curve;
  for (const auto& b : s.bins) {
    if (b.n_aba < 20 || b.n_ada < 20) continue;
    curve.push_back({b.snr_center_db, b.dprime,
                     rate_var(b.hit_rate, b.n_ada) + rate_var(b.false_alarm_rate, b.n_aba)});
  }
  int strict_drops = 0, real_drops = 0;
  d << "d' by SNR bin:";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    d << " " << curve[i].snr << "dB=" << curve[i].dprime;
    if (i == 0 || curve[i].dprime > curve[i - 1].dprime) continue;
    ++strict_drops;
    const double drop = curve[i - 1].dprime - curve[i].dprime;
    if (drop > std::sqrt(curve[i].var + curve[i - 1].var)) ++real_drops;
  }
  // Spearman rank correlation between bin order and d'.
  std::vector<int> order(curve.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return curve[a].dprime < curve[b].dprime; });
  double dsq = 0.0;
  for (std::size_t r = 0; r < order.size(); ++r) dsq += std::pow(static_cast<double>(order[r]) - r, 2);
  const double m = static_cast<double>(curve.size());
  const double rho = 1.0 - 6.0 * dsq / (m * (m * m - 1.0));
  d << "; " << strict_drops << " drop(s) between neighbours, " << real_drops
    << " beyond 1 SE; Spearman rho " << rho;
  const bool monotone = curve.size() >= 5 && real_drops == 0 && rho >= 0.9;
  return {pass && monotone, d.str()};
}

PipelineConfig SmallConfig(const fs::path& out) {
  PipelineConfig c;
  c.out_dir = out;
  c.seed = 9;
  c.synthetic_targets = true;
  c.session.n_blocks = 4;
  c.session.trials_per_block = 150;
  c.session.conditions = {NoiseKind::kWhite, NoiseKind::kBump};
  return c;
}

Outcome Determinism() {
  std::vector<std::string> manifests;
  for (const char* name : {"determinism_a", "determinism_b"}) {
    PipelineConfig c = SmallConfig(WorkDir(name));
    RunSimulate(c);
    RunFit(c);
    RunCrossPred(c);
    RunReport(c);
    manifests.push_back(ReadFile(c.out_dir / "run_manifest.csv"));
  }
  const bool same = manifests[0] == manifests[1];
  const auto lines = std::count(manifests[0].begin(), manifests[0].end(), '\n');

  const fs::path dir = fs::temp_directory_path() / "revcorr_acceptance" / "determinism_a";
  const auto noise = ReadNoiseManifest(dir / kNoiseManifestName);
  const PipelineConfig c = SmallConfig(dir);
  int exact = 0;
  for (const auto& row : noise) {
    const NoiseToken a = GenerateNoise(c.NoiseFor(row.kind), row.seed);
    const NoiseToken b = GenerateNoise(c.NoiseFor(row.kind), row.seed);
    exact += a.waveform.samples == b.waveform.samples && Rms(a.waveform.samples) == row.rms &&
             a.spec_id == row.spec_id;
  }
  Detail d;
  d << "run manifests " << (same ? "identical" : "differ") << " (" << lines << " lines); "
    << exact << "/" << noise.size() << " noise tokens regenerate bit-exactly";
  return {same && exact == static_cast<int>(noise.size()) && !noise.empty(), d.str()};
}

Outcome IncorrectTrials() {
  const PyramidBasis basis = PyramidBasis::Build();
  const Eigen::VectorXd plant = PlantedWeights();
  const int seeds = 10;
  const int n = 1000;
  double sum_all = 0.0, sum_inc = 0.0;
  int higher = 0;
  double pc = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const Eigen::MatrixXd x = WhitePredictors(n, "acceptance/incorrect/" + std::to_string(s));
    const Eigen::VectorXd drive = PlantedDrive(x, plant);
    // The observer hears the target through a fixed cue and is pushed
    // around by the noise through the plant.
    Rng rng(DeriveSeed(21, "responses", s));
    FitDataset data;
    data.x = x;
    data.y.resize(n);
    for (int i = 0; i < n; ++i) {
      const bool aba_presented = Uniform(rng, 0, 1) < 0.5;
      const double eta = drive[i] + (aba_presented ? 1.0 : -1.0);
      const bool aba = Uniform(rng, 0, 1) < Sigmoid(eta);
      data.y[i] = aba;
      data.correct.push_back(aba == aba_presented);
    }
    pc += 100.0 * std::count(data.correct.begin(), data.correct.end(), true) / n / seeds;
    FitOptions opt;
    opt.cv.seed = DeriveSeed(21, "folds", s);
    const FitResult fit = FitAci(data, basis, opt);
    const double all = AutoPrediction(fit, data, false).delta_pa;
    const double inc = AutoPrediction(fit, data, true).delta_pa;
    sum_all += all / seeds;
    sum_inc += inc / seeds;
    higher += inc >= all;
  }
  Detail d;
  d << seeds << " seeds x " << n << " trials (pc " << pc << "%): mean dPA " << sum_all
    << "%, mean dPA_inc " << sum_inc << "%, inc >= all in " << higher << "/" << seeds;
  return {sum_inc >= sum_all, d.str()};
}

}  // namespace
}  // namespace revcorr

int main() {
  using namespace revcorr;
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "noise statistics", NoiseStatistics},
      {2, "staircase equilibrium", StaircaseConvergence},
      {3, "chance boundaries", ChanceBoundaries},
      {4, "GLM correctness", GlmCorrectness},
      {5, "end-to-end simulation", EndToEnd},
      {6, "SDT oracle and d' shape", SdtOracle},
      {7, "determinism", Determinism},
      {8, "incorrect-trials advantage", IncorrectTrials},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s [%.0f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), sec);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  delete g_quarter_records;
  return failures == 0 ? 0 : 1;
}
