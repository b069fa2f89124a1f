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

#include "revcorr/noisegen.h"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "revcorr/erb.h"
#include "revcorr/fft.h"
#include "revcorr/stft.h"

namespace revcorr {
namespace {

using std::numbers::pi;

std::vector<double> GaussianSamples(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = normal(rng);
  return x;
}

Waveform Finish(const NoiseSpec& spec, std::vector<double> samples) {
  Waveform w{std::move(samples), spec.fs};
  return ApplyRamps(SetLevel(w, spec.level_db), spec.ramp_s);
}

void RequireKind(const NoiseSpec& spec, NoiseKind kind) {
  if (spec.kind != kind) {
    throw std::invalid_argument("noise spec kind mismatch: expected " + ToString(kind));
  }
}

// 2-D DFT of a real matrix, via column then row transforms.
Eigen::MatrixXcd Fft2(const Eigen::MatrixXcd& in, bool inverse) {
  Eigen::MatrixXcd out = in;
  std::vector<Complex> buf;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    buf.assign(out.col(c).data(), out.col(c).data() + out.rows());
    buf = inverse ? InverseFft(buf) : Fft(buf);
    for (Eigen::Index r = 0; r < out.rows(); ++r) out(r, c) = buf[r];
  }
  buf.resize(out.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.cols(); ++c) buf[c] = out(r, c);
    buf = inverse ? InverseFft(buf) : Fft(buf);
    for (Eigen::Index c = 0; c < out.cols(); ++c) out(r, c) = buf[c];
  }
  return out;
}

// Signed DFT frequency of index k for an n-point transform with sample
// spacing d.
double FftFreq(Eigen::Index k, Eigen::Index n, double d) {
  const Eigen::Index signed_k = (k <= (n - 1) / 2) ? k : k - n;
  return static_cast<double>(signed_k) / (static_cast<double>(n) * d);
}

}  // namespace

std::string ToString(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kWhite: return "white";
    case NoiseKind::kBump: return "bump";
    case NoiseKind::kMps: return "mps";
  }
  return "unknown";
}

NoiseKind ParseNoiseKind(const std::string& name) {
  if (name == "white") return NoiseKind::kWhite;
  if (name == "bump") return NoiseKind::kBump;
  if (name == "mps") return NoiseKind::kMps;
  throw std::invalid_argument("unknown noise kind '" + name + "'");
}

NoiseSpec NoiseSpec::Default(NoiseKind kind) {
  NoiseSpec spec;
  spec.kind = kind;
  return spec;
}

std::size_t NoiseSpec::length() const {
  return static_cast<std::size_t>(std::lround(duration_s * fs));
}

std::string NoiseSpec::Id() const {
  std::ostringstream id;
  id << std::setprecision(17) << ToString(kind) << ";fs=" << fs
     << ";dur=" << duration_s << ";level=" << level_db << ";ramp=" << ramp_s;
  if (kind == NoiseKind::kBump) {
    id << ";n_bumps=" << bump.n_bumps << ";sigma_t=" << bump.sigma_t_s
       << ";sigma_f=" << bump.sigma_f_erb << ";max_gain=" << bump.max_gain_db
       << ";f_lo=" << bump.f_lo_hz << ";f_hi=" << bump.f_hi_hz << ";gain_mode="
       << (bump.gain_mode == BumpGainMode::kUniform ? "uniform" : "fixed")
       << ";stft=" << stft_frame << "/" << stft_hop;
  } else if (kind == NoiseKind::kMps) {
    id << ";t_cut=" << mps.temporal_cutoff_hz << ";s_cut=" << mps.spectral_cutoff
       << (mps.spectral_unit == SpectralModUnit::kCyclesPerKhz ? "c/kHz" : "c/Hz")
       << ";iters=" << mps.phase_retrieval_iters << ";floor=" << mps.log_floor_db
       << ";depth=" << mps.preserve_modulation_depth << ";momentum=" << mps.momentum
       << ";stft=" << stft_frame << "/" << stft_hop;
  }
  return id.str();
}

NoiseToken GenerateWhite(const NoiseSpec& spec, std::uint64_t seed) {
  RequireKind(spec, NoiseKind::kWhite);
  NoiseToken token;
  token.seed = seed;
  token.spec_id = spec.Id();
  token.waveform = Finish(spec, GaussianSamples(spec.length(), seed));
  return token;
}

NoiseToken GenerateBump(const NoiseSpec& spec, std::uint64_t seed) {
  RequireKind(spec, NoiseKind::kBump);
  const BumpParams& p = spec.bump;
  if (!(p.f_lo_hz > 0.0 && p.f_hi_hz < spec.fs / 2.0 && p.f_lo_hz < p.f_hi_hz)) {
    throw std::invalid_argument("bump frequency range outside (0, fs/2)");
  }
  const std::size_t n = spec.length();
  std::vector<double> source = GaussianSamples(n, seed);
  const Stft stft(spec.stft_frame, spec.stft_hop);
  Spectrogram s = stft.Forward(source);

  // Bump placement uses its own stream so that the source noise of a bump
  // token equals the white token of the same seed.
  Rng rng(DeriveSeed(seed, "bump-placement"));
  const double erb_lo = ErbNumber(p.f_lo_hz);
  const double erb_hi = ErbNumber(p.f_hi_hz);
  const double duration = static_cast<double>(n) / spec.fs;

  std::vector<double> bin_erb(s.rows());
  for (Eigen::Index k = 0; k < s.rows(); ++k) {
    bin_erb[k] = ErbNumber(static_cast<double>(k) * spec.fs / spec.stft_frame);
  }
  Eigen::MatrixXd gain_db = Eigen::MatrixXd::Zero(s.rows(), s.cols());
  for (int b = 0; b < p.n_bumps; ++b) {
    const double t0 = Uniform(rng, 0.0, duration);
    const double e0 = Uniform(rng, erb_lo, erb_hi);
    const double peak = p.gain_mode == BumpGainMode::kUniform
                            ? Uniform(rng, 0.0, p.max_gain_db)
                            : p.max_gain_db;
    for (Eigen::Index m = 0; m < s.cols(); ++m) {
      const double dt = (stft.FrameTime(static_cast<int>(m), spec.fs) - t0) / p.sigma_t_s;
      const double gt = std::exp(-0.5 * dt * dt);
      if (gt < 1e-12) continue;
      for (Eigen::Index k = 0; k < s.rows(); ++k) {
        const double df = (bin_erb[k] - e0) / p.sigma_f_erb;
        gain_db(k, m) += peak * gt * std::exp(-0.5 * df * df);
      }
    }
  }
  for (Eigen::Index m = 0; m < s.cols(); ++m) {
    for (Eigen::Index k = 0; k < s.rows(); ++k) {
      s(k, m) *= std::pow(10.0, gain_db(k, m) / 20.0);
    }
  }
  NoiseToken token;
  token.seed = seed;
  token.spec_id = spec.Id();
  token.waveform = Finish(spec, stft.Inverse(s, n));
  return token;
}

NoiseToken GenerateMps(const NoiseSpec& spec, std::uint64_t seed) {
  RequireKind(spec, NoiseKind::kMps);
  const MpsParams& p = spec.mps;
  const std::size_t n = spec.length();
  const Stft stft(spec.stft_frame, spec.stft_hop);
  const Spectrogram source = stft.Forward(GaussianSamples(n, seed));
  const Eigen::Index bins = source.rows();
  const Eigen::Index frames = source.cols();

  // Log-magnitude spectrogram (dB) with a floor relative to its maximum.
  const Eigen::MatrixXd mag = source.cwiseAbs();
  const double floor = mag.maxCoeff() * std::pow(10.0, p.log_floor_db / 20.0);
  Eigen::MatrixXd log_mag = mag.cwiseMax(floor).array().log10() * 20.0;
  const double mean = log_mag.mean();
  log_mag.array() -= mean;
  const double sd_before = std::sqrt(log_mag.squaredNorm() / static_cast<double>(log_mag.size()));

  // Low-pass in the modulation power spectrum domain.
  Eigen::MatrixXcd mps = Fft2(log_mag.cast<Complex>(), false);
  const double frame_step_s = static_cast<double>(spec.stft_hop) / spec.fs;
  const double bin_step_hz = spec.fs / spec.stft_frame;
  const double bin_step =
      p.spectral_unit == SpectralModUnit::kCyclesPerKhz ? bin_step_hz / 1000.0 : bin_step_hz;
  for (Eigen::Index k = 0; k < bins; ++k) {
    const double spectral_mod = std::abs(FftFreq(k, bins, bin_step));
    for (Eigen::Index m = 0; m < frames; ++m) {
      const double temporal_mod = std::abs(FftFreq(m, frames, frame_step_s));
      if (temporal_mod > p.temporal_cutoff_hz || spectral_mod > p.spectral_cutoff) {
        mps(k, m) = 0.0;
      }
    }
  }
  Eigen::MatrixXd filtered = Fft2(mps, true).real();
  if (p.preserve_modulation_depth) {
    const double sd_after =
        std::sqrt(filtered.squaredNorm() / static_cast<double>(filtered.size()));
    if (sd_after > 0.0) filtered *= sd_before / sd_after;
  }
  const Eigen::MatrixXd target =
      ((filtered.array() + mean) / 20.0 * std::log(10.0)).exp().matrix();

  // Fast Griffin-Lim, starting from the source noise phase.
  auto project = [&](const Spectrogram& s) {
    Spectrogram out(bins, frames);
    for (Eigen::Index m = 0; m < frames; ++m) {
      for (Eigen::Index k = 0; k < bins; ++k) {
        const double a = std::abs(s(k, m));
        out(k, m) = a > 0.0 ? s(k, m) * (target(k, m) / a) : Complex(target(k, m), 0.0);
      }
    }
    return out;
  };
  Spectrogram current = project(source);
  Spectrogram previous = current;
  Spectrogram accelerated = current;
  for (int it = 0; it < p.phase_retrieval_iters; ++it) {
    const Spectrogram consistent = stft.Forward(stft.Inverse(accelerated, n));
    current = project(consistent);
    accelerated = current + p.momentum * (current - previous);
    previous = current;
  }
  std::vector<double> samples = stft.Inverse(current, n);
  const Eigen::MatrixXd achieved = stft.Forward(samples).cwiseAbs();

  NoiseToken token;
  token.seed = seed;
  token.spec_id = spec.Id();
  token.phase_retrieval_error = (achieved - target).norm() / target.norm();
  token.phase_retrieval_warning = token.phase_retrieval_error > p.convergence_threshold;
  token.waveform = Finish(spec, std::move(samples));
  return token;
}

NoiseToken GenerateNoise(const NoiseSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case NoiseKind::kWhite: return GenerateWhite(spec, seed);
    case NoiseKind::kBump: return GenerateBump(spec, seed);
    case NoiseKind::kMps: return GenerateMps(spec, seed);
  }
  throw std::logic_error("unreachable");
}

std::vector<double> DefaultCriticalBandCenters() {
  std::vector<double> centers;
  for (int e = 3; e <= 33; ++e) centers.push_back(e);
  return centers;
}

std::vector<double> CriticalBandLevels(const Waveform& w,
                                       std::span<const double> centers_erb,
                                       const LevelConvention& conv) {
  std::vector<double> defaults;
  if (centers_erb.empty()) {
    defaults = DefaultCriticalBandCenters();
    centers_erb = defaults;
  }
  const std::size_t n = w.size();
  const std::vector<Complex> spec = RealFft(w.samples);
  std::vector<double> power(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    // One-sided power with Parseval weights; mean square = sum / n^2.
    const bool edge = k == 0 || (n % 2 == 0 && k == spec.size() - 1);
    power[k] = std::norm(spec[k]) * (edge ? 1.0 : 2.0) /
               (static_cast<double>(n) * static_cast<double>(n));
  }
  std::vector<double> levels;
  for (double e : centers_erb) {
    const double fc = ErbNumberToHz(e);
    const double b = 1.019 * ErbBandwidth(fc);
    const double image = w.fs - fc;
    double acc = 0.0;
    for (std::size_t k = 0; k < power.size(); ++k) {
      const double f = static_cast<double>(k) * w.fs / static_cast<double>(n);
      const double u = (f - fc) / b;
      const double v = (f - image) / b;
      acc += power[k] * (std::pow(1.0 + u * u, -4.0) + std::pow(1.0 + v * v, -4.0));
    }
    levels.push_back(conv.dbspl_at_unit_rms + 10.0 * std::log10(acc));
  }
  return levels;
}

NoiseReference NoiseReference::For(NoiseKind kind) {
  NoiseReference ref;
  ref.name = ToString(kind);
  switch (kind) {
    case NoiseKind::kWhite:
      ref.envelope = {{"median 2-60 Hz", kEnvelopeSummaryLowHz, kEnvelopeSummaryHighHz, -44.0}};
      ref.band_lo_db = 40.7;
      ref.band_hi_db = 56.2;
      break;
    case NoiseKind::kBump:
      ref.envelope = {{"at 3 Hz", 3.0, 3.0, -34.8}, {"at 31.1 Hz", 31.1, 31.1, -42.7}};
      ref.band_lo_db = 40.5;
      ref.band_hi_db = 55.8;
      break;
    case NoiseKind::kMps:
      ref.envelope = {{"median 2-35 Hz", kEnvelopeSummaryLowHz, 35.0, -39.9},
                      {"median 35-60 Hz", 35.0, kEnvelopeSummaryHighHz, -43.2}};
      ref.band_lo_db = 38.1;
      ref.band_hi_db = 56.0;
      break;
  }
  return ref;
}

bool ValidationReport::pass() const {
  for (const ValidationCheck& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

ValidationReport ValidateNoiseSet(std::span<const Waveform> tokens,
                                  const NoiseReference& reference,
                                  const LevelConvention& conv) {
  if (tokens.size() < kMinValidationTokens) {
    throw std::invalid_argument("noise validation needs at least " +
                                std::to_string(kMinValidationTokens) + " tokens");
  }
  ValidationReport report;
  report.reference = reference.name;
  report.n_tokens = tokens.size();
  report.envelope = EnvelopeSpectrum(tokens, conv);

  const std::vector<double> centers = DefaultCriticalBandCenters();
  std::vector<std::vector<double>> per_band(centers.size());
  for (const Waveform& w : tokens) {
    const std::vector<double> levels = CriticalBandLevels(w, centers, conv);
    for (std::size_t b = 0; b < centers.size(); ++b) per_band[b].push_back(levels[b]);
  }
  for (std::size_t b = 0; b < centers.size(); ++b) {
    report.band_centers_hz.push_back(ErbNumberToHz(centers[b]));
    report.band_median_db.push_back(Percentile(per_band[b], 50.0));
    report.band_p25_db.push_back(Percentile(per_band[b], 25.0));
    report.band_p75_db.push_back(Percentile(per_band[b], 75.0));
  }

  for (const EnvelopeTarget& t : reference.envelope) {
    const double measured = t.f_hi_hz > t.f_lo_hz
                                ? report.envelope.MedianOver(t.f_lo_hz, t.f_hi_hz)
                                : report.envelope.At(t.f_lo_hz);
    report.checks.push_back({"envelope " + t.name, measured, t.value_db, t.tolerance_db,
                             std::abs(measured - t.value_db) <= t.tolerance_db});
  }
  report.checks.push_back({"envelope DC level", report.envelope.dc_level_db, reference.dc_db,
                           reference.dc_tolerance_db,
                           std::abs(report.envelope.dc_level_db - reference.dc_db) <=
                               reference.dc_tolerance_db});
  // Every band must lie inside the quoted range widened by the tolerance.
  const double lo = reference.band_lo_db - reference.band_tolerance_db;
  const double hi = reference.band_hi_db + reference.band_tolerance_db;
  const auto [min_it, max_it] =
      std::minmax_element(report.band_median_db.begin(), report.band_median_db.end());
  report.checks.push_back({"lowest band level", *min_it, reference.band_lo_db,
                           reference.band_tolerance_db, *min_it >= lo && *min_it <= hi});
  report.checks.push_back({"highest band level", *max_it, reference.band_hi_db,
                           reference.band_tolerance_db, *max_it >= lo && *max_it <= hi});
  return report;
}

}  // namespace revcorr
