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

#include "revcorr/listener.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "revcorr/manifest.h"
#include "revcorr/noisegen.h"
#include "revcorr/parallel.h"
#include "revcorr/rng.h"
#include "revcorr/tf_rep.h"

namespace revcorr {

AuditoryModel::AuditoryModel(ModelConfig config) : config_(std::move(config)) {
  const ModelConfig& c = config_;
  if (c.band_stride < 1) throw std::invalid_argument("band_stride must be >= 1");
  const double decim = c.fs / c.modulation_rate_hz;
  if (std::abs(decim - std::round(decim)) > 1e-9 || decim < 1) {
    throw std::invalid_argument("modulation rate must divide the sample rate");
  }
  const double lo = c.middle_ear_low_hz, hi = c.middle_ear_high_hz;
  middle_ear_ = DesignLinearPhaseFir(c.middle_ear_taps, c.fs, [lo, hi](double f) {
    const double h = std::pow(f / lo, 2);
    return h / std::sqrt(1.0 + h * h) / std::sqrt(1.0 + std::pow(f / hi, 8));
  });
  const auto all = TfBandCenters();
  for (std::size_t i = 0; i < all.size(); i += c.band_stride) {
    centers_.push_back(all[i]);
    bands_.emplace_back(all[i], c.fs);
  }
  envelope_lowpass_ = ButterworthLowpass(c.envelope_order, c.envelope_cutoff_hz, c.fs);
  modulation_lowpass_ = ButterworthLowpass(2, c.modulation_lowpass_hz, c.modulation_rate_hz);
  for (double mfc : c.modulation_centers_hz) {
    modulation_bands_.emplace_back(mfc, c.modulation_q, c.modulation_rate_hz);
  }
}

bool AuditoryModel::Attached(int band, int mod) const {
  if (mod == 0) return true;
  return centers_[band] > config_.modulation_attach_ratio *
                              config_.modulation_centers_hz[mod - 1];
}

// Five divisive feedback loops in series with an overshoot limiter, scaled
// so that the floor maps to 0 model units.
std::vector<double> AuditoryModel::Adapt(std::span<const double> x) const {
  const auto& taus = config_.adaptation_tau_s;
  const int n = static_cast<int>(taus.size());
  const double floor = RmsForLevel(config_.adaptation_floor_db, config_.conv);
  std::vector<double> a1(n), b0(n), state(n), factor(n), expfac(n), offset(n);
  for (int i = 0; i < n; ++i) {
    a1[i] = std::exp(-1.0 / (taus[i] * config_.fs));
    b0[i] = 1.0 - a1[i];
    state[i] = std::pow(floor, 1.0 / std::pow(2.0, i + 1));
    const double maxvalue = (1.0 - state[i] * state[i]) * config_.overshoot_limit - 1.0;
    factor[i] = 2.0 * maxvalue;
    expfac[i] = -2.0 / maxvalue;
    offset[i] = maxvalue - 1.0;
  }
  const double corr = std::pow(floor, 1.0 / std::pow(2.0, n));
  const double mult = 100.0 / (1.0 - corr);
  const bool limit = config_.overshoot_limit > 1.0;

  std::vector<double> out(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    double v = std::max(x[t], floor);
    for (int i = 0; i < n; ++i) {
      v /= state[i];
      if (limit && v > 1.0) v = factor[i] / (1.0 + std::exp(expfac[i] * (v - 1.0))) - offset[i];
      state[i] = a1[i] * state[i] + b0[i] * v;
    }
    out[t] = (v - corr) * mult;
  }
  return out;
}

InternalRepresentation AuditoryModel::Process(const Waveform& w) const {
  const ModelConfig& c = config_;
  if (w.fs != c.fs) throw std::invalid_argument("auditory model: sample rate mismatch");
  const int decim = static_cast<int>(std::lround(c.fs / c.modulation_rate_hz));
  const int n_slow = static_cast<int>(w.samples.size()) / decim;
  if (w.samples.empty() || static_cast<int>(w.samples.size()) != n_slow * decim ||
      n_slow % c.frames != 0) {
    throw std::invalid_argument("auditory model: waveform length does not fit the frame grid");
  }
  const int per_frame = n_slow / c.frames;

  InternalRepresentation ir;
  ir.frames = c.frames;
  ir.bands = static_cast<int>(bands_.size());
  ir.mods = num_mods();
  ir.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ir.frames) * ir.bands * ir.mods);

  const std::vector<double> ear = FilterLinearPhase(w.samples, middle_ear_);
  std::vector<double> slow(n_slow);
  for (int b = 0; b < ir.bands; ++b) {
    std::vector<double> band = bands_[b].Process(ear);
    for (double& v : band) v = std::max(v, 0.0);
    SosFilter lp = envelope_lowpass_;
    lp.ProcessInPlace(band);
    const std::vector<double> adapted = Adapt(band);
    for (int k = 0; k < n_slow; ++k) {
      double s = 0.0;
      for (int j = 0; j < decim; ++j) s += adapted[k * decim + j];
      slow[k] = s / decim;
    }
    for (int m = 0; m < ir.mods; ++m) {
      if (!Attached(b, m)) continue;
      std::vector<double> mod;
      if (m == 0) {
        SosFilter mlp = modulation_lowpass_;
        mod = mlp.Process(slow);
      } else if (c.modulation_centers_hz[m - 1] > c.modulation_phase_limit_hz) {
        mod = modulation_bands_[m - 1].ProcessMagnitude(slow);
      } else {
        mod = modulation_bands_[m - 1].Process(slow);
      }
      for (int f = 0; f < ir.frames; ++f) {
        double s = 0.0;
        for (int j = 0; j < per_frame; ++j) s += mod[f * per_frame + j];
        ir.at(f, b, m) = s / per_frame;
      }
    }
  }
  return ir;
}

double Dot(const InternalRepresentation& a, const InternalRepresentation& b) {
  if (a.values.size() != b.values.size()) {
    throw std::invalid_argument("representation sizes differ");
  }
  return a.values.dot(b.values);
}

TemplateSet DeriveTemplates(const AuditoryModel& model, const TargetPair& targets,
                            std::uint64_t seed, const TemplateOptions& options) {
  if (options.realizations < 1) throw std::invalid_argument("need at least one realization");
  const int n = options.realizations;
  std::vector<InternalRepresentation> aba(n), ada(n), noise_only(options.subtract_noise ? n : 0);
  ParallelFor(n, DefaultWorkers(), [&](int i) {
    const Waveform noise = GenerateNoise(options.noise, DeriveSeed(seed, "template", i)).waveform;
    const Snr snr = Snr::Db(options.snr_db);
    aba[i] = model.Process(MixAtSnr(targets.aba, noise, snr, model.config().conv));
    ada[i] = model.Process(MixAtSnr(targets.ada, noise, snr, model.config().conv));
    if (options.subtract_noise) noise_only[i] = model.Process(noise);
  });
  auto mean = [n](const std::vector<InternalRepresentation>& v) {
    InternalRepresentation m = v[0];
    for (int i = 1; i < n; ++i) m.values += v[i].values;
    m.values /= n;
    return m;
  };
  TemplateSet t;
  t.aba = mean(aba);
  t.ada = mean(ada);
  if (options.subtract_noise) {
    const InternalRepresentation bg = mean(noise_only);
    t.aba.values -= bg.values;
    t.ada.values -= bg.values;
  }
  for (auto* tpl : {&t.aba, &t.ada}) {
    const double norm = tpl->values.norm();
    if (!(norm > 0)) throw std::runtime_error("template has zero energy");
    tpl->values /= norm;
  }
  t.snr_db = options.snr_db;
  t.realizations = n;
  t.noise_kind = options.noise.kind;
  return t;
}

Decision Decide(const InternalRepresentation& ir, const TemplateSet& templates,
                DecisionState& state, const DecisionOptions& options) {
  Decision d;
  d.variable = Dot(ir, templates.ada) - Dot(ir, templates.aba) + state.bias;
  d.response = d.variable > 0.0 ? Target::kAda : Target::kAba;
  const int count = state.n_aba + state.n_ada + 1;
  const double alpha = std::max(1.0 / count, 1.0 / 50.0);
  state.scale += alpha * (std::abs(d.variable) - state.scale);
  if (options.adapt_bias) {
    state.bias -= options.bias_rate * state.scale * (d.response == Target::kAda ? 1.0 : -1.0);
  }
  (d.response == Target::kAda ? state.n_ada : state.n_aba) += 1;
  return d;
}

ArtificialListener::ArtificialListener(std::shared_ptr<const AuditoryModel> model,
                                       std::shared_ptr<const TemplateSet> templates,
                                       DecisionOptions options)
    : model_(std::move(model)), templates_(std::move(templates)), options_(options) {
  if (!model_ || !templates_) throw std::invalid_argument("listener needs a model and templates");
}

void ArtificialListener::BeginBlock(int) { state_ = DecisionState{}; }

Target ArtificialListener::Decide(const TrialStimulus& stimulus) {
  if (stimulus.mixture == nullptr) throw std::invalid_argument("listener needs the mixture");
  return revcorr::Decide(model_->Process(*stimulus.mixture), *templates_, state_, options_)
      .response;
}

void WriteRepresentationCsv(const std::filesystem::path& path,
                            const InternalRepresentation& ir, int mod) {
  if (mod < 0 || mod >= ir.mods) throw std::out_of_range("modulation channel out of range");
  std::ostringstream out;
  out.precision(10);
  for (int f = 0; f < ir.frames; ++f) {
    for (int b = 0; b < ir.bands; ++b) {
      if (b) out << ',';
      out << ir.at(f, b, mod);
    }
    out << '\n';
  }
  WriteFileAtomic(path, out.str());
}

}  // namespace revcorr
