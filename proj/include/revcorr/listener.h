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

#ifndef REVCORR_LISTENER_H_
#define REVCORR_LISTENER_H_

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "revcorr/experiment.h"
#include "revcorr/filters.h"
#include "revcorr/signal.h"

namespace revcorr {

struct ModelConfig {
  double fs = kDefaultFs;
  // Linear-phase middle-ear band-pass.
  int middle_ear_taps = 512;
  double middle_ear_low_hz = 450.0;
  double middle_ear_high_hz = 8000.0;
  // Every band_stride-th band of the T-F representation's filterbank.
  int band_stride = 1;
  double envelope_cutoff_hz = 770.0;
  int envelope_order = 5;
  std::vector<double> adaptation_tau_s = {0.005, 0.05, 0.129, 0.253, 0.5};
  double overshoot_limit = 5.0;
  // Adaptation floor expressed as a sound level (0 dB SPL).
  double adaptation_floor_db = 0.0;
  double modulation_rate_hz = 1000.0;
  double modulation_lowpass_hz = 1.5;
  std::vector<double> modulation_centers_hz = {2.5, 5.0, 10.0, 20.0, 40.0, 77.0};
  double modulation_q = 1.0;
  // Channels above this centre use the phase-insensitive output.
  double modulation_phase_limit_hz = 10.0;
  // A modulation channel is attached to an audio band when fc > ratio * mfc.
  double modulation_attach_ratio = 4.0;
  int frames = 86;
  LevelConvention conv;
};

// Values indexed by (frame, audio band, modulation channel); channel 0 is
// the low-pass channel. Unattached channels hold zeros.
struct InternalRepresentation {
  int frames = 0;
  int bands = 0;
  int mods = 0;
  Eigen::VectorXd values;

  double& at(int f, int b, int m) { return values[f + frames * (b + bands * m)]; }
  double at(int f, int b, int m) const { return values[f + frames * (b + bands * m)]; }
};

// Auditory front end: middle ear, gammatone filterbank, hair-cell envelope,
// adaptation loops, modulation filterbank, 10-ms frame averaging. Filters
// are designed once; Process() is const and thread safe.
class AuditoryModel {
 public:
  explicit AuditoryModel(ModelConfig config = {});

  // Throws std::invalid_argument for a waveform whose sample rate or
  // duration does not match the configuration.
  InternalRepresentation Process(const Waveform& w) const;

  const ModelConfig& config() const { return config_; }
  const std::vector<double>& band_centers_hz() const { return centers_; }
  int num_mods() const { return static_cast<int>(config_.modulation_centers_hz.size()) + 1; }
  // Whether modulation channel m (0 = low-pass) is attached to band b.
  bool Attached(int band, int mod) const;

 private:
  std::vector<double> Adapt(std::span<const double> x) const;

  ModelConfig config_;
  std::vector<double> middle_ear_;
  std::vector<double> centers_;
  std::vector<GammatoneFilter> bands_;
  SosFilter envelope_lowpass_;
  SosFilter modulation_lowpass_;
  std::vector<ResonatorFilter> modulation_bands_;
};

struct TemplateSet {
  InternalRepresentation aba;
  InternalRepresentation ada;
  double snr_db = -6.0;
  int realizations = 100;
  NoiseKind noise_kind = NoiseKind::kWhite;
};

struct TemplateOptions {
  double snr_db = -6.0;
  int realizations = 100;
  NoiseSpec noise = NoiseSpec::Default(NoiseKind::kWhite);
  // Subtract the mean noise-alone representation before normalising.
  bool subtract_noise = false;
};

// Mean representation of each target in fresh noise at a fixed SNR, scaled
// to unit energy. Realisation i uses noise seed DeriveSeed(seed, "template", i).
TemplateSet DeriveTemplates(const AuditoryModel& model, const TargetPair& targets,
                            std::uint64_t seed, const TemplateOptions& options = {});

double Dot(const InternalRepresentation& a, const InternalRepresentation& b);

struct DecisionState {
  double bias = 0.0;
  int n_aba = 0;
  int n_ada = 0;
  // Running mean of |d - bias|, the step scale of the bias update.
  double scale = 0.0;
};

struct DecisionOptions {
  double bias_rate = 0.01;
  bool adapt_bias = true;
};

struct Decision {
  Target response = Target::kAba;
  double variable = 0.0;
};

// d = <IR, T_ada> - <IR, T_aba> + bias; "ada" iff d > 0. The bias then
// moves against the response just given by bias_rate times the running
// mean |d|, which drives the response ratio towards one half.
Decision Decide(const InternalRepresentation& ir, const TemplateSet& templates,
                DecisionState& state, const DecisionOptions& options = {});

// Template-matching listener; the decision state is reset at every block.
class ArtificialListener : public Listener {
 public:
  ArtificialListener(std::shared_ptr<const AuditoryModel> model,
                     std::shared_ptr<const TemplateSet> templates,
                     DecisionOptions options = {});

  void BeginBlock(int block_index) override;
  Target Decide(const TrialStimulus& stimulus) override;
  const DecisionState& state() const { return state_; }

 private:
  std::shared_ptr<const AuditoryModel> model_;
  std::shared_ptr<const TemplateSet> templates_;
  DecisionOptions options_;
  DecisionState state_;
};

// One CSV row per frame with (band, mod) columns for the given channel.
void WriteRepresentationCsv(const std::filesystem::path& path,
                            const InternalRepresentation& ir, int mod);

}  // namespace revcorr

#endif  // REVCORR_LISTENER_H_
