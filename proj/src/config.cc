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

#include "revcorr/config.h"

#include <charconv>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "revcorr/manifest.h"
#include "revcorr/parallel.h"
#include "revcorr/rng.h"

namespace revcorr {
namespace {

// Shortest text that parses back to the same double.
std::string Num(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::string Bool(bool b) { return b ? "true" : "false"; }

bool ParseBool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("not a boolean: " + s);
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string JoinNumbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + Num(v[i]);
  return s;
}

std::vector<double> ParseNumbers(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : SplitList(s)) out.push_back(ParseNumber(item));
  return out;
}

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, const std::string&)> set;
};

#define REVCORR_FIELD(section, key, expr, to_text, from_text)                              \
  Field {                                                                                  \
    section, key, [](const PipelineConfig& c) { return to_text(c.expr); },                \
        [](PipelineConfig& c, const std::string& v) { c.expr = from_text(v); }             \
  }

std::string PathText(const std::filesystem::path& p) { return p.string(); }
std::filesystem::path ParsePath(const std::string& s) { return s; }
std::string IntText(long long v) { return std::to_string(v); }
int ParseInt(const std::string& s) { return std::stoi(s); }
std::uint64_t ParseU64(const std::string& s) { return std::stoull(s); }
std::string U64Text(std::uint64_t v) { return std::to_string(v); }
double ParseDouble(const std::string& s) { return ParseNumber(s); }

std::string GainModeText(BumpGainMode m) { return m == BumpGainMode::kUniform ? "uniform" : "fixed"; }
BumpGainMode ParseGainMode(const std::string& s) {
  if (s == "uniform") return BumpGainMode::kUniform;
  if (s == "fixed") return BumpGainMode::kFixed;
  throw std::invalid_argument("unknown bump gain mode: " + s);
}

std::string UnitText(SpectralModUnit u) {
  return u == SpectralModUnit::kCyclesPerKhz ? "cycles_per_khz" : "cycles_per_hz";
}
SpectralModUnit ParseUnit(const std::string& s) {
  if (s == "cycles_per_khz") return SpectralModUnit::kCyclesPerKhz;
  if (s == "cycles_per_hz") return SpectralModUnit::kCyclesPerHz;
  throw std::invalid_argument("unknown spectral modulation unit: " + s);
}

std::string KindsText(const std::vector<NoiseKind>& kinds) {
  std::string s;
  for (std::size_t i = 0; i < kinds.size(); ++i) s += (i ? "," : "") + ToString(kinds[i]);
  return s;
}
std::vector<NoiseKind> ParseKinds(const std::string& s) {
  std::vector<NoiseKind> out;
  for (const auto& item : SplitList(s)) out.push_back(ParseNoiseKind(item));
  if (out.empty()) throw std::invalid_argument("no noise conditions listed");
  return out;
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      REVCORR_FIELD("run", "seed", seed, U64Text, ParseU64),
      REVCORR_FIELD("run", "out_dir", out_dir, PathText, ParsePath),
      REVCORR_FIELD("run", "workers", workers, IntText, ParseInt),
      REVCORR_FIELD("targets", "aba", target_aba, PathText, ParsePath),
      REVCORR_FIELD("targets", "ada", target_ada, PathText, ParsePath),
      REVCORR_FIELD("targets", "synthetic", synthetic_targets, Bool, ParseBool),
      REVCORR_FIELD("targets", "level_db", target_level_db, Num, ParseDouble),
      REVCORR_FIELD("noise", "fs", noise.fs, Num, ParseDouble),
      REVCORR_FIELD("noise", "duration_s", noise.duration_s, Num, ParseDouble),
      REVCORR_FIELD("noise", "level_db", noise.level_db, Num, ParseDouble),
      REVCORR_FIELD("noise", "ramp_s", noise.ramp_s, Num, ParseDouble),
      REVCORR_FIELD("noise", "stft_frame", noise.stft_frame, IntText, ParseInt),
      REVCORR_FIELD("noise", "stft_hop", noise.stft_hop, IntText, ParseInt),
      REVCORR_FIELD("bump", "n_bumps", noise.bump.n_bumps, IntText, ParseInt),
      REVCORR_FIELD("bump", "sigma_t_s", noise.bump.sigma_t_s, Num, ParseDouble),
      REVCORR_FIELD("bump", "sigma_f_erb", noise.bump.sigma_f_erb, Num, ParseDouble),
      REVCORR_FIELD("bump", "max_gain_db", noise.bump.max_gain_db, Num, ParseDouble),
      REVCORR_FIELD("bump", "f_lo_hz", noise.bump.f_lo_hz, Num, ParseDouble),
      REVCORR_FIELD("bump", "f_hi_hz", noise.bump.f_hi_hz, Num, ParseDouble),
      REVCORR_FIELD("bump", "gain_mode", noise.bump.gain_mode, GainModeText, ParseGainMode),
      REVCORR_FIELD("mps", "temporal_cutoff_hz", noise.mps.temporal_cutoff_hz, Num, ParseDouble),
      REVCORR_FIELD("mps", "spectral_cutoff", noise.mps.spectral_cutoff, Num, ParseDouble),
      REVCORR_FIELD("mps", "spectral_unit", noise.mps.spectral_unit, UnitText, ParseUnit),
      REVCORR_FIELD("mps", "phase_retrieval_iters", noise.mps.phase_retrieval_iters, IntText, ParseInt),
      REVCORR_FIELD("mps", "log_floor_db", noise.mps.log_floor_db, Num, ParseDouble),
      REVCORR_FIELD("mps", "preserve_modulation_depth", noise.mps.preserve_modulation_depth, Bool, ParseBool),
      REVCORR_FIELD("mps", "momentum", noise.mps.momentum, Num, ParseDouble),
      REVCORR_FIELD("mps", "convergence_threshold", noise.mps.convergence_threshold, Num, ParseDouble),
      REVCORR_FIELD("session", "blocks", session.n_blocks, IntText, ParseInt),
      REVCORR_FIELD("session", "trials_per_block", session.trials_per_block, IntText, ParseInt),
      REVCORR_FIELD("session", "initial_snr_db", session.staircase.initial_snr_db, Num, ParseDouble),
      REVCORR_FIELD("session", "down_step_db", session.staircase.down_step_db, Num, ParseDouble),
      REVCORR_FIELD("session", "up_down_ratio", session.staircase.up_down_ratio, Num, ParseDouble),
      REVCORR_FIELD("session", "rove", session.rove, Bool, ParseBool),
      REVCORR_FIELD("session", "conditions", session.conditions, KindsText, ParseKinds),
      REVCORR_FIELD("model", "middle_ear_taps", model.middle_ear_taps, IntText, ParseInt),
      REVCORR_FIELD("model", "middle_ear_low_hz", model.middle_ear_low_hz, Num, ParseDouble),
      REVCORR_FIELD("model", "middle_ear_high_hz", model.middle_ear_high_hz, Num, ParseDouble),
      REVCORR_FIELD("model", "band_stride", model.band_stride, IntText, ParseInt),
      REVCORR_FIELD("model", "envelope_cutoff_hz", model.envelope_cutoff_hz, Num, ParseDouble),
      REVCORR_FIELD("model", "envelope_order", model.envelope_order, IntText, ParseInt),
      REVCORR_FIELD("model", "adaptation_tau_s", model.adaptation_tau_s, JoinNumbers, ParseNumbers),
      REVCORR_FIELD("model", "overshoot_limit", model.overshoot_limit, Num, ParseDouble),
      REVCORR_FIELD("model", "adaptation_floor_db", model.adaptation_floor_db, Num, ParseDouble),
      REVCORR_FIELD("model", "modulation_rate_hz", model.modulation_rate_hz, Num, ParseDouble),
      REVCORR_FIELD("model", "modulation_lowpass_hz", model.modulation_lowpass_hz, Num, ParseDouble),
      REVCORR_FIELD("model", "modulation_centers_hz", model.modulation_centers_hz, JoinNumbers, ParseNumbers),
      REVCORR_FIELD("model", "modulation_q", model.modulation_q, Num, ParseDouble),
      REVCORR_FIELD("model", "modulation_phase_limit_hz", model.modulation_phase_limit_hz, Num, ParseDouble),
      REVCORR_FIELD("model", "modulation_attach_ratio", model.modulation_attach_ratio, Num, ParseDouble),
      REVCORR_FIELD("templates", "snr_db", templates.snr_db, Num, ParseDouble),
      REVCORR_FIELD("templates", "realizations", templates.realizations, IntText, ParseInt),
      REVCORR_FIELD("templates", "subtract_noise", templates.subtract_noise, Bool, ParseBool),
      REVCORR_FIELD("templates", "bias_rate", templates.bias_rate, Num, ParseDouble),
      REVCORR_FIELD("templates", "adapt_bias", templates.adapt_bias, Bool, ParseBool),
      REVCORR_FIELD("fit", "folds", fit.folds, IntText, ParseInt),
      REVCORR_FIELD("fit", "n_lambdas", fit.n_lambdas, IntText, ParseInt),
      REVCORR_FIELD("fit", "lambda_min", fit.lambda_min, Num, ParseDouble),
      REVCORR_FIELD("fit", "lambda_max", fit.lambda_max, Num, ParseDouble),
      REVCORR_FIELD("fit", "tolerance", fit.tolerance, Num, ParseDouble),
      REVCORR_FIELD("fit", "max_iterations", fit.max_iterations, IntText, ParseInt),
      REVCORR_FIELD("fit", "standardize", fit.standardize, Bool, ParseBool),
      REVCORR_FIELD("fit", "exclude_approach", fit.exclude_approach, Bool, ParseBool),
      REVCORR_FIELD("fit", "balance", fit.balance, Bool, ParseBool),
  };
  return fields;
}

#undef REVCORR_FIELD

}  // namespace

NoiseSpec PipelineConfig::NoiseFor(NoiseKind kind) const {
  NoiseSpec s = noise;
  s.kind = kind;
  return s;
}

CvOptions PipelineConfig::MakeCvOptions(std::uint64_t fold_seed) const {
  CvOptions o;
  o.lambdas = DefaultLambdas(fit.n_lambdas, fit.lambda_min, fit.lambda_max);
  o.folds = fit.folds;
  o.seed = fold_seed;
  o.lasso.tolerance = fit.tolerance;
  o.lasso.max_iterations = fit.max_iterations;
  return o;
}

int PipelineConfig::ResolvedWorkers() const { return workers > 0 ? workers : DefaultWorkers(); }

std::string ToIni(const PipelineConfig& config) {
  std::string text;
  std::string section;
  for (const Field& f : Fields()) {
    if (f.section != section) {
      text += (section.empty() ? "" : "\n") + std::string("[") + f.section + "]\n";
      section = f.section;
    }
    text += f.key + " = " + f.get(config) + "\n";
  }
  return text;
}

PipelineConfig ParseIni(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  std::map<std::string, const Field*> index;
  for (const Field& f : Fields()) index[f.section + "." + f.key] = &f;
  PipelineConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw std::invalid_argument("config: key outside a section: " + section);
    }
    for (const auto& [key, value] : body) {
      const auto it = index.find(section + "." + key);
      if (it == index.end()) throw std::invalid_argument("config: unknown key " + section + "." + key);
      try {
        it->second->set(config, value.data());
      } catch (const std::exception& e) {
        throw std::invalid_argument("config: bad value for " + section + "." + key + ": " + e.what());
      }
    }
  }
  config.session.master_seed = config.seed;
  return config;
}

PipelineConfig LoadConfig(const std::filesystem::path& path) { return ParseIni(ReadFile(path)); }

std::string ConfigHash(const PipelineConfig& config) {
  // Output location and worker count do not change any artifact.
  PipelineConfig canonical = config;
  canonical.out_dir = PipelineConfig{}.out_dir;
  canonical.workers = 0;
  return Sha256Hex(ToIni(canonical));
}

void ApplyEnvironment(PipelineConfig& config) {
  if (const char* dir = std::getenv("REVCORR_OUT_DIR"); dir && *dir) config.out_dir = dir;
  if (const char* w = std::getenv("REVCORR_WORKERS"); w && *w) {
    try {
      config.workers = std::stoi(w);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("REVCORR_WORKERS is not an integer: ") + w);
    }
  }
}

}  // namespace revcorr
