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

#include "revcorr/experiment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

#include "revcorr/manifest.h"
#include "revcorr/rng.h"

namespace revcorr {

std::string ToString(Target t) { return t == Target::kAba ? "aba" : "ada"; }
std::string ToString(Phase p) { return p == Phase::kApproach ? "approach" : "measure"; }

Target ParseTarget(const std::string& s) {
  if (s == "aba") return Target::kAba;
  if (s == "ada") return Target::kAda;
  throw std::invalid_argument("unknown target: " + s);
}

Phase ParsePhase(const std::string& s) {
  if (s == "approach") return Phase::kApproach;
  if (s == "measure") return Phase::kMeasure;
  throw std::invalid_argument("unknown phase: " + s);
}

StaircaseState StaircaseState::Start(const StaircaseParams& params) {
  StaircaseState s;
  s.current_snr_db = params.initial_snr_db;
  s.down_step_db = params.down_step_db;
  s.up_down_ratio = params.up_down_ratio;
  return s;
}

StaircaseState StaircaseUpdate(const StaircaseState& state, bool correct) {
  StaircaseState next = state;
  const Direction dir = correct ? Direction::kDown : Direction::kUp;
  next.current_snr_db += correct ? -state.down_step_db : state.up_step_db();
  if (state.last_direction != Direction::kNone && dir != state.last_direction) {
    ++next.reversal_count;
  }
  next.last_direction = dir;
  ++next.trial_index;
  return next;
}

double StaircaseEquilibrium(double up_down_ratio) {
  return up_down_ratio / (1.0 + up_down_ratio);
}

LogisticObserver::LogisticObserver(double midpoint_db, double slope_db, std::uint64_t seed)
    : midpoint_db_(midpoint_db), slope_db_(slope_db), rng_(seed) {
  if (!(slope_db > 0)) throw std::invalid_argument("slope must be positive");
}

double LogisticObserver::ProbabilityCorrect(double snr_db) const {
  return 0.5 + 0.5 / (1.0 + std::exp(-(snr_db - midpoint_db_) / slope_db_));
}

Target LogisticObserver::Decide(const TrialStimulus& stimulus) {
  const bool correct = Uniform(rng_, 0.0, 1.0) < ProbabilityCorrect(stimulus.snr_db);
  if (correct) return stimulus.presented;
  return stimulus.presented == Target::kAba ? Target::kAda : Target::kAba;
}

Target CoinFlipObserver::Decide(const TrialStimulus&) {
  return Uniform(rng_, 0.0, 1.0) < 0.5 ? Target::kAba : Target::kAda;
}

std::uint64_t NoiseSeed(std::uint64_t master, NoiseKind kind, int index) {
  return DeriveSeed(master, "noise/" + ToString(kind), static_cast<std::uint64_t>(index));
}

namespace {

std::vector<Target> ShuffledTargets(int trials, std::uint64_t seed) {
  std::vector<Target> targets;
  targets.reserve(trials);
  const int n_aba = (trials + 1) / 2;
  for (int i = 0; i < trials; ++i) {
    targets.push_back(i < n_aba ? Target::kAba : Target::kAda);
  }
  Rng rng(seed);
  std::shuffle(targets.begin(), targets.end(), rng);
  return targets;
}

}  // namespace

BlockResult RunBlock(const BlockSetup& setup, const TargetPair& targets,
                     Listener& listener, const TrialCallback& on_trial) {
  if (setup.trials <= 0) throw std::invalid_argument("trials must be positive");
  BlockResult result;
  result.records.reserve(setup.trials);
  const std::uint64_t block = static_cast<std::uint64_t>(setup.block_index);
  const auto order =
      ShuffledTargets(setup.trials, DeriveSeed(setup.master_seed, "targets", block));
  Rng rove_rng(DeriveSeed(setup.master_seed, "rove", block));
  const bool synthesize = listener.NeedsWaveform() || static_cast<bool>(on_trial);

  StaircaseState state = StaircaseState::Start(setup.staircase);
  int n_aba_responses = 0;
  try {
    listener.BeginBlock(setup.block_index);
    for (int t = 0; t < setup.trials; ++t) {
      TrialRecord rec;
      rec.trial_index = t;
      rec.block_index = setup.block_index;
      rec.noise_kind = setup.noise.kind;
      rec.noise_seed = NoiseSeed(setup.master_seed, setup.noise.kind, setup.first_noise_index + t);
      rec.target = order[t];
      rec.snr_db = state.current_snr_db;
      // Drawn on every trial so that the rove sequence does not depend on
      // whether waveforms are synthesised.
      rec.rove_db = setup.rove ? Uniform(rove_rng, -kRoveLimitDb, kRoveLimitDb) : 0.0;

      Waveform noise;
      Waveform mixture;
      TrialStimulus stim;
      stim.presented = rec.target;
      stim.snr_db = rec.snr_db;
      if (synthesize) {
        noise = GenerateNoise(setup.noise, rec.noise_seed).waveform;
        if (listener.NeedsWaveform()) {
          mixture = ApplyGainDb(
              MixAtSnr(targets.Get(rec.target), noise, Snr::Db(rec.snr_db), setup.conv),
              rec.rove_db);
          stim.mixture = &mixture;
        }
      }
      rec.response = listener.Decide(stim);
      rec.correct = rec.response == rec.target;
      state = StaircaseUpdate(state, rec.correct);
      rec.phase = state.reversal_count >= kMeasuringPhaseReversal ? Phase::kMeasure
                                                                  : Phase::kApproach;
      if (rec.response == Target::kAba) ++n_aba_responses;
      result.records.push_back(rec);
      if (on_trial) on_trial(rec, noise);
    }
  } catch (const std::exception& e) {
    result.aborted = true;
    result.error = e.what();
  }
  result.reversals = state.reversal_count;
  if (!result.records.empty()) {
    const double ratio = static_cast<double>(n_aba_responses) / result.records.size();
    result.bias_warning = ratio > 0.6 || ratio < 0.4;
  }
  return result;
}

std::vector<NoiseKind> PlanBlocks(const SessionConfig& config) {
  const int n_cond = static_cast<int>(config.conditions.size());
  if (n_cond == 0) throw std::invalid_argument("no noise conditions");
  if (config.n_blocks < 0) throw std::invalid_argument("negative block count");
  Rng rng(DeriveSeed(config.master_seed, "block-order"));
  std::vector<NoiseKind> first = config.conditions;
  std::shuffle(first.begin(), first.end(), rng);
  std::vector<NoiseKind> rest;
  for (int i = n_cond; i < config.n_blocks; ++i) {
    rest.push_back(config.conditions[(i - n_cond) % n_cond]);
  }
  std::shuffle(rest.begin(), rest.end(), rng);
  std::vector<NoiseKind> plan;
  for (int i = 0; i < config.n_blocks; ++i) {
    plan.push_back(i < n_cond ? first[i] : rest[i - n_cond]);
  }
  return plan;
}

ExclusionResult ExcludeApproachPhase(std::span<const TrialRecord> block) {
  ExclusionResult out;
  if (block.empty()) return out;
  StaircaseState state;
  int start = -1;
  for (size_t i = 0; i < block.size(); ++i) {
    state = StaircaseUpdate(state, block[i].correct);
    if (state.reversal_count >= kMeasuringPhaseReversal) {
      start = static_cast<int>(i);
      break;
    }
  }
  if (start < 0) {
    out.block_excluded = true;
    out.warning = "block " + std::to_string(block.front().block_index) + " has " +
                  std::to_string(state.reversal_count) + " reversals; excluded";
    return out;
  }
  out.records.assign(block.begin() + start, block.end());
  for (auto& r : out.records) r.phase = Phase::kMeasure;
  return out;
}

std::vector<TrialRecord> BalanceResponses(std::span<const TrialRecord> records) {
  std::vector<size_t> aba, ada;
  for (size_t i = 0; i < records.size(); ++i) {
    (records[i].response == Target::kAba ? aba : ada).push_back(i);
  }
  std::vector<size_t>& majority = aba.size() > ada.size() ? aba : ada;
  const size_t excess = std::max(aba.size(), ada.size()) - std::min(aba.size(), ada.size());
  std::stable_sort(majority.begin(), majority.end(), [&](size_t a, size_t b) {
    return records[a].snr_db < records[b].snr_db;
  });
  std::vector<bool> removed(records.size(), false);
  size_t lo = 0, hi = majority.size();
  for (size_t k = 0; k < excess; ++k) {
    if (k % 2 == 0) {
      removed[majority[--hi]] = true;
    } else {
      removed[majority[lo++]] = true;
    }
  }
  std::vector<TrialRecord> out;
  out.reserve(records.size() - excess);
  for (size_t i = 0; i < records.size(); ++i) {
    if (!removed[i]) out.push_back(records[i]);
  }
  return out;
}

double ClampRate(double rate, int n) {
  if (n <= 0) throw std::invalid_argument("rate clamp needs n > 0");
  const double lo = 1.0 / (2.0 * n);
  return std::clamp(rate, lo, 1.0 - lo);
}

SdtResult SignalDetection(double hit_rate, double false_alarm_rate) {
  if (!(hit_rate > 0 && hit_rate < 1 && false_alarm_rate > 0 && false_alarm_rate < 1)) {
    throw std::invalid_argument("rates must lie strictly inside (0, 1)");
  }
  const boost::math::normal_distribution<double> z;
  const double zh = boost::math::quantile(z, hit_rate);
  const double zf = boost::math::quantile(z, false_alarm_rate);
  return {zh - zf, -(zh + zf) / 2.0};
}

BehavioralSummary BehavioralMetrics(std::span<const TrialRecord> records) {
  BehavioralSummary out;
  if (records.empty()) return out;

  struct Counts {
    int n_aba = 0, n_ada = 0, correct_aba = 0, correct_ada = 0;
  };
  std::map<long, Counts> bins;
  int n_correct = 0;
  for (const auto& r : records) {
    Counts& c = bins[static_cast<long>(std::floor(r.snr_db + 0.5))];
    if (r.target == Target::kAba) {
      ++c.n_aba;
      c.correct_aba += r.correct;
    } else {
      ++c.n_ada;
      c.correct_ada += r.correct;
    }
    n_correct += r.correct;
  }
  out.percent_correct = 100.0 * n_correct / records.size();

  for (const auto& [center, c] : bins) {
    if (c.n_aba == 0 || c.n_ada == 0) continue;
    SnrBinMetrics m;
    m.snr_center_db = static_cast<double>(center);
    m.n_aba = c.n_aba;
    m.n_ada = c.n_ada;
    m.pc_aba = 100.0 * c.correct_aba / c.n_aba;
    m.pc_ada = 100.0 * c.correct_ada / c.n_ada;
    m.hit_rate = ClampRate(static_cast<double>(c.correct_ada) / c.n_ada, c.n_ada);
    m.false_alarm_rate =
        ClampRate(static_cast<double>(c.n_aba - c.correct_aba) / c.n_aba, c.n_aba);
    const SdtResult sdt = SignalDetection(m.hit_rate, m.false_alarm_rate);
    m.dprime = sdt.dprime;
    m.criterion = sdt.criterion;
    out.bins.push_back(m);
  }

  struct BlockAcc {
    NoiseKind kind;
    double snr_sum = 0;
    int n = 0, correct = 0;
  };
  std::map<int, BlockAcc> blocks;
  for (const auto& r : records) {
    if (r.phase != Phase::kMeasure) continue;
    auto [it, inserted] = blocks.try_emplace(r.block_index, BlockAcc{r.noise_kind});
    it->second.snr_sum += r.snr_db;
    ++it->second.n;
    it->second.correct += r.correct;
  }
  for (const auto& [index, acc] : blocks) {
    out.thresholds.push_back({index, acc.kind, acc.snr_sum / acc.n,
                              100.0 * acc.correct / acc.n, acc.n});
  }
  return out;
}

std::string TrialLogHeader() {
  return "trial_index,block_index,noise_kind,noise_seed,target_id,snr,rove,response,"
         "correct,phase";
}

std::string FormatTrialRecord(const TrialRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d,%d,%s,%llu,%s,%.17g,%.17g,%s,%d,%s", r.trial_index,
                r.block_index, ToString(r.noise_kind).c_str(),
                static_cast<unsigned long long>(r.noise_seed), ToString(r.target).c_str(),
                r.snr_db, r.rove_db, ToString(r.response).c_str(), r.correct ? 1 : 0,
                ToString(r.phase).c_str());
  return buf;
}

void WriteTrialLog(const std::filesystem::path& path, std::span<const TrialRecord> records) {
  std::string text = TrialLogHeader() + "\n";
  for (const auto& r : records) text += FormatTrialRecord(r) + "\n";
  WriteFileAtomic(path, text);
}

std::vector<TrialRecord> ReadTrialLog(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  std::string line;
  if (!std::getline(in, line) || line != TrialLogHeader()) {
    throw std::runtime_error("not a trial log: " + path.string());
  }
  std::vector<TrialRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 10) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected 10 fields");
    }
    TrialRecord r;
    r.trial_index = std::stoi(f[0]);
    r.block_index = std::stoi(f[1]);
    r.noise_kind = ParseNoiseKind(f[2]);
    r.noise_seed = std::stoull(f[3]);
    r.target = ParseTarget(f[4]);
    r.snr_db = ParseNumber(f[5]);
    r.rove_db = ParseNumber(f[6]);
    r.response = ParseTarget(f[7]);
    r.correct = f[8] == "1";
    r.phase = ParsePhase(f[9]);
    if (r.correct != (r.response == r.target)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": correct flag disagrees with response");
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace revcorr
