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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "gtest/gtest.h"
#include "revcorr/experiment.h"
#include "revcorr/manifest.h"

namespace revcorr {
namespace {

TrialRecord Rec(int index, Target target, Target response, double snr = 0.0) {
  TrialRecord r;
  r.trial_index = index;
  r.target = target;
  r.response = response;
  r.correct = target == response;
  r.snr_db = snr;
  return r;
}

// Builds a block from a correctness pattern ('C' or 'W').
std::vector<TrialRecord> FromPattern(const std::string& pattern) {
  std::vector<TrialRecord> out;
  StaircaseState s = StaircaseState::Start({});
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const bool ok = pattern[i] == 'C';
    TrialRecord r = Rec(static_cast<int>(i), Target::kAda, ok ? Target::kAda : Target::kAba,
                        s.current_snr_db);
    s = StaircaseUpdate(s, ok);
    r.phase = s.reversal_count >= kMeasuringPhaseReversal ? Phase::kMeasure : Phase::kApproach;
    out.push_back(r);
  }
  return out;
}

BlockSetup MakeSetup(int trials, int block = 0) {
  BlockSetup s;
  s.block_index = block;
  s.trials = trials;
  s.master_seed = 17;
  return s;
}

TEST(StaircaseTest, StepRule) {
  const StaircaseState s = StaircaseState::Start({});
  EXPECT_DOUBLE_EQ(StaircaseUpdate(s, true).current_snr_db, -1.0);
  EXPECT_DOUBLE_EQ(StaircaseUpdate(s, false).current_snr_db, 2.41);
  EXPECT_DOUBLE_EQ(s.up_step_db(), 2.41 * s.down_step_db);
  EXPECT_NEAR(StaircaseEquilibrium(2.41), 2.41 / 3.41, 1e-15);
  EXPECT_NEAR(StaircaseEquilibrium(2.41), 0.7067, 1e-4);
}

TEST(StaircaseTest, ReversalsCountDirectionChanges) {
  StaircaseState s = StaircaseState::Start({});
  int last = 0;
  for (bool c : {true, true, false, true, false, true, true, false}) {
    s = StaircaseUpdate(s, c);
    EXPECT_GE(s.reversal_count, last);
    last = s.reversal_count;
  }
  EXPECT_EQ(s.reversal_count, 5);
}

TEST(RunBlockTest, AlwaysCorrectDescendsByDownStep) {
  AlwaysCorrectObserver obs;
  const BlockResult r = RunBlock(MakeSetup(30), {}, obs);
  ASSERT_EQ(r.records.size(), 30u);
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    EXPECT_DOUBLE_EQ(r.records[i].snr_db, -static_cast<double>(i));
    EXPECT_TRUE(r.records[i].correct);
    EXPECT_EQ(r.records[i].phase, Phase::kApproach);
  }
  EXPECT_EQ(r.reversals, 0);
}

TEST(RunBlockTest, CoinFlipDriftsUpward) {
  CoinFlipObserver obs(5);
  const BlockResult r = RunBlock(MakeSetup(4000), {}, obs);
  int measure = 0, correct = 0;
  for (const auto& t : r.records) {
    if (t.phase == Phase::kMeasure) {
      ++measure;
      correct += t.correct;
    }
  }
  EXPECT_NEAR(100.0 * correct / measure, 50.0, 2.5);
  const double drift = (r.records.back().snr_db - r.records.front().snr_db) / (r.records.size() - 1);
  EXPECT_NEAR(drift, 0.705, 0.1);
}

TEST(RunBlockTest, TargetsAreBalancedAndLogIsDeterministic) {
  LogisticObserver a(-10.0, 2.0, 3), b(-10.0, 2.0, 3);
  const BlockResult ra = RunBlock(MakeSetup(400), {}, a);
  const BlockResult rb = RunBlock(MakeSetup(400), {}, b);
  int aba = 0;
  for (std::size_t i = 0; i < ra.records.size(); ++i) {
    EXPECT_EQ(FormatTrialRecord(ra.records[i]), FormatTrialRecord(rb.records[i]));
    aba += ra.records[i].target == Target::kAba;
    EXPECT_EQ(ra.records[i].correct, ra.records[i].response == ra.records[i].target);
    EXPECT_LE(std::abs(ra.records[i].rove_db), kRoveLimitDb);
  }
  EXPECT_EQ(aba, 200);
}

TEST(RunBlockTest, PhaseMarksTrialsBeforeFourthReversal) {
  LogisticObserver obs(-10.0, 2.0, 8);
  const BlockResult r = RunBlock(MakeSetup(200), {}, obs);
  StaircaseState s = StaircaseState::Start({});
  for (const auto& t : r.records) {
    s = StaircaseUpdate(s, t.correct);
    EXPECT_EQ(t.phase == Phase::kMeasure, s.reversal_count >= 4);
  }
}

class ThrowingListener : public Listener {
 public:
  bool NeedsWaveform() const override { return false; }
  Target Decide(const TrialStimulus& s) override {
    if (++calls_ > 5) throw std::runtime_error("listener failed");
    return s.presented;
  }

 private:
  int calls_ = 0;
};

TEST(RunBlockTest, ListenerErrorKeepsPartialLog) {
  ThrowingListener obs;
  const BlockResult r = RunBlock(MakeSetup(50), {}, obs);
  EXPECT_TRUE(r.aborted);
  EXPECT_EQ(r.records.size(), 5u);
  EXPECT_EQ(r.error, "listener failed");
}

TEST(PlanBlocksTest, FirstBlocksCoverConditionsAndCountsBalance) {
  SessionConfig cfg;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    cfg.master_seed = seed;
    const auto plan = PlanBlocks(cfg);
    ASSERT_EQ(plan.size(), 30u);
    std::vector<NoiseKind> first(plan.begin(), plan.begin() + 3);
    std::sort(first.begin(), first.end());
    EXPECT_EQ(first, (std::vector<NoiseKind>{NoiseKind::kWhite, NoiseKind::kBump, NoiseKind::kMps}));
    std::map<NoiseKind, int> count;
    for (auto k : plan) ++count[k];
    for (auto [k, c] : count) EXPECT_EQ(c, 10);
  }
}

TEST(ExclusionTest, HandTracedReversals) {
  // Directions: down, down, up (rev 1), down (2), up (3), down (4 at trial 5).
  const auto block = FromPattern("CCWCWCWCCC");
  const ExclusionResult ex = ExcludeApproachPhase(block);
  EXPECT_FALSE(ex.block_excluded);
  ASSERT_EQ(ex.records.size(), 5u);
  EXPECT_EQ(ex.records.front().trial_index, 5);
  for (const auto& r : ex.records) EXPECT_EQ(r.phase, Phase::kMeasure);
}

TEST(ExclusionTest, MonotoneBlockIsExcluded) {
  const ExclusionResult ex = ExcludeApproachPhase(FromPattern("CCCCCCCC"));
  EXPECT_TRUE(ex.block_excluded);
  EXPECT_TRUE(ex.records.empty());
  EXPECT_FALSE(ex.warning.empty());
}

TEST(ExclusionTest, EmptyInput) {
  EXPECT_TRUE(ExcludeApproachPhase({}).records.empty());
}

TEST(ExclusionTest, NeverDropsMeasuringTrials) {
  LogisticObserver obs(-8.0, 1.5, 21);
  const BlockResult r = RunBlock(MakeSetup(300), {}, obs);
  const ExclusionResult ex = ExcludeApproachPhase(r.records);
  int measuring = 0;
  for (const auto& t : r.records) measuring += t.phase == Phase::kMeasure;
  EXPECT_EQ(static_cast<int>(ex.records.size()), measuring);
}

TEST(BalanceTest, SixFourTrace) {
  std::vector<TrialRecord> recs;
  int i = 0;
  for (double snr : {-10.0, -8.0, -6.0, -4.0, -2.0, 0.0}) recs.push_back(Rec(i++, Target::kAba, Target::kAba, snr));
  for (double snr : {-9.0, -7.0, -5.0, -3.0}) recs.push_back(Rec(i++, Target::kAda, Target::kAda, snr));
  const auto out = BalanceResponses(recs);
  ASSERT_EQ(out.size(), 8u);
  for (const auto& r : out) {
    EXPECT_NE(r.snr_db, 0.0);    // max end removed first
    EXPECT_NE(r.snr_db, -10.0);  // then the min end
  }
  for (std::size_t k = 1; k < out.size(); ++k) EXPECT_LT(out[k - 1].trial_index, out[k].trial_index);
}

TEST(BalanceTest, FiftyThreePercentAba) {
  std::vector<TrialRecord> recs;
  for (int i = 0; i < 100; ++i) {
    recs.push_back(Rec(i, Target::kAba, i < 53 ? Target::kAba : Target::kAda, -0.1 * i));
  }
  const auto out = BalanceResponses(recs);
  EXPECT_EQ(out.size(), 94u);
  const auto aba = std::count_if(out.begin(), out.end(), [](const auto& r) { return r.response == Target::kAba; });
  EXPECT_EQ(aba, 47);
}

TEST(BalanceTest, BalancedIsIdentity) {
  std::vector<TrialRecord> recs = {Rec(0, Target::kAba, Target::kAba), Rec(1, Target::kAda, Target::kAda)};
  const auto out = BalanceResponses(recs);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].trial_index, 0);
  EXPECT_EQ(out[1].trial_index, 1);
}

TEST(SdtTest, Oracles) {
  SdtResult r = SignalDetection(0.69, 0.31);
  EXPECT_NEAR(r.dprime, 0.99, 0.01);
  EXPECT_NEAR(r.criterion, 0.0, 0.01);
  r = SignalDetection(0.977, 0.50);
  EXPECT_NEAR(r.dprime, 2.00, 0.01);
  EXPECT_NEAR(r.criterion, -1.00, 0.01);
  EXPECT_DOUBLE_EQ(SignalDetection(0.4, 0.4).dprime, 0.0);
}

TEST(SdtTest, RelabelingKeepsDprimeAndFlipsCriterion) {
  const SdtResult a = SignalDetection(0.8, 0.3);
  const SdtResult b = SignalDetection(1.0 - 0.3, 1.0 - 0.8);
  EXPECT_NEAR(a.dprime, b.dprime, 1e-12);
  EXPECT_NEAR(a.criterion, -b.criterion, 1e-12);
}

TEST(SdtTest, ClampRate) {
  EXPECT_DOUBLE_EQ(ClampRate(1.0, 10), 0.95);
  EXPECT_DOUBLE_EQ(ClampRate(0.0, 10), 0.05);
  EXPECT_DOUBLE_EQ(ClampRate(0.3, 10), 0.3);
}

TEST(BehavioralTest, BinsAndThresholds) {
  std::vector<TrialRecord> recs;
  // Bin -5: 4 ada (3 hits), 4 aba (1 false alarm).
  for (int i = 0; i < 4; ++i) recs.push_back(Rec(i, Target::kAda, i < 3 ? Target::kAda : Target::kAba, -5.2));
  for (int i = 4; i < 8; ++i) recs.push_back(Rec(i, Target::kAba, i < 5 ? Target::kAda : Target::kAba, -4.7));
  for (auto& r : recs) r.phase = Phase::kMeasure;
  const BehavioralSummary s = BehavioralMetrics(recs);
  ASSERT_EQ(s.bins.size(), 1u);
  EXPECT_EQ(s.bins[0].snr_center_db, -5.0);
  EXPECT_DOUBLE_EQ(s.bins[0].hit_rate, 0.75);
  EXPECT_DOUBLE_EQ(s.bins[0].false_alarm_rate, 0.25);
  EXPECT_NEAR(s.bins[0].dprime, SignalDetection(0.75, 0.25).dprime, 1e-12);
  ASSERT_EQ(s.thresholds.size(), 1u);
  EXPECT_NEAR(s.thresholds[0].threshold_db, (4 * -5.2 + 4 * -4.7) / 8.0, 1e-12);
  EXPECT_DOUBLE_EQ(s.percent_correct, 75.0);
}

TEST(TrialLogTest, RoundTrip) {
  LogisticObserver obs(-10.0, 2.0, 4);
  const BlockResult r = RunBlock(MakeSetup(50, 3), {}, obs);
  const auto path = std::filesystem::temp_directory_path() / "revcorr_trials_test.csv";
  WriteTrialLog(path, r.records);
  const auto back = ReadTrialLog(path);
  ASSERT_EQ(back.size(), r.records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(FormatTrialRecord(back[i]), FormatTrialRecord(r.records[i]));
  }
  std::filesystem::remove(path);
}

TEST(TrialLogTest, RejectsInconsistentCorrectness) {
  const auto path = std::filesystem::temp_directory_path() / "revcorr_bad_trials.csv";
  WriteFileAtomic(path, TrialLogHeader() + "\n0,0,white,1,aba,0,0,ada,1,approach\n");
  EXPECT_THROW(ReadTrialLog(path), std::exception);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace revcorr
