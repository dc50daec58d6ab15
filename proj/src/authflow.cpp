#include "tapmein/authflow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "tapmein/error.hpp"
#include "tapmein/features.hpp"
#include "tapmein/learn/grid_search.hpp"

namespace tapmein {

namespace {

// Stream indices under the master seed.
enum StreamId : std::uint64_t {
  kNegativesStream = 1,
  kGridStream = 2,
  kFinalModelStream = 3,
  kCalibrationStream = 4,
};

}  // namespace

void TrainingConfig::Check() const {
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "enrollment size n must be >= 2");
  if (negative_multiplier < 1) {
    throw Error(ErrorCode::kInvalidArgument, "negative multiplier must be >= 1");
  }
  if (threshold_policy.kind == ThresholdPolicy::Kind::kCalibrated) {
    if (!(threshold_policy.target_fpr > 0.0 && threshold_policy.target_fpr < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "target FPR must be in (0, 1)");
    }
    if (threshold_policy.calibration_count < 1) {
      throw Error(ErrorCode::kInvalidArgument, "calibration count must be >= 1");
    }
  }
}

std::string_view DecisionReasonName(DecisionReason r) {
  switch (r) {
    case DecisionReason::kOk: return "ok";
    case DecisionReason::kLengthMismatch: return "length_mismatch";
    case DecisionReason::kInvalidInput: return "invalid_input";
  }
  return "invalid_input";
}

UserProfile Enroll(const std::string& user_id, std::span<const RawTapSequence> samples,
                   const PopulationStats& stats, const TrainingConfig& cfg) {
  cfg.Check();
  CheckPopulationStats(stats);
  if (samples.size() < cfg.n) {
    throw Error(ErrorCode::kInsufficientEnrollment,
                "need " + std::to_string(cfg.n) + " samples, got " +
                    std::to_string(samples.size()));
  }
  for (const RawTapSequence& s : samples) ValidateSequence(s);
  const std::size_t l = samples.front().length();
  for (const RawTapSequence& s : samples) {
    if (s.length() != l) {
      throw Error(ErrorCode::kInconsistentLength,
                  "enrollment samples disagree on tap count (" + std::to_string(l) +
                      " vs " + std::to_string(s.length()) + ")");
    }
  }

  Matrix rows;
  std::vector<int> labels;
  for (const RawTapSequence& s : samples) {
    rows.push_back(ExtractFeatures(ExtractDurations(s)).values);
    labels.push_back(1);
  }
  Rng neg_rng = MakeStream(cfg.master_seed, {kNegativesStream});
  for (const ProcessedSequence& neg : GenerateNegatives(
           stats, l, cfg.negative_multiplier * samples.size(), neg_rng)) {
    rows.push_back(ExtractFeatures(neg).values);
    labels.push_back(-1);
  }

  UserProfile profile;
  profile.user_id = user_id;
  profile.length = l;
  profile.population = stats;
  profile.standardizer = Standardizer::Fit(rows);
  const Matrix scaled = profile.standardizer.ApplyAll(rows);

  const GridSearchResult search =
      GridSearch(scaled, labels, cfg.classifier, cfg.grid,
                 StreamSeed(cfg.master_seed, {kGridStream}));
  profile.selected = search.best;
  profile.model = TrainCandidate(scaled, labels, search.best,
                                 StreamSeed(cfg.master_seed, {kFinalModelStream}));
  profile.threshold = NativeThreshold(cfg.classifier);

  if (cfg.threshold_policy.kind == ThresholdPolicy::Kind::kCalibrated) {
    Rng cal_rng = MakeStream(cfg.master_seed, {kCalibrationStream});
    profile.threshold = CalibrateThreshold(profile, cfg.threshold_policy.calibration_count,
                                           cfg.threshold_policy.target_fpr, cal_rng);
  }
  return profile;
}

double ScoreProcessed(const UserProfile& profile, const ProcessedSequence& seq) {
  const FeatureVector fv = ExtractFeatures(seq);
  return ScoreModel(profile.model, profile.standardizer.Apply(fv.values));
}

double CalibrateThreshold(const UserProfile& profile, std::size_t count,
                          double target_fpr, Rng& rng) {
  if (!(target_fpr > 0.0 && target_fpr < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "target FPR must be in (0, 1)");
  }
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "count must be >= 1");
  std::vector<double> scores;
  scores.reserve(count);
  for (const ProcessedSequence& neg :
       GenerateNegatives(profile.population, profile.length, count, rng)) {
    scores.push_back(ScoreProcessed(profile, neg));
  }
  std::sort(scores.begin(), scores.end(), std::greater<>());
  // At most `allowed` negatives may score at or above the threshold.
  const auto allowed = std::min(
      count - 1, static_cast<std::size_t>(
                     std::floor(target_fpr * static_cast<double>(count) + 1e-9)));
  return std::nextafter(scores[allowed], std::numeric_limits<double>::infinity());
}

Decision Verify(const UserProfile& profile, const RawTapSequence& candidate) {
  Decision d;
  d.threshold = profile.threshold;
  // The length gate runs first so a wrong-length candidate is never parsed
  // further.
  if (candidate.length() != profile.length) {
    d.reason = DecisionReason::kLengthMismatch;
    return d;
  }
  if (!IsValidSequence(candidate)) {
    d.reason = DecisionReason::kInvalidInput;
    return d;
  }
  const double score = ScoreProcessed(profile, ExtractDurations(candidate));
  d.reason = DecisionReason::kOk;
  d.score = score;
  d.accepted = score >= profile.threshold;
  return d;
}

}  // namespace tapmein
