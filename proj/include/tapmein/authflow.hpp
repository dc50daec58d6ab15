#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tapmein/learn/classifier.hpp"
#include "tapmein/learn/standardizer.hpp"
#include "tapmein/negatives.hpp"
#include "tapmein/random.hpp"
#include "tapmein/tap.hpp"

namespace tapmein {

struct ThresholdPolicy {
  enum class Kind { kNative, kCalibrated };
  Kind kind = Kind::kNative;  // 0 for SVM, 0.5 for forest
  double target_fpr = 0.01;
  std::size_t calibration_count = 200;

  static ThresholdPolicy Native() { return {}; }
  static ThresholdPolicy Calibrated(double target_fpr, std::size_t count = 200) {
    return {Kind::kCalibrated, target_fpr, count};
  }
};

struct TrainingConfig {
  std::size_t n = 5;
  std::size_t negative_multiplier = 5;
  ClassifierKind classifier = ClassifierKind::kSvm;
  HyperGrid grid = HyperGrid::Default();
  ThresholdPolicy threshold_policy;
  std::uint64_t master_seed = 0;

  // Throws Error(kInvalidArgument).
  void Check() const;
};

struct UserProfile {
  std::string user_id;
  std::size_t length = 0;
  Standardizer standardizer;
  Model model;
  Candidate selected;
  double threshold = 0.0;
  PopulationStats population;
  std::string created_at;  // stamped by the persistence layer, not by Enroll

  ClassifierKind kind() const { return KindOf(model); }
};

enum class DecisionReason { kOk, kLengthMismatch, kInvalidInput };

std::string_view DecisionReasonName(DecisionReason r);

struct Decision {
  bool accepted = false;
  std::optional<double> score;
  double threshold = 0.0;
  DecisionReason reason = DecisionReason::kInvalidInput;

  bool operator==(const Decision&) const = default;
};

/// Trains a per-user profile from genuine samples plus multiplier * count
/// synthesized negatives. Deterministic in (samples, stats, cfg).
/// Throws kInsufficientEnrollment, kInconsistentLength, or the validation
/// error of the first bad sample.
UserProfile Enroll(const std::string& user_id, std::span<const RawTapSequence> samples,
                   const PopulationStats& stats, const TrainingConfig& cfg);

// Classifier score of an already-processed sequence of the profile's length.
double ScoreProcessed(const UserProfile& profile, const ProcessedSequence& seq);

// Smallest threshold whose acceptance rate over `count` fresh negatives is at
// most target_fpr.
double CalibrateThreshold(const UserProfile& profile, std::size_t count,
                          double target_fpr, Rng& rng);

// Never throws for bad candidates; every failure is a Decision.
Decision Verify(const UserProfile& profile, const RawTapSequence& candidate);

}  // namespace tapmein
