#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tapmein/authflow.hpp"
#include "tapmein/eval/dataset.hpp"
#include "tapmein/eval/rates.hpp"

namespace tapmein {

struct UserReport {
  std::string user_id;
  std::size_t length = 0;
  RateReport overall;                          // all impostors pooled
  std::map<std::string, RateReport> attacks;   // keyed by attack kind name
  std::map<std::string, RateReport> conditions;  // genuine split by condition
};

struct AggregateReport {
  RateReport overall;
  std::map<std::string, RateReport> attacks;
  std::map<std::string, RateReport> conditions;
  double balanced_accuracy = 0.0;  // 1 - (fpr + fnr) / 2 at the operating point
};

struct ProtocolReport {
  std::size_t repetitions = 0;
  std::size_t n = 0;
  std::size_t negative_multiplier = 0;
  ClassifierKind classifier = ClassifierKind::kSvm;
  std::uint64_t master_seed = 0;
  std::vector<UserReport> users;  // dataset order
  AggregateReport aggregate;
};

/// Sample indices (into UserSamples::samples) used by one (user, repetition)
/// task: enrolled ones and every one scored afterwards.
struct TaskTrace {
  std::size_t user_index = 0;
  std::size_t repetition = 0;
  std::vector<std::size_t> enrolled;
  std::vector<std::size_t> scored;
};

struct ProtocolOptions {
  std::size_t repetitions = 30;
  std::size_t threads = 1;
  // Called once per (user, repetition) after scoring; serialized.
  std::function<void(const TaskTrace&)> observer;
};

// Per-user enrollment draws, averaged over repetitions then users.
// Throws kInsufficientGenuine when a user lacks more than n genuine samples.
ProtocolReport RunProtocol(const LabeledDataset& ds, const PopulationStats& stats,
                           const TrainingConfig& cfg, const ProtocolOptions& options);

struct SweepRow {
  ClassifierKind classifier = ClassifierKind::kSvm;
  std::size_t n = 0;
  double mean_eer = 0.0;
};

std::vector<SweepRow> SweepEnrollmentSize(const LabeledDataset& ds,
                                          const PopulationStats& stats,
                                          const TrainingConfig& cfg,
                                          const std::vector<std::size_t>& n_values,
                                          const std::vector<ClassifierKind>& classifiers,
                                          const ProtocolOptions& options);

struct RankedFeature {
  std::string name;
  double importance = 0.0;  // mean normalized importance over all runs
};

struct FeatureRanking {
  std::vector<RankedFeature> top;
  std::size_t runs = 0;
  std::vector<double> run_sums;  // importance total of each run
};

// Trains forests (cfg.classifier is forced to forest) per user and
// repetition; ranks features by mean importance.
FeatureRanking RankFeatures(const LabeledDataset& ds, const PopulationStats& stats,
                            const TrainingConfig& cfg, std::size_t top_k,
                            const ProtocolOptions& options);

}  // namespace tapmein
