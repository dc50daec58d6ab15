#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tapmein/negatives.hpp"
#include "tapmein/tap.hpp"

namespace tapmein {

/// One enrolled identity: its genuine samples and every impostor attempt
/// made against it, distinguished by meta.kind.
struct UserSamples {
  std::string user_id;
  std::vector<RawTapSequence> samples;

  bool operator==(const UserSamples&) const = default;
};

struct LabeledDataset {
  std::vector<UserSamples> users;

  bool operator==(const LabeledDataset&) const = default;
};

// Checks every sample validates and genuine samples of a user share one
// length. Throws the validation error or kInconsistentLength.
void CheckDataset(const LabeledDataset& ds);

// Processed genuine samples of every user, for fitting PopulationStats.
std::vector<ProcessedSequence> GenuineCorpus(const LabeledDataset& ds);

struct SynthParams {
  std::size_t users = 20;
  std::size_t genuine_per_condition = 10;
  std::size_t attackers = 4;              // distinct attackers per victim
  std::size_t attempts_per_attacker = 5;  // per attack kind
  double duration_jitter = 0.08;          // relative sigma on durations
  double walking_jitter_scale = 1.5;
  double channel_jitter = 0.03;           // absolute sigma on pressure/size
  double attack1_jitter = 0.25;
  double attack2_jitter = 0.18;
  double attack3_jitter = 0.12;
  double persona_min = 0.3;               // pressure/size persona means
  double persona_max = 0.8;
  std::size_t min_length = 5;
  std::size_t max_length = 14;
  bool attacker_uses_victim_persona = false;
  std::uint64_t seed = 1;
};

struct SynthResult {
  LabeledDataset dataset;
  PopulationStats stats;
};

/// Simulated tapping population. Each user has a base melody and a
/// pressure/size persona; genuine samples add relative Gaussian jitter.
/// Imitation attacks reuse the victim's melody with extra imitation jitter
/// and the attacker's own persona; random attacks use a fresh melody.
SynthResult SynthDataset(const SynthParams& params);

// Population statistics bundled for use before any corpus is imported.
PopulationStats DefaultPopulationStats();

}  // namespace tapmein
