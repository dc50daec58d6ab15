#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tapmein/random.hpp"
#include "tapmein/tap.hpp"

namespace tapmein {

struct ChannelStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation

  bool operator==(const ChannelStats&) const = default;
};

/// Per-channel summary of a tapping population. Only these sixteen numbers
/// are needed to synthesize negatives.
struct PopulationStats {
  ChannelStats pressure;
  ChannelStats size;
  ChannelStats down;
  ChannelStats up;
  std::size_t sample_count = 0;
  std::string provenance;

  bool operator==(const PopulationStats&) const = default;
};

// Throws Error(kEmptyCorpus) when the corpus is empty.
PopulationStats FitPopulationStats(std::span<const ProcessedSequence> corpus);

// Checks the ChannelStats/PopulationStats invariants; throws kInvalidArgument.
void CheckPopulationStats(const PopulationStats& stats);

// Independent clamped-normal draw per value. Throws kBadLength when taps is
// outside [kMinTaps, kMaxTaps].
ProcessedSequence SampleNegative(const PopulationStats& stats, std::size_t taps,
                                 Rng& rng);

std::vector<ProcessedSequence> GenerateNegatives(const PopulationStats& stats,
                                                 std::size_t taps,
                                                 std::size_t count, Rng& rng);

}  // namespace tapmein
