#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tapmein/tap.hpp"

namespace tapmein {

inline constexpr int kFeatureLayoutVersion = 1;

struct SeriesStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double variance = 0.0;  // population variance
};

/// Feature vector for an l-tap sequence. Layout (4l + 35 entries):
///   p1..pl, s1..sl, d1..dl, u1..u(l-1)
///   time-domain  {min,max,mean,var} for p, s, d, u
///   DFT-magnitude {min,max,mean,var} for p, s, d, u
///   energy (sum of DFT magnitudes) for p, s, d, u
struct FeatureVector {
  std::vector<double> values;
  int layout_version = kFeatureLayoutVersion;
};

// Throws Error(kEmptySeries) for an empty input.
SeriesStats ComputeSeriesStats(std::span<const double> x);

// |X_k| for every bin k = 0..n-1 of the length-n DFT (no padding).
std::vector<double> DftMagnitudes(std::span<const double> x);

FeatureVector ExtractFeatures(const ProcessedSequence& seq);

constexpr std::size_t FeatureCount(std::size_t taps) { return 4 * taps + 35; }

// Index of the first summary slot (time-domain pressure min).
constexpr std::size_t SummaryOffset(std::size_t taps) { return 4 * taps - 1; }

// Human-readable names matching the layout, e.g. "p1", "u3", "d_mean",
// "s_fft_var", "p_energy".
std::vector<std::string> FeatureNames(std::size_t taps);

}  // namespace tapmein
