#include "tapmein/negatives.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tapmein/error.hpp"
#include "tapmein/features.hpp"

namespace tapmein {

namespace {

ChannelStats ToChannel(const std::vector<double>& pooled) {
  const SeriesStats st = ComputeSeriesStats(pooled);
  return ChannelStats{st.min, st.max, st.mean, std::sqrt(st.variance)};
}

void CheckChannel(const ChannelStats& c, const char* name) {
  const bool ok = std::isfinite(c.min) && std::isfinite(c.max) &&
                  std::isfinite(c.mean) && std::isfinite(c.std) &&
                  c.min <= c.max && c.std >= 0.0 && c.mean >= c.min &&
                  c.mean <= c.max;
  if (!ok) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("invalid channel statistics for ") + name);
  }
}

double Draw(const ChannelStats& c, Rng& rng) {
  if (c.std == 0.0) return c.mean;
  std::normal_distribution<double> dist(c.mean, c.std);
  return std::clamp(dist(rng), c.min, c.max);
}

}  // namespace

PopulationStats FitPopulationStats(std::span<const ProcessedSequence> corpus) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "corpus is empty");
  std::vector<double> p, s, d, u;
  for (const ProcessedSequence& seq : corpus) {
    p.insert(p.end(), seq.pressures.begin(), seq.pressures.end());
    s.insert(s.end(), seq.sizes.begin(), seq.sizes.end());
    d.insert(d.end(), seq.down_durations.begin(), seq.down_durations.end());
    u.insert(u.end(), seq.up_durations.begin(), seq.up_durations.end());
  }
  if (p.empty() || u.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "corpus holds no tap values");
  }
  PopulationStats stats;
  stats.pressure = ToChannel(p);
  stats.size = ToChannel(s);
  stats.down = ToChannel(d);
  stats.up = ToChannel(u);
  stats.sample_count = corpus.size();
  return stats;
}

void CheckPopulationStats(const PopulationStats& stats) {
  CheckChannel(stats.pressure, "pressure");
  CheckChannel(stats.size, "size");
  CheckChannel(stats.down, "down");
  CheckChannel(stats.up, "up");
  if (stats.sample_count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "sample_count must be >= 1");
  }
}

ProcessedSequence SampleNegative(const PopulationStats& stats, std::size_t taps,
                                 Rng& rng) {
  if (taps < kMinTaps || taps > kMaxTaps) {
    throw Error(ErrorCode::kBadLength,
                "negative length " + std::to_string(taps) + " out of range");
  }
  ProcessedSequence seq;
  seq.pressures.reserve(taps);
  seq.sizes.reserve(taps);
  seq.down_durations.reserve(taps);
  seq.up_durations.reserve(taps - 1);
  // Tap-by-tap, matching how a tap-password is assembled.
  for (std::size_t i = 0; i < taps; ++i) {
    seq.pressures.push_back(Draw(stats.pressure, rng));
    seq.sizes.push_back(Draw(stats.size, rng));
    seq.down_durations.push_back(Draw(stats.down, rng));
    if (i + 1 < taps) seq.up_durations.push_back(Draw(stats.up, rng));
  }
  return seq;
}

std::vector<ProcessedSequence> GenerateNegatives(const PopulationStats& stats,
                                                 std::size_t taps,
                                                 std::size_t count, Rng& rng) {
  if (count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "negative count must be >= 1");
  }
  std::vector<ProcessedSequence> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(SampleNegative(stats, taps, rng));
  return out;
}

}  // namespace tapmein
