#include "tapmein/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "tapmein/error.hpp"

namespace tapmein {

SeriesStats ComputeSeriesStats(std::span<const double> x) {
  if (x.empty()) throw Error(ErrorCode::kEmptySeries, "series is empty");
  SeriesStats st;
  st.min = *std::min_element(x.begin(), x.end());
  st.max = *std::max_element(x.begin(), x.end());
  double sum = 0.0;
  for (double v : x) sum += v;
  const double n = static_cast<double>(x.size());
  // Rounding can push the mean a hair outside [min, max] for near-constant
  // series; clamping first also makes a constant series have variance 0.
  st.mean = std::clamp(sum / n, st.min, st.max);
  double ss = 0.0;
  for (double v : x) ss += (v - st.mean) * (v - st.mean);
  st.variance = ss / n;
  return st;
}

std::vector<double> DftMagnitudes(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw Error(ErrorCode::kEmptySeries, "series is empty");
  // Twiddle table indexed by (k*j) mod n keeps the argument exact.
  std::vector<double> cos_table(n), sin_table(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(t) /
                         static_cast<double>(n);
    cos_table[t] = std::cos(angle);
    sin_table[t] = std::sin(angle);
  }
  std::vector<double> mags(n);
  for (std::size_t k = 0; k < n; ++k) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;
    for (std::size_t j = 0; j < n; ++j) {
      re += x[j] * cos_table[idx];
      im -= x[j] * sin_table[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    mags[k] = std::hypot(re, im);
  }
  return mags;
}

FeatureVector ExtractFeatures(const ProcessedSequence& seq) {
  const std::size_t l = seq.length();
  const std::array<std::span<const double>, 4> series{
      seq.pressures, seq.sizes, seq.down_durations, seq.up_durations};

  FeatureVector fv;
  fv.values.reserve(FeatureCount(l));
  for (const auto& s : series) fv.values.insert(fv.values.end(), s.begin(), s.end());

  std::array<std::vector<double>, 4> spectra;
  for (std::size_t c = 0; c < series.size(); ++c) spectra[c] = DftMagnitudes(series[c]);

  auto push_stats = [&fv](const SeriesStats& st) {
    fv.values.insert(fv.values.end(), {st.min, st.max, st.mean, st.variance});
  };
  for (const auto& s : series) push_stats(ComputeSeriesStats(s));
  for (const auto& m : spectra) push_stats(ComputeSeriesStats(m));
  for (const auto& m : spectra) {
    double energy = 0.0;
    for (double v : m) energy += v;
    fv.values.push_back(energy);
  }
  return fv;
}

std::vector<std::string> FeatureNames(std::size_t taps) {
  static constexpr std::array<const char*, 4> kSeries{"p", "s", "d", "u"};
  static constexpr std::array<const char*, 4> kStats{"min", "max", "mean", "var"};
  std::vector<std::string> names;
  names.reserve(FeatureCount(taps));
  for (std::size_t c = 0; c < 4; ++c) {
    const std::size_t count = c == 3 ? taps - 1 : taps;
    for (std::size_t i = 1; i <= count; ++i)
      names.push_back(kSeries[c] + std::to_string(i));
  }
  for (const char* s : kSeries)
    for (const char* st : kStats) names.push_back(std::string(s) + "_" + st);
  for (const char* s : kSeries)
    for (const char* st : kStats) names.push_back(std::string(s) + "_fft_" + st);
  for (const char* s : kSeries) names.push_back(std::string(s) + "_energy");
  return names;
}

}  // namespace tapmein
