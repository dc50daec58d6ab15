#pragma once

#include <cstddef>
#include <span>

namespace tapmein {

struct RatePair {
  double fpr = 0.0;
  double fnr = 0.0;
};

/// Rates at one threshold. A score s is accepted iff s >= threshold.
/// An empty side contributes a rate of 0.
RatePair ComputeRates(std::span<const double> genuine, std::span<const double> impostor,
                      double threshold);

struct RateReport {
  double fpr = 0.0;            // at the operating threshold
  double fnr = 0.0;            // at the operating threshold
  double eer = 0.0;
  double eer_threshold = 0.0;
  std::size_t genuine_count = 0;
  std::size_t impostor_count = 0;
};

/// Equal error rate by sweeping midpoints between adjacent distinct pooled
/// scores (plus sentinels beyond both ends) and interpolating linearly where
/// FPR - FNR changes sign. Scores may be -inf (rejected at every threshold).
/// fpr/fnr of the result are left at zero; callers fill in an operating
/// point. Throws Error(kEmptyScoreSet) if either side is empty.
RateReport ComputeEer(std::span<const double> genuine, std::span<const double> impostor);

}  // namespace tapmein
