#include "tapmein/eval/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tapmein/error.hpp"

namespace tapmein {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Count of sorted values >= t.
std::size_t CountAtLeast(const std::vector<double>& sorted, double t) {
  return static_cast<std::size_t>(sorted.end() -
                                  std::lower_bound(sorted.begin(), sorted.end(), t));
}

double Midpoint(double a, double b) {
  if (std::isinf(a)) return b - 1.0;
  return a + (b - a) / 2.0;
}

void CheckScores(std::span<const double> s) {
  for (double v : s) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw Error(ErrorCode::kInvalidArgument, "scores must be finite or -inf");
    }
  }
}

}  // namespace

RatePair ComputeRates(std::span<const double> genuine, std::span<const double> impostor,
                      double threshold) {
  std::size_t false_accepts = 0, false_rejects = 0;
  for (double s : impostor)
    if (s >= threshold) ++false_accepts;
  for (double s : genuine)
    if (s < threshold) ++false_rejects;
  RatePair r;
  if (!impostor.empty()) r.fpr = static_cast<double>(false_accepts) / impostor.size();
  if (!genuine.empty()) r.fnr = static_cast<double>(false_rejects) / genuine.size();
  return r;
}

RateReport ComputeEer(std::span<const double> genuine, std::span<const double> impostor) {
  if (genuine.empty() || impostor.empty()) {
    throw Error(ErrorCode::kEmptyScoreSet, "EER needs genuine and impostor scores");
  }
  CheckScores(genuine);
  CheckScores(impostor);
  std::vector<double> g(genuine.begin(), genuine.end());
  std::vector<double> imp(impostor.begin(), impostor.end());
  std::sort(g.begin(), g.end());
  std::sort(imp.begin(), imp.end());

  std::vector<double> pooled;
  pooled.reserve(g.size() + imp.size());
  std::merge(g.begin(), g.end(), imp.begin(), imp.end(), std::back_inserter(pooled));
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

  // Rates for a candidate are counted at `probes`, which accept exactly the
  // same scores as the candidate. A midpoint of two adjacent doubles rounds
  // onto one of them, so it cannot be probed directly.
  std::vector<double> thresholds, probes;
  thresholds.reserve(pooled.size() + 1);
  probes.reserve(pooled.size() + 1);
  thresholds.push_back(std::isinf(pooled.front()) ? kNegInf : pooled.front() - 1.0);
  probes.push_back(kNegInf);
  for (std::size_t k = 0; k + 1 < pooled.size(); ++k) {
    thresholds.push_back(Midpoint(pooled[k], pooled[k + 1]));
    probes.push_back(pooled[k + 1]);
  }
  thresholds.push_back(std::isinf(pooled.back()) ? 0.0 : pooled.back() + 1.0);
  probes.push_back(std::numeric_limits<double>::infinity());

  const double ng = static_cast<double>(g.size());
  const double ni = static_cast<double>(imp.size());
  auto rates_at = [&](double t) {
    RatePair r;
    r.fpr = static_cast<double>(CountAtLeast(imp, t)) / ni;
    r.fnr = (ng - static_cast<double>(CountAtLeast(g, t))) / ng;
    return r;
  };

  RateReport report;
  report.genuine_count = g.size();
  report.impostor_count = imp.size();
  RatePair prev = rates_at(probes.front());
  double prev_t = thresholds.front();
  if (prev.fpr - prev.fnr <= 0.0) {
    report.eer = prev.fpr;
    report.eer_threshold = prev_t;
    return report;
  }
  for (std::size_t k = 1; k < thresholds.size(); ++k) {
    const double t = thresholds[k];
    const RatePair cur = rates_at(probes[k]);
    const double d_cur = cur.fpr - cur.fnr;
    if (d_cur <= 0.0) {
      const double d_prev = prev.fpr - prev.fnr;
      const double w = d_cur == 0.0 ? 1.0 : d_prev / (d_prev - d_cur);
      report.eer = prev.fpr + w * (cur.fpr - prev.fpr);
      report.eer_threshold = std::isinf(prev_t) ? t : prev_t + w * (t - prev_t);
      return report;
    }
    prev = cur;
    prev_t = t;
  }
  // Unreachable: the upper sentinel rejects everything (fpr 0, fnr 1).
  report.eer = prev.fpr;
  report.eer_threshold = prev_t;
  return report;
}

}  // namespace tapmein
