#include "tapmein/tap.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "tapmein/error.hpp"

namespace tapmein {

namespace {

bool InUnitRange(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

std::string TapLocus(std::size_t i) { return "tap " + std::to_string(i); }

}  // namespace

const RawTapSequence& ValidateSequence(const RawTapSequence& seq) {
  const std::size_t l = seq.taps.size();
  if (l < kMinTaps || l > kMaxTaps) {
    throw Error(ErrorCode::kBadLength,
                "tap count " + std::to_string(l) + " outside [" +
                    std::to_string(kMinTaps) + ", " + std::to_string(kMaxTaps) +
                    "]");
  }
  for (std::size_t i = 0; i < l; ++i) {
    const RawTap& tap = seq.taps[i];
    if (!std::isfinite(tap.down_ts) || !std::isfinite(tap.up_ts) ||
        tap.up_ts < tap.down_ts) {
      throw Error(ErrorCode::kNonMonotonicTimestamps,
                  TapLocus(i) + ": up_ts precedes down_ts");
    }
    if (i + 1 < l && seq.taps[i + 1].down_ts < tap.up_ts) {
      throw Error(ErrorCode::kNonMonotonicTimestamps,
                  TapLocus(i + 1) + ": overlaps previous tap");
    }
    if (!InUnitRange(tap.pressure)) {
      throw Error(ErrorCode::kOutOfRangeChannel,
                  TapLocus(i) + ": pressure outside [0, 1]");
    }
    if (!InUnitRange(tap.size)) {
      throw Error(ErrorCode::kOutOfRangeChannel,
                  TapLocus(i) + ": size outside [0, 1]");
    }
  }
  return seq;
}

bool IsValidSequence(const RawTapSequence& seq) {
  try {
    ValidateSequence(seq);
    return true;
  } catch (const Error&) {
    return false;
  }
}

ProcessedSequence ExtractDurations(const RawTapSequence& seq) {
  const std::size_t l = seq.taps.size();
  ProcessedSequence out;
  out.pressures.reserve(l);
  out.sizes.reserve(l);
  out.down_durations.reserve(l);
  out.up_durations.reserve(l > 0 ? l - 1 : 0);
  for (std::size_t i = 0; i < l; ++i) {
    const RawTap& tap = seq.taps[i];
    out.pressures.push_back(tap.pressure);
    out.sizes.push_back(tap.size);
    out.down_durations.push_back(tap.up_ts - tap.down_ts);
    if (i + 1 < l) out.up_durations.push_back(seq.taps[i + 1].down_ts - tap.up_ts);
  }
  return out;
}

RawTapSequence Materialize(const ProcessedSequence& processed) {
  const std::size_t l = processed.pressures.size();
  if (l == 0 || processed.sizes.size() != l ||
      processed.down_durations.size() != l ||
      processed.up_durations.size() + 1 != l) {
    throw Error(ErrorCode::kInvalidArgument,
                "processed sequence arrays have inconsistent lengths");
  }
  RawTapSequence seq;
  seq.taps.reserve(l);
  double t = 0.0;
  for (std::size_t i = 0; i < l; ++i) {
    RawTap tap;
    tap.down_ts = t;
    tap.up_ts = t + processed.down_durations[i];
    tap.pressure = processed.pressures[i];
    tap.size = processed.sizes[i];
    seq.taps.push_back(tap);
    if (i + 1 < l) t = tap.up_ts + processed.up_durations[i];
  }
  return seq;
}

namespace {

constexpr std::array<std::pair<Condition, std::string_view>, 3> kConditions{{
    {Condition::kUnlabeled, "unlabeled"},
    {Condition::kSitting, "sitting"},
    {Condition::kWalking, "walking"},
}};

constexpr std::array<std::pair<SampleKind, std::string_view>, 5> kKinds{{
    {SampleKind::kGenuine, "genuine"},
    {SampleKind::kRandom, "random"},
    {SampleKind::kAttack1, "attack1"},
    {SampleKind::kAttack2, "attack2"},
    {SampleKind::kAttack3, "attack3"},
}};

}  // namespace

std::string_view ConditionName(Condition c) {
  for (const auto& [value, name] : kConditions)
    if (value == c) return name;
  return "unlabeled";
}

std::string_view SampleKindName(SampleKind k) {
  for (const auto& [value, name] : kKinds)
    if (value == k) return name;
  return "genuine";
}

std::optional<Condition> ParseCondition(std::string_view name) {
  for (const auto& [value, n] : kConditions)
    if (n == name) return value;
  return std::nullopt;
}

std::optional<SampleKind> ParseSampleKind(std::string_view name) {
  for (const auto& [value, n] : kKinds)
    if (n == name) return value;
  return std::nullopt;
}

}  // namespace tapmein
