#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tapmein {

inline constexpr std::size_t kMinTaps = 4;
inline constexpr std::size_t kMaxTaps = 64;

enum class Condition { kUnlabeled, kSitting, kWalking };

// Genuine samples plus the four impostor kinds used by the evaluation bench.
enum class SampleKind { kGenuine, kRandom, kAttack1, kAttack2, kAttack3 };

/// One touch-down/touch-up event pair. Timestamps in milliseconds.
struct RawTap {
  double down_ts = 0.0;
  double up_ts = 0.0;
  double pressure = 0.0;
  double size = 0.0;

  bool operator==(const RawTap&) const = default;
};

struct SequenceMeta {
  std::string user_id;
  Condition condition = Condition::kUnlabeled;
  SampleKind kind = SampleKind::kGenuine;
  std::optional<std::string> attacker_id;

  bool operator==(const SequenceMeta&) const = default;
};

struct RawTapSequence {
  std::vector<RawTap> taps;
  SequenceMeta meta;

  std::size_t length() const { return taps.size(); }
  bool operator==(const RawTapSequence&) const = default;
};

/// The four per-tap timeseries. up_durations has one fewer entry than the
/// others because the last tap has no following gap.
struct ProcessedSequence {
  std::vector<double> pressures;
  std::vector<double> sizes;
  std::vector<double> down_durations;
  std::vector<double> up_durations;

  std::size_t length() const { return pressures.size(); }
  bool operator==(const ProcessedSequence&) const = default;
};

// Throws Error(kBadLength | kNonMonotonicTimestamps | kOutOfRangeChannel).
const RawTapSequence& ValidateSequence(const RawTapSequence& seq);

// Non-throwing form of ValidateSequence.
bool IsValidSequence(const RawTapSequence& seq);

ProcessedSequence ExtractDurations(const RawTapSequence& seq);

// Rebuilds timestamps starting at zero. Throws kInvalidArgument on
// inconsistent array lengths.
RawTapSequence Materialize(const ProcessedSequence& processed);

std::string_view ConditionName(Condition c);
std::string_view SampleKindName(SampleKind k);
std::optional<Condition> ParseCondition(std::string_view name);
std::optional<SampleKind> ParseSampleKind(std::string_view name);

}  // namespace tapmein
