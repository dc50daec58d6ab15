#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "tapmein/authflow.hpp"
#include "tapmein/eval/dataset.hpp"
#include "tapmein/eval/protocol.hpp"
#include "tapmein/negatives.hpp"

namespace tapmein::gateway {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Every *FromJson throws Error(kSchemaViolation) with a message naming the
// offending element, e.g. "users[0].samples[2].taps[1].up_ts: missing".

json TapsToJson(const std::vector<RawTap>& taps);
std::vector<RawTap> TapsFromJson(const json& j, const std::string& locus);

json PopulationStatsToJson(const PopulationStats& stats);
PopulationStats PopulationStatsFromJson(const json& j);

json DatasetToJson(const LabeledDataset& ds);
LabeledDataset DatasetFromJson(const json& j);

/// Sample list as carried by enroll requests: {"samples": [{"taps": [...]}, ...]}.
std::vector<RawTapSequence> SamplesFromJson(const json& j);
/// Single candidate as carried by verify requests: {"taps": [...]}.
RawTapSequence CandidateFromJson(const json& j);

json ProfileToJson(const UserProfile& profile);
UserProfile ProfileFromJson(const json& j);

json DecisionToJson(const Decision& d);

json ReportToJson(const ProtocolReport& report);
// Flat table: one row per (user | aggregate, scope, key).
std::string ReportToCsv(const ProtocolReport& report);

json SweepToJson(const std::vector<SweepRow>& rows);
json RankingToJson(const FeatureRanking& ranking);

// File helpers. ParseJsonFile reports parse errors with line/column.
json ParseJsonFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

LabeledDataset ImportDataset(const std::filesystem::path& path);
void ExportDataset(const LabeledDataset& ds, const std::filesystem::path& path);

}  // namespace tapmein::gateway
