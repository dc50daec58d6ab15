#include "tapmein/gateway/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tapmein/error.hpp"
#include "tapmein/features.hpp"

namespace tapmein::gateway {

namespace {

[[noreturn]] void Violation(const std::string& locus, const std::string& what) {
  throw Error(ErrorCode::kSchemaViolation, locus + ": " + what);
}

std::string Join(const std::string& locus, const std::string& key) {
  return locus.empty() ? key : locus + "." + key;
}

std::string Index(const std::string& locus, std::size_t i) {
  return locus + "[" + std::to_string(i) + "]";
}

const json& RequireObject(const json& j, const std::string& locus) {
  if (!j.is_object()) Violation(locus.empty() ? "document" : locus, "expected an object");
  return j;
}

const json& Field(const json& obj, const char* key, const std::string& locus) {
  RequireObject(obj, locus);
  const auto it = obj.find(key);
  if (it == obj.end()) Violation(Join(locus, key), "missing");
  return *it;
}

double Number(const json& obj, const char* key, const std::string& locus) {
  const json& v = Field(obj, key, locus);
  if (!v.is_number()) Violation(Join(locus, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) Violation(Join(locus, key), "expected a finite number");
  return d;
}

std::uint64_t Unsigned(const json& obj, const char* key, const std::string& locus) {
  const json& v = Field(obj, key, locus);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    Violation(Join(locus, key), "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string String(const json& obj, const char* key, const std::string& locus) {
  const json& v = Field(obj, key, locus);
  if (!v.is_string()) Violation(Join(locus, key), "expected a string");
  return v.get<std::string>();
}

bool Bool(const json& obj, const char* key, const std::string& locus) {
  const json& v = Field(obj, key, locus);
  if (!v.is_boolean()) Violation(Join(locus, key), "expected a boolean");
  return v.get<bool>();
}

const json& Array(const json& obj, const char* key, const std::string& locus) {
  const json& v = Field(obj, key, locus);
  if (!v.is_array()) Violation(Join(locus, key), "expected an array");
  return v;
}

std::vector<double> NumberArray(const json& obj, const char* key, const std::string& locus) {
  const json& arr = Array(obj, key, locus);
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) Violation(Index(Join(locus, key), i), "expected a number");
    out.push_back(arr[i].get<double>());
  }
  return out;
}

template <class T>
std::vector<T> IntArray(const json& obj, const char* key, const std::string& locus) {
  const json& arr = Array(obj, key, locus);
  std::vector<T> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number_integer()) Violation(Index(Join(locus, key), i), "expected an integer");
    out.push_back(arr[i].get<T>());
  }
  return out;
}

void CheckSchemaVersion(const json& j) {
  const std::uint64_t v = Unsigned(j, "schema_version", "");
  if (v != kSchemaVersion) {
    Violation("schema_version", "unsupported version " + std::to_string(v));
  }
}

json ChannelToJson(const ChannelStats& c) {
  return {{"min", c.min}, {"max", c.max}, {"mean", c.mean}, {"std", c.std}};
}

ChannelStats ChannelFromJson(const json& j, const std::string& locus) {
  return {Number(j, "min", locus), Number(j, "max", locus), Number(j, "mean", locus),
          Number(j, "std", locus)};
}

json StatsBody(const PopulationStats& s) {
  json j = {{"sample_count", s.sample_count},
            {"pressure", ChannelToJson(s.pressure)},
            {"size", ChannelToJson(s.size)},
            {"down", ChannelToJson(s.down)},
            {"up", ChannelToJson(s.up)}};
  if (!s.provenance.empty()) j["provenance"] = s.provenance;
  return j;
}

PopulationStats StatsFromBody(const json& j, const std::string& locus) {
  PopulationStats s;
  s.sample_count = Unsigned(j, "sample_count", locus);
  s.pressure = ChannelFromJson(Field(j, "pressure", locus), Join(locus, "pressure"));
  s.size = ChannelFromJson(Field(j, "size", locus), Join(locus, "size"));
  s.down = ChannelFromJson(Field(j, "down", locus), Join(locus, "down"));
  s.up = ChannelFromJson(Field(j, "up", locus), Join(locus, "up"));
  if (j.contains("provenance")) s.provenance = String(j, "provenance", locus);
  try {
    CheckPopulationStats(s);
  } catch (const Error& e) {
    Violation(locus.empty() ? "document" : locus, e.what());
  }
  return s;
}

RawTapSequence SampleFromJson(const json& j, const std::string& locus) {
  RawTapSequence s;
  s.taps = TapsFromJson(Field(j, "taps", locus), Join(locus, "taps"));
  return s;
}

json CandidateToJson(const Candidate& c) {
  if (const auto* svm = std::get_if<SvmCandidate>(&c)) {
    return {{"kind", "svm"},
            {"c", svm->c},
            {"gamma", svm->gamma},
            {"kernel", svm->kernel == KernelKind::kRbf ? "rbf" : "linear"}};
  }
  const auto& f = std::get<ForestCandidate>(c);
  return {{"kind", "forest"},
          {"tree_count", f.tree_count},
          {"max_depth", f.max_depth},
          {"min_leaf", f.min_leaf}};
}

KernelKind KernelFromName(const std::string& name, const std::string& locus) {
  if (name == "rbf") return KernelKind::kRbf;
  if (name == "linear") return KernelKind::kLinear;
  Violation(locus, "unknown kernel '" + name + "'");
}

Candidate CandidateFromJson(const json& j, const std::string& locus) {
  const std::string kind = String(j, "kind", locus);
  if (kind == "svm") {
    return SvmCandidate{Number(j, "c", locus), Number(j, "gamma", locus),
                        KernelFromName(String(j, "kernel", locus), Join(locus, "kernel"))};
  }
  if (kind == "forest") {
    return ForestCandidate{Unsigned(j, "tree_count", locus), Unsigned(j, "max_depth", locus),
                           Unsigned(j, "min_leaf", locus)};
  }
  Violation(Join(locus, "kind"), "unknown classifier '" + kind + "'");
}

json ModelToJson(const Model& model) {
  if (const auto* svm = std::get_if<SvmModel>(&model)) {
    return {{"kind", "svm"},
            {"kernel", svm->kernel.kind == KernelKind::kRbf ? "rbf" : "linear"},
            {"gamma", svm->kernel.gamma},
            {"c", svm->c},
            {"bias", svm->bias},
            {"converged", svm->converged},
            {"support_vectors", svm->support_vectors},
            {"dual_coef", svm->dual_coef}};
  }
  const auto& forest = std::get<ForestModel>(model);
  json trees = json::array();
  for (const DecisionTree& t : forest.trees) {
    json node = {{"feature", json::array()}, {"threshold", json::array()},
                 {"left", json::array()},    {"right", json::array()},
                 {"genuine", json::array()}, {"impostor", json::array()}};
    for (const TreeNode& n : t.nodes) {
      node["feature"].push_back(n.feature);
      node["threshold"].push_back(n.threshold);
      node["left"].push_back(n.left);
      node["right"].push_back(n.right);
      node["genuine"].push_back(n.genuine);
      node["impostor"].push_back(n.impostor);
    }
    trees.push_back(std::move(node));
  }
  return {{"kind", "forest"},
          {"feature_count", forest.feature_count},
          {"importance", forest.importance},
          {"trees", std::move(trees)}};
}

Model ModelFromJson(const json& j, const std::string& locus) {
  const std::string kind = String(j, "kind", locus);
  if (kind == "svm") {
    SvmModel m;
    m.kernel.kind = KernelFromName(String(j, "kernel", locus), Join(locus, "kernel"));
    m.kernel.gamma = Number(j, "gamma", locus);
    m.c = Number(j, "c", locus);
    m.bias = Number(j, "bias", locus);
    m.converged = Bool(j, "converged", locus);
    m.dual_coef = NumberArray(j, "dual_coef", locus);
    const json& svs = Array(j, "support_vectors", locus);
    const std::string sv_locus = Join(locus, "support_vectors");
    for (std::size_t i = 0; i < svs.size(); ++i) {
      if (!svs[i].is_array()) Violation(Index(sv_locus, i), "expected an array");
      std::vector<double> row;
      for (const json& v : svs[i]) {
        if (!v.is_number()) Violation(Index(sv_locus, i), "expected numbers");
        row.push_back(v.get<double>());
      }
      if (!m.support_vectors.empty() && row.size() != m.support_vectors.front().size()) {
        Violation(Index(sv_locus, i), "ragged support vector");
      }
      m.support_vectors.push_back(std::move(row));
    }
    if (m.support_vectors.empty() || m.support_vectors.size() != m.dual_coef.size()) {
      Violation(sv_locus, "support vectors and dual coefficients disagree");
    }
    return m;
  }
  if (kind == "forest") {
    ForestModel m;
    m.feature_count = Unsigned(j, "feature_count", locus);
    m.importance = NumberArray(j, "importance", locus);
    const json& trees = Array(j, "trees", locus);
    for (std::size_t t = 0; t < trees.size(); ++t) {
      const std::string tl = Index(Join(locus, "trees"), t);
      const auto feature = IntArray<int>(trees[t], "feature", tl);
      const auto threshold = NumberArray(trees[t], "threshold", tl);
      const auto left = IntArray<int>(trees[t], "left", tl);
      const auto right = IntArray<int>(trees[t], "right", tl);
      const auto genuine = IntArray<std::uint32_t>(trees[t], "genuine", tl);
      const auto impostor = IntArray<std::uint32_t>(trees[t], "impostor", tl);
      const std::size_t n = feature.size();
      if (n == 0 || threshold.size() != n || left.size() != n || right.size() != n ||
          genuine.size() != n || impostor.size() != n) {
        Violation(tl, "node arrays disagree in length");
      }
      DecisionTree tree;
      for (std::size_t k = 0; k < n; ++k) {
        TreeNode node{feature[k], threshold[k], left[k], right[k], genuine[k], impostor[k]};
        if (!node.is_leaf()) {
          const auto in_range = [n, k](int c) {
            return c > static_cast<int>(k) && c < static_cast<int>(n);
          };
          if (static_cast<std::size_t>(node.feature) >= m.feature_count ||
              !in_range(node.left) || !in_range(node.right)) {
            Violation(tl, "node " + std::to_string(k) + " references out of range");
          }
        }
        tree.nodes.push_back(node);
      }
      m.trees.push_back(std::move(tree));
    }
    if (m.importance.size() != m.feature_count) Violation(Join(locus, "importance"), "wrong size");
    return m;
  }
  Violation(Join(locus, "kind"), "unknown model kind '" + kind + "'");
}

json RateToJson(const RateReport& r) {
  return {{"fpr", r.fpr},
          {"fnr", r.fnr},
          {"eer", r.eer},
          {"eer_threshold", r.eer_threshold},
          {"genuine_count", r.genuine_count},
          {"impostor_count", r.impostor_count}};
}

json RateMapToJson(const std::map<std::string, RateReport>& m) {
  json j = json::object();
  for (const auto& [k, r] : m) j[k] = RateToJson(r);
  return j;
}

void CsvRow(std::ostringstream& out, const std::string& who, const std::string& scope,
            const std::string& key, const RateReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%s,%s,%.17g,%.17g,%.17g,%.17g,%zu,%zu\n", who.c_str(),
                scope.c_str(), key.c_str(), r.fpr, r.fnr, r.eer, r.eer_threshold,
                r.genuine_count, r.impostor_count);
  out << buf;
}

}  // namespace

json TapsToJson(const std::vector<RawTap>& taps) {
  json arr = json::array();
  for (const RawTap& t : taps) {
    arr.push_back({{"down_ts", t.down_ts}, {"up_ts", t.up_ts},
                   {"pressure", t.pressure}, {"size", t.size}});
  }
  return arr;
}

std::vector<RawTap> TapsFromJson(const json& j, const std::string& locus) {
  if (!j.is_array()) Violation(locus, "expected an array");
  std::vector<RawTap> taps;
  taps.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string tl = Index(locus, i);
    taps.push_back({Number(j[i], "down_ts", tl), Number(j[i], "up_ts", tl),
                    Number(j[i], "pressure", tl), Number(j[i], "size", tl)});
  }
  return taps;
}

json PopulationStatsToJson(const PopulationStats& stats) {
  json j = StatsBody(stats);
  j["schema_version"] = kSchemaVersion;
  return j;
}

PopulationStats PopulationStatsFromJson(const json& j) {
  RequireObject(j, "");
  CheckSchemaVersion(j);
  return StatsFromBody(j, "");
}

json DatasetToJson(const LabeledDataset& ds) {
  json users = json::array();
  for (const UserSamples& u : ds.users) {
    json samples = json::array();
    for (const RawTapSequence& s : u.samples) {
      json js = {{"kind", SampleKindName(s.meta.kind)}, {"taps", TapsToJson(s.taps)}};
      if (s.meta.condition != Condition::kUnlabeled) js["condition"] = ConditionName(s.meta.condition);
      if (s.meta.attacker_id) js["attacker_id"] = *s.meta.attacker_id;
      samples.push_back(std::move(js));
    }
    users.push_back({{"user_id", u.user_id}, {"samples", std::move(samples)}});
  }
  return {{"schema_version", kSchemaVersion}, {"users", std::move(users)}};
}

LabeledDataset DatasetFromJson(const json& j) {
  RequireObject(j, "");
  CheckSchemaVersion(j);
  LabeledDataset ds;
  const json& users = Array(j, "users", "");
  for (std::size_t u = 0; u < users.size(); ++u) {
    const std::string ul = Index("users", u);
    UserSamples user;
    user.user_id = String(users[u], "user_id", ul);
    const json& samples = Array(users[u], "samples", ul);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const std::string sl = Index(Join(ul, "samples"), k);
      RawTapSequence s = SampleFromJson(samples[k], sl);
      s.meta.user_id = user.user_id;
      const std::string kind = String(samples[k], "kind", sl);
      const auto parsed_kind = ParseSampleKind(kind);
      if (!parsed_kind) Violation(Join(sl, "kind"), "unknown kind '" + kind + "'");
      s.meta.kind = *parsed_kind;
      if (samples[k].contains("condition")) {
        const std::string cond = String(samples[k], "condition", sl);
        const auto parsed = ParseCondition(cond);
        if (!parsed || *parsed == Condition::kUnlabeled) {
          Violation(Join(sl, "condition"), "expected \"sitting\" or \"walking\", got '" + cond + "'");
        }
        s.meta.condition = *parsed;
      }
      if (samples[k].contains("attacker_id")) {
        s.meta.attacker_id = String(samples[k], "attacker_id", sl);
      }
      try {
        ValidateSequence(s);
      } catch (const Error& e) {
        Violation(Join(sl, "taps"), e.what());
      }
      user.samples.push_back(std::move(s));
    }
    ds.users.push_back(std::move(user));
  }
  return ds;
}

std::vector<RawTapSequence> SamplesFromJson(const json& j) {
  const json& arr = Array(j, "samples", "");
  std::vector<RawTapSequence> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(SampleFromJson(arr[i], Index("samples", i)));
  return out;
}

RawTapSequence CandidateFromJson(const json& j) { return SampleFromJson(j, ""); }

json ProfileToJson(const UserProfile& p) {
  return {{"user_id", p.user_id},
          {"length", p.length},
          {"created_at", p.created_at},
          {"threshold", p.threshold},
          {"feature_layout_version", kFeatureLayoutVersion},
          {"population", StatsBody(p.population)},
          {"standardizer", {{"mean", p.standardizer.mean()}, {"scale", p.standardizer.scale()}}},
          {"selected", CandidateToJson(p.selected)},
          {"model", ModelToJson(p.model)}};
}

UserProfile ProfileFromJson(const json& j) {
  RequireObject(j, "profile");
  UserProfile p;
  p.user_id = String(j, "user_id", "profile");
  p.length = Unsigned(j, "length", "profile");
  if (p.length < kMinTaps || p.length > kMaxTaps) Violation("profile.length", "out of range");
  p.created_at = String(j, "created_at", "profile");
  p.threshold = Number(j, "threshold", "profile");
  if (Unsigned(j, "feature_layout_version", "profile") !=
      static_cast<std::uint64_t>(kFeatureLayoutVersion)) {
    Violation("profile.feature_layout_version", "unsupported layout");
  }
  p.population = StatsFromBody(Field(j, "population", "profile"), "profile.population");
  const json& st = Field(j, "standardizer", "profile");
  try {
    p.standardizer = Standardizer(NumberArray(st, "mean", "profile.standardizer"),
                                  NumberArray(st, "scale", "profile.standardizer"));
  } catch (const Error& e) {
    Violation("profile.standardizer", e.what());
  }
  if (p.standardizer.dimension() != FeatureCount(p.length)) {
    Violation("profile.standardizer", "dimension does not match length");
  }
  p.selected = CandidateFromJson(Field(j, "selected", "profile"), "profile.selected");
  p.model = ModelFromJson(Field(j, "model", "profile"), "profile.model");
  const std::size_t dim = std::visit(
      [](const auto& m) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, SvmModel>) {
          return m.dimension();
        } else {
          return m.feature_count;
        }
      },
      p.model);
  if (dim != p.standardizer.dimension()) Violation("profile.model", "dimension mismatch");
  return p;
}

json DecisionToJson(const Decision& d) {
  json j = {{"accepted", d.accepted},
            {"reason", DecisionReasonName(d.reason)},
            {"threshold", d.threshold}};
  if (d.score) j["score"] = *d.score;
  return j;
}

json ReportToJson(const ProtocolReport& report) {
  json users = json::array();
  for (const UserReport& u : report.users) {
    users.push_back({{"user_id", u.user_id},
                     {"length", u.length},
                     {"overall", RateToJson(u.overall)},
                     {"attacks", RateMapToJson(u.attacks)},
                     {"conditions", RateMapToJson(u.conditions)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"config",
           {{"classifier", ClassifierKindName(report.classifier)},
            {"n", report.n},
            {"negative_multiplier", report.negative_multiplier},
            {"repetitions", report.repetitions},
            {"master_seed", report.master_seed}}},
          {"aggregate",
           {{"overall", RateToJson(report.aggregate.overall)},
            {"attacks", RateMapToJson(report.aggregate.attacks)},
            {"conditions", RateMapToJson(report.aggregate.conditions)},
            {"balanced_accuracy", report.aggregate.balanced_accuracy}}},
          {"users", std::move(users)}};
}

std::string ReportToCsv(const ProtocolReport& report) {
  std::ostringstream out;
  out << "who,scope,key,fpr,fnr,eer,eer_threshold,genuine_count,impostor_count\n";
  auto emit = [&](const std::string& who, const RateReport& overall,
                  const std::map<std::string, RateReport>& attacks,
                  const std::map<std::string, RateReport>& conditions) {
    CsvRow(out, who, "overall", "all", overall);
    for (const auto& [k, r] : attacks) CsvRow(out, who, "attack", k, r);
    for (const auto& [k, r] : conditions) CsvRow(out, who, "condition", k, r);
  };
  emit("aggregate", report.aggregate.overall, report.aggregate.attacks,
       report.aggregate.conditions);
  for (const UserReport& u : report.users) emit(u.user_id, u.overall, u.attacks, u.conditions);
  return out.str();
}

json SweepToJson(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const SweepRow& r : rows) {
    arr.push_back({{"classifier", ClassifierKindName(r.classifier)}, {"n", r.n},
                   {"mean_eer", r.mean_eer}});
  }
  return {{"schema_version", kSchemaVersion}, {"rows", std::move(arr)}};
}

json RankingToJson(const FeatureRanking& ranking) {
  json arr = json::array();
  for (const RankedFeature& f : ranking.top) {
    arr.push_back({{"name", f.name}, {"importance", f.importance}});
  }
  return {{"schema_version", kSchemaVersion}, {"runs", ranking.runs}, {"features", std::move(arr)}};
}

json ParseJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line/column locus.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::kSchemaViolation, path.string() + ":" + std::to_string(line) + ":" +
                                                 std::to_string(col) + ": invalid JSON");
  }
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

LabeledDataset ImportDataset(const std::filesystem::path& path) {
  return DatasetFromJson(ParseJsonFile(path));
}

void ExportDataset(const LabeledDataset& ds, const std::filesystem::path& path) {
  WriteTextFile(path, DatasetToJson(ds).dump(1) + "\n");
}

}  // namespace tapmein::gateway
