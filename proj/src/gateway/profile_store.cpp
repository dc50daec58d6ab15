#include "tapmein/gateway/profile_store.hpp"

#include <openssl/sha.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "tapmein/error.hpp"
#include "tapmein/gateway/json_io.hpp"

namespace tapmein::gateway {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSuffix = ".profile.json";

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
  std::string hex;
  hex.reserve(2 * SHA256_DIGEST_LENGTH);
  char buf[3];
  for (unsigned char b : digest) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    hex += buf;
  }
  return hex;
}

std::string UtcNow() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void CheckUserId(const std::string& id) {
  if (!IsValidUserId(id)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid user id '" + id + "'");
  }
}

[[noreturn]] void Corrupt(const std::string& why) {
  throw Error(ErrorCode::kCorruptRecord, "corrupt profile record: " + why);
}

}  // namespace

bool IsValidUserId(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

// Compact single-line JSON; the checksum covers the compact dump of the
// "profile" member.
std::string EncodeProfileRecord(const UserProfile& profile) {
  const json body = ProfileToJson(profile);
  const std::string body_text = body.dump();
  const json record = {{"schema_version", kSchemaVersion},
                       {"checksum", Sha256Hex(body_text)},
                       {"profile", body}};
  return record.dump();
}

UserProfile DecodeProfileRecord(std::string_view text) {
  json record;
  try {
    record = json::parse(text);
  } catch (const json::parse_error&) {
    Corrupt("not valid JSON");
  }
  // Re-encoding must reproduce the stored bytes exactly; this catches edits
  // that parse to the same value (e.g. exponent case).
  if (record.dump() != text) Corrupt("not in canonical form");
  if (!record.is_object() || !record.contains("profile") || !record.contains("checksum") ||
      !record["checksum"].is_string()) {
    Corrupt("missing checksum or profile");
  }
  if (record.value("schema_version", json()) != kSchemaVersion) {
    Corrupt("unsupported schema_version");
  }
  if (Sha256Hex(record["profile"].dump()) != record["checksum"].get<std::string>()) {
    Corrupt("checksum mismatch");
  }
  try {
    return ProfileFromJson(record["profile"]);
  } catch (const Error& e) {
    Corrupt(e.what());
  }
}

ProfileStore::ProfileStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create store " + root_.string());
}

fs::path ProfileStore::PathFor(const std::string& user_id) const {
  CheckUserId(user_id);
  return root_ / (user_id + kSuffix);
}

void ProfileStore::Save(const UserProfile& profile) {
  UserProfile stamped = profile;
  if (stamped.created_at.empty()) stamped.created_at = UtcNow();
  const fs::path target = PathFor(stamped.user_id);
  const std::string text = EncodeProfileRecord(stamped) + "\n";

  std::ostringstream tmp_name;
  tmp_name << "." << stamped.user_id << ".tmp." << std::this_thread::get_id();
  const fs::path tmp = root_ / tmp_name.str();
  {
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size() &&
                    std::fflush(f) == 0 && ::fsync(fileno(f)) == 0;
    std::fclose(f);
    if (!ok) {
      fs::remove(tmp);
      throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::kIo, "cannot install " + target.string());
  }
}

UserProfile ProfileStore::Load(const std::string& user_id) const {
  const fs::path path = PathFor(user_id);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "no profile for user '" + user_id + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return DecodeProfileRecord(text);
}

bool ProfileStore::Exists(const std::string& user_id) const {
  return fs::exists(PathFor(user_id));
}

bool ProfileStore::Remove(const std::string& user_id) {
  std::error_code ec;
  return fs::remove(PathFor(user_id), ec);
}

std::vector<std::string> ProfileStore::List() const {
  std::vector<std::string> ids;
  const std::string suffix = kSuffix;
  for (const auto& entry : fs::directory_iterator(root_)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      const std::string id = name.substr(0, name.size() - suffix.size());
      if (IsValidUserId(id)) ids.push_back(id);
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace tapmein::gateway
