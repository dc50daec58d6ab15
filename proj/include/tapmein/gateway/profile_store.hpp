#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tapmein/authflow.hpp"

namespace tapmein::gateway {

// [a-z0-9_-]{1,64}
bool IsValidUserId(std::string_view id);

// Serialized profile document with its integrity checksum. The text is the
// exact byte content written to disk.
std::string EncodeProfileRecord(const UserProfile& profile);

// Throws Error(kCorruptRecord) when the text is not a well-formed record or
// the checksum does not verify.
UserProfile DecodeProfileRecord(std::string_view text);

/// One profile document per user id under a root directory. Writes go to a
/// temporary file that is renamed into place, so a profile is either fully
/// present or absent.
class ProfileStore {
 public:
  explicit ProfileStore(std::filesystem::path root);

  // Stamps created_at when empty. Throws kInvalidArgument for bad ids, kIo.
  void Save(const UserProfile& profile);
  // Throws kNotFound, kCorruptRecord, kInvalidArgument.
  UserProfile Load(const std::string& user_id) const;
  bool Exists(const std::string& user_id) const;
  // Returns false when no profile existed.
  bool Remove(const std::string& user_id);
  std::vector<std::string> List() const;

  std::filesystem::path PathFor(const std::string& user_id) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

}  // namespace tapmein::gateway
