#pragma once

#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>

#include "tapmein/authflow.hpp"
#include "tapmein/gateway/json_io.hpp"
#include "tapmein/gateway/profile_store.hpp"

namespace tapmein::gateway {

enum class ApiErrorCode { kBadRequest, kNotFound, kConflict, kInvalidSample, kInsufficientEnrollment };

std::string_view ApiErrorName(ApiErrorCode code);
int HttpStatus(ApiErrorCode code);

struct ApiResponse {
  int status = 200;
  json body;
};

/// Transport-independent request handlers. Safe for concurrent use; at most
/// one enrollment per user id runs at a time, a second one gets a conflict.
class AuthService {
 public:
  AuthService(ProfileStore store, PopulationStats stats, TrainingConfig cfg);

  ApiResponse Enroll(const std::string& user_id, std::string_view body);
  ApiResponse Verify(const std::string& user_id, std::string_view body);
  ApiResponse ListUsers() const;
  ApiResponse DeleteUser(const std::string& user_id);
  ApiResponse Health() const;

  const ProfileStore& store() const { return store_; }

 private:
  bool BeginExclusive(const std::string& user_id);
  void EndExclusive(const std::string& user_id);

  ProfileStore store_;
  PopulationStats stats_;
  TrainingConfig cfg_;
  std::mutex mu_;
  std::set<std::string> busy_;
};

/// HTTP binding of AuthService. Start() binds and serves on a background
/// thread; port 0 picks a free port.
class HttpServer {
 public:
  explicit HttpServer(AuthService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Returns the bound port. Throws Error(kIo) when binding fails.
  int Start(const std::string& host, int port);
  // Blocks until Stop() is called from elsewhere.
  void ListenBlocking(const std::string& host, int port);
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tapmein::gateway
