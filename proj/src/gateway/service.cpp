#include "tapmein/gateway/service.hpp"

#include <thread>

#include "httplib.h"
#include "tapmein/error.hpp"

namespace tapmein::gateway {

namespace {

ApiResponse Fail(ApiErrorCode code, const std::string& message) {
  return {HttpStatus(code), {{"error", {{"code", ApiErrorName(code)}, {"message", message}}}}};
}

// FNV-1a; stable across standard libraries, unlike std::hash.
std::uint64_t StableHash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::optional<json> ParseBody(std::string_view body) {
  json j = json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

}  // namespace

std::string_view ApiErrorName(ApiErrorCode code) {
  switch (code) {
    case ApiErrorCode::kBadRequest: return "bad_request";
    case ApiErrorCode::kNotFound: return "not_found";
    case ApiErrorCode::kConflict: return "conflict";
    case ApiErrorCode::kInvalidSample: return "invalid_sample";
    case ApiErrorCode::kInsufficientEnrollment: return "insufficient_enrollment";
  }
  return "bad_request";
}

int HttpStatus(ApiErrorCode code) {
  switch (code) {
    case ApiErrorCode::kBadRequest: return 400;
    case ApiErrorCode::kNotFound: return 404;
    case ApiErrorCode::kConflict: return 409;
    case ApiErrorCode::kInvalidSample: return 400;
    case ApiErrorCode::kInsufficientEnrollment: return 400;
  }
  return 400;
}

AuthService::AuthService(ProfileStore store, PopulationStats stats, TrainingConfig cfg)
    : store_(std::move(store)), stats_(std::move(stats)), cfg_(std::move(cfg)) {
  CheckPopulationStats(stats_);
  cfg_.Check();
}

bool AuthService::BeginExclusive(const std::string& user_id) {
  std::lock_guard lock(mu_);
  return busy_.insert(user_id).second;
}

void AuthService::EndExclusive(const std::string& user_id) {
  std::lock_guard lock(mu_);
  busy_.erase(user_id);
}

ApiResponse AuthService::Enroll(const std::string& user_id, std::string_view body) {
  if (!IsValidUserId(user_id)) return Fail(ApiErrorCode::kBadRequest, "invalid user id");
  const auto parsed = ParseBody(body);
  if (!parsed) return Fail(ApiErrorCode::kBadRequest, "body is not valid JSON");

  std::vector<RawTapSequence> samples;
  try {
    samples = SamplesFromJson(*parsed);
  } catch (const Error& e) {
    return Fail(ApiErrorCode::kBadRequest, e.what());
  }

  if (!BeginExclusive(user_id)) {
    return Fail(ApiErrorCode::kConflict, "enrollment already in progress for " + user_id);
  }
  struct Release {
    AuthService* self;
    const std::string& id;
    ~Release() { self->EndExclusive(id); }
  } release{this, user_id};

  if (store_.Exists(user_id)) {
    return Fail(ApiErrorCode::kConflict, "user " + user_id + " is already enrolled");
  }
  try {
    TrainingConfig cfg = cfg_;
    cfg.master_seed = StreamSeed(cfg_.master_seed, {StableHash(user_id)});
    const UserProfile profile = tapmein::Enroll(user_id, samples, stats_, cfg);
    store_.Save(profile);
    return {201, {{"user_id", user_id}, {"length", profile.length}, {"threshold", profile.threshold}}};
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::kInsufficientEnrollment:
        return Fail(ApiErrorCode::kInsufficientEnrollment, e.what());
      case ErrorCode::kBadLength:
      case ErrorCode::kNonMonotonicTimestamps:
      case ErrorCode::kOutOfRangeChannel:
      case ErrorCode::kInconsistentLength:
        return Fail(ApiErrorCode::kInvalidSample, e.what());
      default:
        return Fail(ApiErrorCode::kBadRequest, e.what());
    }
  }
}

ApiResponse AuthService::Verify(const std::string& user_id, std::string_view body) {
  if (!IsValidUserId(user_id)) return Fail(ApiErrorCode::kBadRequest, "invalid user id");
  const auto parsed = ParseBody(body);
  if (!parsed) return Fail(ApiErrorCode::kBadRequest, "body is not valid JSON");
  RawTapSequence candidate;
  try {
    candidate = CandidateFromJson(*parsed);
  } catch (const Error& e) {
    return Fail(ApiErrorCode::kBadRequest, e.what());
  }
  UserProfile profile;
  try {
    profile = store_.Load(user_id);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNotFound) return Fail(ApiErrorCode::kNotFound, e.what());
    // Stored record unusable; the client must delete and re-enroll.
    return Fail(ApiErrorCode::kConflict, e.what());
  }
  return {200, DecisionToJson(tapmein::Verify(profile, candidate))};
}

ApiResponse AuthService::ListUsers() const {
  return {200, {{"users", store_.List()}}};
}

ApiResponse AuthService::DeleteUser(const std::string& user_id) {
  if (!IsValidUserId(user_id)) return Fail(ApiErrorCode::kBadRequest, "invalid user id");
  if (!BeginExclusive(user_id)) {
    return Fail(ApiErrorCode::kConflict, "enrollment in progress for " + user_id);
  }
  const bool removed = store_.Remove(user_id);
  EndExclusive(user_id);
  if (!removed) return Fail(ApiErrorCode::kNotFound, "no profile for user '" + user_id + "'");
  return {204, json()};
}

ApiResponse AuthService::Health() const { return {200, {{"status", "ok"}}}; }

struct HttpServer::Impl {
  AuthService& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(AuthService& s) : service(s) {
    auto reply = [](httplib::Response& res, const ApiResponse& api) {
      res.status = api.status;
      if (api.status != 204) res.set_content(api.body.dump(), "application/json");
    };
    server.Post(R"(/api/users/([^/]+)/enroll)",
                [this, reply](const httplib::Request& req, httplib::Response& res) {
                  reply(res, service.Enroll(req.matches[1], req.body));
                });
    server.Post(R"(/api/users/([^/]+)/verify)",
                [this, reply](const httplib::Request& req, httplib::Response& res) {
                  reply(res, service.Verify(req.matches[1], req.body));
                });
    server.Get("/api/users", [this, reply](const httplib::Request&, httplib::Response& res) {
      reply(res, service.ListUsers());
    });
    server.Delete(R"(/api/users/([^/]+))",
                  [this, reply](const httplib::Request& req, httplib::Response& res) {
                    reply(res, service.DeleteUser(req.matches[1]));
                  });
    server.Get("/api/health", [this, reply](const httplib::Request&, httplib::Response& res) {
      reply(res, service.Health());
    });
  }
};

HttpServer::HttpServer(AuthService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { Stop(); }

int HttpServer::Start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::ListenBlocking(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void HttpServer::Stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace tapmein::gateway
