#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "verdant/engine.hpp"
#include "verdant/error.hpp"

namespace httplib {
class Server;
}

namespace verdant {

enum class ReviewState { Pending, Accepted };

struct StoredMeasurement {
  std::string id;
  ReviewState state = ReviewState::Pending;
  TreeRecord tree;
  nlohmann::json measurement;
  std::string submitted_at;
};

// Citizen submissions awaiting review, persisted to a single JSON file.
// Writes are serialized; each one rewrites the file through a rename.
class PendingStore {
 public:
  explicit PendingStore(std::optional<std::filesystem::path> path = std::nullopt);

  StoredMeasurement add(TreeRecord tree, nlohmann::json measurement, std::string submitted_at);
  StoredMeasurement accept(const std::string& id);
  std::optional<StoredMeasurement> find(const std::string& id) const;
  std::vector<StoredMeasurement> all() const;
  std::vector<TreeRecord> accepted_trees() const;

 private:
  void persist() const;

  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::vector<StoredMeasurement> records_;
  std::size_t next_id_ = 1;
};

nlohmann::json to_json(const StoredMeasurement& m);

int http_status(ErrorCode code) noexcept;
nlohmann::json error_envelope(const Error& e);

// Snapshot with the store's accepted trees appended.
Snapshot with_accepted(Snapshot base, const PendingStore& store);

struct ServiceOptions {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::string cors_origin = "*";
};

// VERDANT_PORT and VERDANT_UI_ORIGIN override the defaults.
ServiceOptions options_from_env();

class Service {
 public:
  Service(Snapshot base, PendingStore& store, EngineConfig config = {}, ServiceOptions options = {});
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Engine& engine() noexcept { return engine_; }

  // Blocks until stop(). Returns false when the port cannot be bound.
  bool listen();
  // Binds an ephemeral port and returns it; serve with listen_after_bind().
  int bind_any_port();
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

  static nlohmann::json endpoint_listing();

 private:
  void register_routes();
  nlohmann::json submit(const nlohmann::json& body);
  nlohmann::json accept(const std::string& id);

  Snapshot base_;
  PendingStore& store_;
  Engine engine_;
  ServiceOptions options_;
  std::mutex accept_mutex_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace verdant
