#include "verdant/service.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include <httplib.h>

#include "verdant/json_io.hpp"

namespace verdant {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const StoredMeasurement& m) {
  return {{"id", m.id},
          {"status", m.state == ReviewState::Pending ? "citizen_pending" : "accepted"},
          {"tree", m.tree},
          {"measurement", m.measurement},
          {"submitted_at", m.submitted_at}};
}

PendingStore::PendingStore(std::optional<fs::path> path) : path_(std::move(path)) {
  if (!path_ || !fs::exists(*path_)) return;
  std::ifstream in(*path_);
  try {
    const auto doc = json::parse(in);
    next_id_ = doc.at("next_id").get<std::size_t>();
    for (const auto& r : doc.at("records")) {
      StoredMeasurement m;
      m.id = r.at("id").get<std::string>();
      m.state = r.at("status").get<std::string>() == "accepted" ? ReviewState::Accepted : ReviewState::Pending;
      m.tree = r.at("tree").get<TreeRecord>();
      m.measurement = r.at("measurement");
      m.submitted_at = r.value("submitted_at", "");
      records_.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, path_->string() + ": corrupt measurement store: " + e.what());
  }
}

void PendingStore::persist() const {
  if (!path_) return;
  json records = json::array();
  for (const auto& r : records_) records.push_back(to_json(r));
  const fs::path tmp = path_->string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::Internal, "cannot write measurement store " + path_->string());
    out << json{{"next_id", next_id_}, {"records", records}}.dump(2);
  }
  fs::rename(tmp, *path_);
}

StoredMeasurement PendingStore::add(TreeRecord tree, json measurement, std::string submitted_at) {
  std::lock_guard lock(mutex_);
  StoredMeasurement m;
  m.id = "citizen-" + std::to_string(next_id_++);
  tree.id = m.id;
  tree.condition = "citizen_pending";
  m.tree = std::move(tree);
  m.measurement = std::move(measurement);
  m.submitted_at = std::move(submitted_at);
  records_.push_back(m);
  persist();
  return m;
}

StoredMeasurement PendingStore::accept(const std::string& id) {
  std::lock_guard lock(mutex_);
  for (auto& r : records_) {
    if (r.id != id) continue;
    if (r.state == ReviewState::Accepted) throw Error(ErrorCode::Conflict, "measurement '" + id + "' already accepted");
    r.state = ReviewState::Accepted;
    r.tree.condition = "citizen_accepted";
    persist();
    return r;
  }
  throw Error(ErrorCode::NotFound, "unknown measurement '" + id + "'");
}

std::optional<StoredMeasurement> PendingStore::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  for (const auto& r : records_)
    if (r.id == id) return r;
  return std::nullopt;
}

std::vector<StoredMeasurement> PendingStore::all() const {
  std::lock_guard lock(mutex_);
  return records_;
}

std::vector<TreeRecord> PendingStore::accepted_trees() const {
  std::lock_guard lock(mutex_);
  std::vector<TreeRecord> out;
  for (const auto& r : records_)
    if (r.state == ReviewState::Accepted) out.push_back(r.tree);
  return out;
}

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Conflict: return 409;
    case ErrorCode::Internal: return 500;
    default: return 422;
  }
}

json error_envelope(const Error& e) {
  return {{"error", {{"code", std::string(code_name(e.code()))}, {"message", e.what()}, {"details", json::object()}}}};
}

Snapshot with_accepted(Snapshot base, const PendingStore& store) {
  for (auto& t : store.accepted_trees()) base.trees.push_back(std::move(t));
  return base;
}

ServiceOptions options_from_env() {
  ServiceOptions o;
  if (const char* port = std::getenv("VERDANT_PORT")) o.port = std::atoi(port);
  if (const char* origin = std::getenv("VERDANT_UI_ORIGIN")) o.cors_origin = origin;
  return o;
}

Service::Service(Snapshot base, PendingStore& store, EngineConfig config, ServiceOptions options)
    : base_(std::move(base)),
      store_(store),
      engine_(with_accepted(base_, store_), std::move(config)),
      options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()) {
  register_routes();
}

Service::~Service() { stop(); }

json Service::endpoint_listing() {
  return {{"endpoints",
           json::array({
               {{"method", "GET"}, {"path", "/health"}, {"summary", "liveness probe"}},
               {{"method", "GET"}, {"path", "/endpoints"}, {"summary", "this listing"}},
               {{"method", "POST"}, {"path", "/measurements"}, {"summary", "submit a citizen tree measurement"}},
               {{"method", "GET"}, {"path", "/measurements"}, {"summary", "list submitted measurements"}},
               {{"method", "PATCH"}, {"path", "/measurements/{id}/accept"}, {"summary", "accept a pending measurement"}},
               {{"method", "POST"}, {"path", "/route"}, {"summary", "eco and conventional routes side by side"}},
               {{"method", "POST"}, {"path", "/loop"}, {"summary", "serenity loop for a walking duration"}},
               {{"method", "POST"}, {"path", "/simulate"}, {"summary", "hexagonal planting and predicted cooling"}},
               {{"method", "GET"}, {"path", "/segments/{id}"}, {"summary", "segment attributes and scores"}},
               {{"method", "GET"}, {"path", "/archetypes"}, {"summary", "archetype cooling performance table"}},
           })}};
}

json Service::submit(const json& body) {
  json measured = measure(body);
  TreeRecord tree;
  if (!body.contains("position")) throw Error(ErrorCode::InvalidInput, "missing 'position'");
  tree.position = body["position"].get<Point>();
  tree.species = body.value("species", "");
  tree.height_m = measured["height_m"].get<double>();
  tree.girth_cm = measured["girth_m"].get<double>() * 100.0;
  tree.canopy_diameter_m = measured["canopy_diameter_m"].get<double>();
  tree.id = "pending";
  if (auto why = tree_violation(tree); !why.empty()) throw Error(ErrorCode::InvalidInput, "measured tree invalid: " + why);
  return to_json(store_.add(std::move(tree), std::move(measured), body.value("submitted_at", "")));
}

json Service::accept(const std::string& id) {
  std::lock_guard lock(accept_mutex_);
  const auto existing = store_.find(id);
  if (!existing) throw Error(ErrorCode::NotFound, "unknown measurement '" + id + "'");
  if (existing->state == ReviewState::Accepted)
    throw Error(ErrorCode::Conflict, "measurement '" + id + "' already accepted");
  if (!base_.species.count(existing->tree.species))
    throw Error(ErrorCode::MissingSpecies, "species '" + existing->tree.species + "' is not in the species table");

  auto accepted = store_.accept(id);
  engine_.replace_snapshot(with_accepted(base_, store_));
  return to_json(accepted);
}

void Service::register_routes() {
  auto& srv = *server_;
  const std::string origin = options_.cors_origin;

  auto send = [](httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  };
  // Runs a handler and maps engine errors onto the ApiError envelope.
  auto guarded = [send](auto handler) {
    return [send, handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const Error& e) {
        send(res, http_status(e.code()), error_envelope(e));
      } catch (const json::exception& e) {
        send(res, 400, error_envelope(Error(ErrorCode::InvalidInput, std::string("bad request body: ") + e.what())));
      } catch (const std::exception& e) {
        send(res, 500, error_envelope(Error(ErrorCode::Internal, e.what())));
      }
    };
  };
  auto body_of = [](const httplib::Request& req) {
    return req.body.empty() ? json::object() : json::parse(req.body);
  };

  srv.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PATCH, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Get("/health", guarded([send](const httplib::Request&, httplib::Response& res) {
            send(res, 200, {{"status", "ok"}});
          }));
  srv.Get("/endpoints", guarded([send](const httplib::Request&, httplib::Response& res) {
            send(res, 200, endpoint_listing());
          }));
  srv.Post("/route", guarded([this, send, body_of](const httplib::Request& req, httplib::Response& res) {
             send(res, 200, engine_.route(body_of(req)));
           }));
  srv.Post("/loop", guarded([this, send, body_of](const httplib::Request& req, httplib::Response& res) {
             send(res, 200, engine_.loop(body_of(req)));
           }));
  srv.Post("/simulate", guarded([this, send, body_of](const httplib::Request& req, httplib::Response& res) {
             send(res, 200, engine_.simulate(body_of(req)));
           }));
  srv.Get(R"(/segments/([^/]+))", guarded([this, send](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, engine_.segment(req.matches[1].str()));
          }));
  srv.Get("/archetypes", guarded([this, send](const httplib::Request&, httplib::Response& res) {
            send(res, 200, engine_.archetypes());
          }));
  srv.Post("/measurements", guarded([this, send, body_of](const httplib::Request& req, httplib::Response& res) {
             send(res, 201, submit(body_of(req)));
           }));
  srv.Get("/measurements", guarded([this, send](const httplib::Request&, httplib::Response& res) {
            json list = json::array();
            for (const auto& m : store_.all()) list.push_back(to_json(m));
            send(res, 200, {{"measurements", list}});
          }));
  srv.Patch(R"(/measurements/([^/]+)/accept)",
            guarded([this, send](const httplib::Request& req, httplib::Response& res) {
              send(res, 200, accept(req.matches[1].str()));
            }));
}

bool Service::listen() { return server_->listen(options_.host, options_.port); }

int Service::bind_any_port() { return server_->bind_to_any_port(options_.host); }

bool Service::listen_after_bind() { return server_->listen_after_bind(); }

void Service::wait_until_ready() const { server_->wait_until_ready(); }

void Service::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

}  // namespace verdant
