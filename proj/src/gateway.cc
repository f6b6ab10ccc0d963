#include "disambig/gateway.h"

#include <charconv>
#include <cstdio>

#include "disambig/errors.h"
#include "httplib.h"

namespace disambig {

using nlohmann::json;

namespace {

ApiResponse error_response(int status, const std::string& message) {
  return {status, json{{"error", message}}};
}

}  // namespace

Gateway::Gateway(std::shared_ptr<const Engine> engine, Clock clock)
    : engine_(std::move(engine)),
      clock_(clock ? std::move(clock) : Clock(&std::chrono::steady_clock::now)),
      ttl_(engine_->config().session_ttl_seconds),
      id_rng_(std::random_device{}()) {}

ApiResponse Gateway::health() const { return {200, json{{"status", "ok"}}}; }

std::string Gateway::new_session_id() {
  // Caller holds mutex_.
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(id_rng_()));
  return buf;
}

ApiResponse Gateway::create_session() {
  purge_expired();
  auto entry = std::make_shared<Entry>();
  std::lock_guard lock(mutex_);
  std::string id;
  do {
    id = new_session_id();
  } while (sessions_.count(id));
  entry->session = engine_->start_session(id);
  entry->last_used = clock_();
  sessions_.emplace(id, std::move(entry));
  return {200, json{{"session_id", id}}};
}

std::shared_ptr<Gateway::Entry> Gateway::find(std::string_view session_id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) return nullptr;
  if (clock_() - it->second->last_used > ttl_) {
    sessions_.erase(it);
    return nullptr;
  }
  return it->second;
}

ApiResponse Gateway::post_message(std::string_view session_id, std::string_view body) {
  auto entry = find(session_id);
  if (!entry) return error_response(404, "unknown session");

  json request = json::parse(body, nullptr, false);
  if (request.is_discarded() || !request.is_object()) {
    return error_response(400, "body must be a JSON object");
  }
  auto text = request.find("text");
  if (text == request.end() || !text->is_string()) {
    return error_response(400, "\"text\" must be a string");
  }

  std::lock_guard lock(entry->mutex);
  if (entry->session.closed()) return error_response(409, "session is closed");
  try {
    auto [next, reply] = engine_->handle_message(entry->session, text->get<std::string>());
    entry->session = std::move(next);
    entry->last_used = clock_();
    return {200, reply.to_json()};
  } catch (const PreconditionError& e) {
    return error_response(400, e.what());
  } catch (const StateError& e) {
    return error_response(409, e.what());
  }
}

ApiResponse Gateway::get_session(std::string_view session_id) {
  auto entry = find(session_id);
  if (!entry) return error_response(404, "unknown session");
  std::lock_guard lock(entry->mutex);
  return {200, entry->session.to_json()};
}

std::size_t Gateway::purge_expired() {
  std::lock_guard lock(mutex_);
  const auto now = clock_();
  return std::erase_if(sessions_, [&](const auto& kv) { return now - kv.second->last_used > ttl_; });
}

std::size_t Gateway::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::pair<std::string, int> parse_bind_address(std::string_view address) {
  std::string host(address);
  int port = 8080;
  if (auto colon = address.rfind(':'); colon != std::string_view::npos) {
    host = std::string(address.substr(0, colon));
    auto digits = address.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || port < 0 || port > 65535) {
      throw PreconditionError("invalid port in bind address: " + std::string(address));
    }
  }
  if (host.empty()) host = "0.0.0.0";
  return {host, port};
}

struct HttpServer::Impl {
  std::shared_ptr<Gateway> gateway;
  httplib::Server server;
};

HttpServer::HttpServer(std::shared_ptr<Gateway> gateway) : impl_(std::make_unique<Impl>()) {
  impl_->gateway = std::move(gateway);
  auto& server = impl_->server;
  Gateway* gw = impl_->gateway.get();
  const std::string origin = gw->engine().config().cors_origin;

  auto send = [origin](httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    if (!origin.empty()) res.set_header("Access-Control-Allow-Origin", origin);
    res.set_content(api.body.dump(), "application/json");
  };

  server.Get("/v1/health", [gw, send](const httplib::Request&, httplib::Response& res) {
    send(res, gw->health());
  });
  server.Post("/v1/sessions", [gw, send](const httplib::Request&, httplib::Response& res) {
    send(res, gw->create_session());
  });
  server.Post(R"(/v1/sessions/([^/]+)/messages)",
              [gw, send](const httplib::Request& req, httplib::Response& res) {
                send(res, gw->post_message(req.matches[1].str(), req.body));
              });
  server.Get(R"(/v1/sessions/([^/]+))",
             [gw, send](const httplib::Request& req, httplib::Response& res) {
               send(res, gw->get_session(req.matches[1].str()));
             });
  if (!origin.empty()) {
    server.Options(R"(/v1/.*)", [origin](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
  }
  server.set_exception_handler(
      [send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          message = e.what();
        } catch (...) {
        }
        send(res, error_response(500, message));
      });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host)
                        : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::start() {
  thread_ = std::thread([this] { run(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace disambig
