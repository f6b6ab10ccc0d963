#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <string_view>
#include <thread>

#include "disambig/engine.h"
#include "json.hpp"

namespace disambig {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// Transport-independent request handling. Sessions live in memory and expire
// after the configured idle TTL. Requests to one session are serialized by a
// per-session mutex; distinct sessions run in parallel.
class Gateway {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit Gateway(std::shared_ptr<const Engine> engine, Clock clock = {});

  ApiResponse health() const;
  ApiResponse create_session();
  // `body` is the raw request body: {"text": "..."}.
  ApiResponse post_message(std::string_view session_id, std::string_view body);
  ApiResponse get_session(std::string_view session_id);

  // Drops sessions idle for longer than the TTL; returns how many.
  std::size_t purge_expired();
  std::size_t session_count() const;

  const Engine& engine() const { return *engine_; }

 private:
  struct Entry {
    std::mutex mutex;
    Session session;
    std::chrono::steady_clock::time_point last_used;
  };

  std::shared_ptr<Entry> find(std::string_view session_id);
  std::string new_session_id();

  std::shared_ptr<const Engine> engine_;
  Clock clock_;
  std::chrono::duration<double> ttl_;
  mutable std::mutex mutex_;  // guards sessions_ and id_rng_
  std::map<std::string, std::shared_ptr<Entry>, std::less<>> sessions_;
  std::mt19937_64 id_rng_;
};

// "host:port", "host" (port 8080) or ":port" (host 0.0.0.0).
std::pair<std::string, int> parse_bind_address(std::string_view address);

// cpp-httplib front end for a Gateway.
class HttpServer {
 public:
  explicit HttpServer(std::shared_ptr<Gateway> gateway);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws Error on failure.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void run();
  // run() on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
};

}  // namespace disambig
