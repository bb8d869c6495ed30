#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "tierplan/pipeline.hpp"

namespace tierplan {

struct ServiceOptions {
  /// Longest a request waits for a solve before answering 202.
  std::chrono::milliseconds solve_budget{2000};
  std::size_t node_cap = 1'000'000;
};

struct Response {
  int status = 200;
  Json body;
};

/// Transport-independent JSON API over problems and interactive sessions.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  Response handle(const std::string& method, const std::string& path, const std::string& body);

 private:
  struct ProblemRecord;
  struct SessionRecord;

  Response create_problem(const Json& body);
  Response compile_problem(const std::string& id, const Json& body);
  Response solve_problem(const std::string& id, bool start);
  Response problem_artifact(const std::string& id, const std::string& what);
  Response create_session(const Json& body);
  Response get_session(const std::string& id);
  Response choose(const std::string& id, const Json& body);
  Response delete_session(const std::string& id);

  std::shared_ptr<ProblemRecord> problem(const std::string& id);
  std::shared_ptr<SessionRecord> session(const std::string& id);

  ServiceOptions options_;
  std::mutex mutex_;
  std::uint64_t next_problem_ = 1;
  std::uint64_t next_session_ = 1;
  std::map<std::string, std::shared_ptr<ProblemRecord>> problems_;
  std::map<std::string, std::shared_ptr<SessionRecord>> sessions_;
};

/// HTTP front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to `port` (0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop() is called.
  void listen();
  /// Serves on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Port from TIERPLAN_PORT, else 8080.
int default_port();

}  // namespace tierplan
