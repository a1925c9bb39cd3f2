#pragma once

// Interactive chart-parsing sessions behind a JSON API.
//
// All routes live under /api/v1/:
//   POST /sessions                     {grammar, sentence, strategy?} or {preset, strategy?} -> {id}
//   GET  /sessions/ID                  -> {id, strategy, edges}
//   GET  /sessions/ID/chart            -> chart snapshot
//   POST /sessions/ID/step             -> {rule, new_edge} or {done: true}
//   POST /sessions/ID/apply            {rule, edge_ids?} -> {new_edges}
//   POST /sessions/ID/strategy         {name} -> {strategy}
//   POST /sessions/ID/reset            {preset} -> chart snapshot
//   POST /sessions/ID/undo             -> {removed}
//   GET  /sessions/ID/tree?edge=N      -> {edge, tree, bracketed}
//   GET  /sessions/ID/parses           -> {parses: [{tree, bracketed}]}
//   GET  /presets                      -> {presets: [name, ...]}
// Errors are {"error": message} with 400 for a malformed body, 404 for an
// unknown route, session or edge, and 409 for an unknown preset or an empty
// undo log.

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nlkit/chart.hpp"

namespace nlkit {

struct Preset {
  std::string name;
  nlohmann::json snapshot;  // normalized chart snapshot
};

// JSON array of chart snapshots, each with an extra "name" member.
// Throws FormatError on malformed or duplicate entries.
std::vector<Preset> presets_from_json(const nlohmann::json& j);

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// {"node": label, "children": [...]}; leaves are {"word", "tag"?} and
// unexpanded symbols are {"placeholder": symbol}.
nlohmann::json tree_to_json(const Tree& t);

class SessionService {
 public:
  explicit SessionService(std::vector<Preset> presets = {});

  // `target` is the request path with an optional query string.
  ApiResponse handle(std::string_view method, std::string_view target, std::string_view body);

 private:
  struct Session {
    Session(Grammar g, Chart c, Strategy s) : grammar(std::move(g)), chart(std::move(c)), strategy(std::move(s)) {}

    std::mutex mutex;
    Grammar grammar;
    Chart chart;
    Strategy strategy;
    std::vector<std::vector<EdgeId>> undo_log;
  };

  ApiResponse create(const nlohmann::json& body);
  ApiResponse dispatch(Session& s, const std::string& id, std::string_view method, std::string_view action,
                       const std::map<std::string, std::string>& query, const nlohmann::json& body);
  const Preset* find_preset(const std::string& name) const;

  std::vector<Preset> presets_;
  std::mutex mutex_;  // guards sessions_ and next_id_
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::size_t next_id_ = 1;
};

// Serves the API over HTTP until the process is stopped.
// HTTP front end for a SessionService.
class HttpServer {
 public:
  explicit HttpServer(SessionService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws Error on failure.
  int bind(const std::string& host, int port);
  // Serves until stop() is called.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Binds and serves until the process ends.
void serve_http(SessionService& service, const std::string& host, int port);

}  // namespace nlkit
