#include "nlkit/session.hpp"

#include <charconv>
#include <set>

#include "httplib.h"

namespace nlkit {

namespace {

ApiResponse ok(nlohmann::json body) { return {200, std::move(body)}; }
ApiResponse fail(int status, const std::string& message) { return {status, {{"error", message}}}; }

// Errors raised while handling a request that map onto a status code.
struct HttpError {
  int status;
  std::string message;
};

std::size_t parse_index(std::string_view text, const std::string& what) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw HttpError{400, what + " must be a non-negative integer"};
  return out;
}

std::map<std::string, std::string> parse_query(std::string_view q) {
  std::map<std::string, std::string> out;
  while (!q.empty()) {
    const auto amp = q.find('&');
    const auto item = q.substr(0, amp);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      out[std::string(item)] = "";
    else
      out[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    if (amp == std::string_view::npos) break;
    q.remove_prefix(amp + 1);
  }
  return out;
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  while (!path.empty()) {
    const auto slash = path.find('/');
    if (slash != 0) parts.push_back(path.substr(0, slash));
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash + 1);
  }
  return parts;
}

const nlohmann::json& member(const nlohmann::json& body, const char* key) {
  if (!body.is_object() || !body.contains(key)) throw HttpError{400, std::string("missing '") + key + "'"};
  return body.at(key);
}

std::string string_member(const nlohmann::json& body, const char* key) {
  const auto& v = member(body, key);
  if (!v.is_string()) throw HttpError{400, std::string("'") + key + "' must be a string"};
  return v.get<std::string>();
}

Strategy::Name strategy_member(const nlohmann::json& body) {
  try {
    return parse_strategy_name(string_member(body, "name"));
  } catch (const FormatError& e) {
    throw HttpError{400, e.what()};
  }
}

}  // namespace

nlohmann::json tree_to_json(const Tree& t) {
  auto children = nlohmann::json::array();
  for (const auto& c : t.children) {
    if (const auto* sub = std::get_if<Tree>(&c)) {
      children.push_back(tree_to_json(*sub));
    } else if (const auto* tok = std::get_if<TaggedToken>(&c)) {
      nlohmann::json leaf = {{"word", tok->text}};
      if (tok->tag) leaf["tag"] = *tok->tag;
      children.push_back(leaf);
    } else {
      children.push_back({{"placeholder", std::get<Placeholder>(c).symbol}});
    }
  }
  return {{"node", t.node}, {"children", children}};
}

std::vector<Preset> presets_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw FormatError("presets must be a JSON array");
  std::vector<Preset> out;
  std::set<std::string> names;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("name") || !item.at("name").is_string())
      throw FormatError("every preset needs a string 'name'");
    auto name = item.at("name").get<std::string>();
    if (!names.insert(name).second) throw FormatError("duplicate preset '" + name + "'");
    const auto snap = chart_from_json(item);
    out.push_back({std::move(name), chart_to_json(snap.grammar, snap.chart)});
  }
  return out;
}

SessionService::SessionService(std::vector<Preset> presets) : presets_(std::move(presets)) {}

const Preset* SessionService::find_preset(const std::string& name) const {
  for (const auto& p : presets_)
    if (p.name == name) return &p;
  return nullptr;
}

ApiResponse SessionService::handle(std::string_view method, std::string_view target, std::string_view body_text) {
  try {
    std::map<std::string, std::string> query;
    if (const auto q = target.find('?'); q != std::string_view::npos) {
      query = parse_query(target.substr(q + 1));
      target = target.substr(0, q);
    }
    const auto parts = split_path(target);
    if (parts.size() < 3 || parts[0] != "api" || parts[1] != "v1") return fail(404, "no such route");

    nlohmann::json body = nlohmann::json::object();
    if (method == "POST" && body_text.find_first_not_of(" \t\r\n") != std::string_view::npos) {
      body = nlohmann::json::parse(body_text, nullptr, false);
      if (body.is_discarded() || !body.is_object()) return fail(400, "body must be a JSON object");
    }

    if (parts.size() == 3 && parts[2] == "presets" && method == "GET") {
      auto names = nlohmann::json::array();
      for (const auto& p : presets_) names.push_back(p.name);
      return ok({{"presets", names}});
    }
    if (parts[2] != "sessions") return fail(404, "no such route");
    if (parts.size() == 3) {
      if (method != "POST") return fail(404, "no such route");
      return create(body);
    }
    if (parts.size() > 5) return fail(404, "no such route");

    const std::string id(parts[3]);
    std::shared_ptr<Session> session;
    {
      std::lock_guard lock(mutex_);
      auto it = sessions_.find(id);
      if (it == sessions_.end()) return fail(404, "unknown session '" + id + "'");
      session = it->second;
    }
    std::lock_guard lock(session->mutex);
    return dispatch(*session, id, method, parts.size() == 5 ? parts[4] : "", query, body);
  } catch (const HttpError& e) {
    return fail(e.status, e.message);
  } catch (const Error& e) {
    return fail(400, e.what());
  }
}

ApiResponse SessionService::create(const nlohmann::json& body) {
  auto strategy = Strategy::top_down();
  if (body.contains("strategy")) {
    const auto& v = body.at("strategy");
    if (!v.is_string()) throw HttpError{400, "'strategy' must be a string"};
    strategy = Strategy::from_name(strategy_member({{"name", v}}));
  }

  std::shared_ptr<Session> session;
  if (body.contains("preset")) {
    const auto name = string_member(body, "preset");
    const auto* p = find_preset(name);
    if (!p) throw HttpError{409, "unknown preset '" + name + "'"};
    auto snap = chart_from_json(p->snapshot);
    session = std::make_shared<Session>(std::move(snap.grammar), std::move(snap.chart), std::move(strategy));
  } else {
    auto grammar = parse_cfg(string_member(body, "grammar"));
    auto chart = chart_init(grammar, tokenize_whitespace(string_member(body, "sentence")));
    session = std::make_shared<Session>(std::move(grammar), std::move(chart), std::move(strategy));
  }

  std::lock_guard lock(mutex_);
  const auto id = "s" + std::to_string(next_id_++);
  sessions_.emplace(id, std::move(session));
  return ok({{"id", id}});
}

ApiResponse SessionService::dispatch(Session& s, const std::string& id, std::string_view method,
                                     std::string_view action, const std::map<std::string, std::string>& query,
                                     const nlohmann::json& body) {
  if (method == "GET") {
    if (action.empty())
      return ok({{"id", id}, {"strategy", strategy_name(s.strategy.name)}, {"edges", s.chart.size()}});
    if (action == "chart") return ok(chart_to_json(s.grammar, s.chart));
    if (action == "tree") {
      auto it = query.find("edge");
      if (it == query.end()) throw HttpError{400, "missing 'edge' query parameter"};
      const auto edge = parse_index(it->second, "edge");
      if (edge >= s.chart.size()) throw HttpError{404, "unknown edge " + it->second};
      const auto t = tree_for_edge(s.chart, edge);
      return ok({{"edge", edge}, {"tree", tree_to_json(t)}, {"bracketed", to_bracketed(t)}});
    }
    if (action == "parses") {
      auto parses = nlohmann::json::array();
      for (const auto& t : extract_parses(s.chart, s.grammar))
        parses.push_back({{"tree", tree_to_json(t)}, {"bracketed", to_bracketed(t)}});
      return ok({{"parses", parses}});
    }
    return fail(404, "no such route");
  }
  if (method != "POST") return fail(404, "no such route");

  if (action == "step") {
    const auto r = step(s.chart, s.grammar, s.strategy);
    if (!r) return ok({{"done", true}});
    s.undo_log.push_back({r->edge});
    return ok({{"rule", rule_name(r->rule)}, {"new_edge", edge_to_json(s.chart, r->edge)}});
  }
  if (action == "apply") {
    ChartRuleKind kind;
    try {
      kind = parse_rule_kind(string_member(body, "rule"));
    } catch (const FormatError& e) {
      throw HttpError{400, e.what()};
    }
    std::optional<std::set<EdgeId>> selected;
    if (body.contains("edge_ids") && !body.at("edge_ids").is_null()) {
      const auto& ids = body.at("edge_ids");
      if (!ids.is_array()) throw HttpError{400, "'edge_ids' must be an array"};
      selected.emplace();
      for (const auto& e : ids) {
        if (!e.is_number_unsigned()) throw HttpError{400, "edge ids must be non-negative integers"};
        const auto edge = e.get<EdgeId>();
        if (edge >= s.chart.size()) throw HttpError{404, "unknown edge " + std::to_string(edge)};
        selected->insert(edge);
      }
    }
    const auto added = apply_rule(s.chart, s.grammar, kind, selected);
    if (!added.empty()) s.undo_log.push_back(added);
    auto edges = nlohmann::json::array();
    for (auto e : added) edges.push_back(edge_to_json(s.chart, e));
    return ok({{"new_edges", edges}});
  }
  if (action == "strategy") {
    s.strategy = Strategy::from_name(strategy_member(body));
    return ok({{"strategy", strategy_name(s.strategy.name)}});
  }
  if (action == "reset") {
    const auto name = string_member(body, "preset");
    const auto* p = find_preset(name);
    if (!p) throw HttpError{409, "unknown preset '" + name + "'"};
    auto snap = chart_from_json(p->snapshot);
    s.grammar = std::move(snap.grammar);
    s.chart = std::move(snap.chart);
    s.undo_log.clear();
    return ok(p->snapshot);
  }
  if (action == "undo") {
    if (s.undo_log.empty()) throw HttpError{409, "nothing to undo"};
    const auto batch = std::move(s.undo_log.back());
    s.undo_log.pop_back();
    s.chart = s.chart.truncated(s.chart.size() - batch.size());
    return ok({{"removed", batch}});
  }
  return fail(404, "no such route");
}

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(SessionService& service) : impl_(std::make_unique<Impl>()) {
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    const auto r = service.handle(req.method, req.target, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  impl_->server.Get("/api/v1/.*", handler);
  impl_->server.Post("/api/v1/.*", handler);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw Error("cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void serve_http(SessionService& service, const std::string& host, int port) {
  HttpServer server(service);
  server.bind(host, port);
  server.run();
}

}  // namespace nlkit
