#include <fstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "nlkit/errors.hpp"
#include "nlkit/session.hpp"

using namespace nlkit;
using nlohmann::json;

namespace {

std::vector<Preset> load_presets() {
  std::ifstream in(std::string(NLKIT_DATA_DIR) + "/presets.json");
  REQUIRE(in);
  return presets_from_json(json::parse(in));
}

const char* kToy = "S -> NP VP\nNP -> 'I'\nVP -> 'sleep'";

struct Client {
  SessionService service{load_presets()};

  ApiResponse post(const std::string& path, const json& body = json::object()) {
    return service.handle("POST", "/api/v1" + path, body.dump());
  }
  ApiResponse get(const std::string& path) { return service.handle("GET", "/api/v1" + path, ""); }

  std::string create(const json& body) {
    const auto r = post("/sessions", body);
    REQUIRE(r.status == 200);
    return r.body.at("id").get<std::string>();
  }
};

}  // namespace

TEST_CASE("create, step and read the chart") {
  Client c;
  const auto id = c.create({{"grammar", kToy}, {"sentence", "I sleep"}, {"strategy", "td"}});
  CHECK(id == "s1");
  CHECK(c.get("/sessions/" + id).body == json{{"id", "s1"}, {"strategy", "TopDown"}, {"edges", 0}});
  const auto before = c.get("/sessions/" + id + "/chart").body;
  const auto s = c.post("/sessions/" + id + "/step");
  REQUIRE(s.status == 200);
  CHECK(s.body.at("rule") == "TopDownInit");
  CHECK(s.body.at("new_edge").at("lhs") == "S");
  const auto after = c.get("/sessions/" + id + "/chart").body;
  CHECK(after.at("edges").size() == before.at("edges").size() + 1);

  while (!c.post("/sessions/" + id + "/step").body.contains("done")) {
  }
  const auto parses = c.get("/sessions/" + id + "/parses").body.at("parses");
  REQUIRE(parses.size() == 1);
  CHECK(parses[0].at("bracketed") == "(S (NP I) (VP sleep))");
}

TEST_CASE("apply Fundamental to selected edges of a preset") {
  Client c;
  const auto id = c.create({{"preset", "lecture-1"}});
  const auto r = c.post("/sessions/" + id + "/apply", {{"rule", "Fundamental"}, {"edge_ids", {0, 1}}});
  REQUIRE(r.status == 200);
  const auto& edges = r.body.at("new_edges");
  REQUIRE(edges.size() == 1);
  CHECK(edges[0].at("i") == 0);
  CHECK(edges[0].at("j") == 1);
  CHECK(edges[0].at("lhs") == "S");
  CHECK(edges[0].at("dot") == 1);
  CHECK(edges[0].at("rhs") == json{"NP", "VP"});

  const auto tree = c.get("/sessions/" + id + "/tree?edge=3");
  REQUIRE(tree.status == 200);
  CHECK(tree.body.at("bracketed") == "(S (NP I) VP?)");
  CHECK(tree.body.at("tree").at("children")[1] == json{{"placeholder", "VP"}});

  const auto done = c.post("/sessions/" + id + "/apply", {{"rule", "Fundamental"}, {"edge_ids", {2}}});
  REQUIRE(done.body.at("new_edges").size() == 1);
  CHECK(done.body.at("new_edges")[0].at("dot") == 2);
  CHECK(done.body.at("new_edges")[0].at("children") == json{1, 2});
  const auto again = c.post("/sessions/" + id + "/apply", {{"rule", "Fundamental"}, {"edge_ids", {2}}});
  CHECK(again.body.at("new_edges").empty());
}

TEST_CASE("undo and reset") {
  Client c;
  const auto id = c.create({{"grammar", kToy}, {"sentence", "I sleep"}});
  CHECK(c.post("/sessions/" + id + "/undo").status == 409);
  c.post("/sessions/" + id + "/step");
  const auto before = c.get("/sessions/" + id + "/chart").body.dump();
  c.post("/sessions/" + id + "/step");
  c.post("/sessions/" + id + "/apply", {{"rule", "LexicalInsert"}});
  CHECK(c.post("/sessions/" + id + "/undo").status == 200);
  const auto undone = c.post("/sessions/" + id + "/undo");
  CHECK(undone.body.at("removed").size() == 1);
  CHECK(c.get("/sessions/" + id + "/chart").body.dump() == before);

  const auto reset = c.post("/sessions/" + id + "/reset", {{"preset", "lecture-1"}});
  REQUIRE(reset.status == 200);
  const auto stored = load_presets()[0].snapshot.dump();
  CHECK(reset.body.dump() == stored);
  CHECK(c.get("/sessions/" + id + "/chart").body.dump() == stored);
  CHECK(c.post("/sessions/" + id + "/undo").status == 409);
  CHECK(c.post("/sessions/" + id + "/reset", {{"preset", "nope"}}).status == 409);
}

TEST_CASE("strategy switching") {
  Client c;
  const auto id = c.create({{"grammar", kToy}, {"sentence", "I sleep"}, {"strategy", "bu"}});
  CHECK(c.post("/sessions/" + id + "/step").body.at("rule") == "LexicalInsert");
  CHECK(c.post("/sessions/" + id + "/strategy", {{"name", "td"}}).body == json{{"strategy", "TopDown"}});
  CHECK(c.post("/sessions/" + id + "/strategy", {{"name", "sideways"}}).status == 400);
}

TEST_CASE("errors") {
  Client c;
  const auto id = c.create({{"grammar", kToy}, {"sentence", "I sleep"}});
  CHECK(c.get("/sessions/zzz/chart").status == 404);
  CHECK(c.post("/sessions/zzz/step").status == 404);
  CHECK(c.get("/nowhere").status == 404);
  CHECK(c.service.handle("GET", "/other/api", "").status == 404);
  CHECK(c.get("/sessions/" + id + "/tree?edge=7").status == 404);
  CHECK(c.get("/sessions/" + id + "/tree").status == 400);
  CHECK(c.post("/sessions/" + id + "/apply", {{"rule", "Fundamental"}, {"edge_ids", {9}}}).status == 404);
  CHECK(c.post("/sessions/" + id + "/apply", {{"rule", "Teleport"}}).status == 400);
  CHECK(c.service.handle("POST", "/api/v1/sessions", "{not json").status == 400);
  CHECK(c.post("/sessions", {{"grammar", "S -> "}, {"sentence", "a"}}).status == 400);
  CHECK(c.post("/sessions", {{"sentence", "a"}}).status == 400);
  CHECK(c.post("/sessions", {{"preset", "missing"}}).status == 409);
  const auto err = c.get("/sessions/zzz");
  CHECK(err.body.contains("error"));
  CHECK(c.get("/presets").body == json{{"presets", {"lecture-1", "pp-attachment"}}});
}

TEST_CASE("replay is deterministic") {
  const std::vector<std::tuple<std::string, std::string, json>> script = {
      {"POST", "/sessions", {{"preset", "pp-attachment"}, {"strategy", "bu"}}},
      {"POST", "/sessions/s1/step", json::object()},
      {"POST", "/sessions/s1/apply", {{"rule", "BottomUpPredict"}}},
      {"POST", "/sessions/s1/undo", json::object()},
      {"POST", "/sessions/s1/step", json::object()},
      {"GET", "/sessions/s1/chart", nullptr},
  };
  auto run = [&] {
    Client c;
    std::string out;
    for (const auto& [m, p, b] : script) {
      const auto r = c.service.handle(m, "/api/v1" + p, b.is_null() ? "" : b.dump());
      out += std::to_string(r.status) + " " + r.body.dump() + "\n";
    }
    return out;
  };
  CHECK(run() == run());
}

TEST_CASE("sessions run concurrently") {
  Client c;
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i) ids.push_back(c.create({{"preset", "pp-attachment"}, {"strategy", "td"}}));
  std::vector<std::thread> threads;
  std::vector<int> steps(ids.size(), 0);
  for (std::size_t k = 0; k < ids.size(); ++k)
    threads.emplace_back([&, k] {
      while (c.post("/sessions/" + ids[k] + "/step").body.contains("rule")) ++steps[k];
    });
  for (auto& t : threads) t.join();
  for (std::size_t k = 0; k < ids.size(); ++k) {
    CHECK(steps[k] == steps[0]);
    CHECK(c.get("/sessions/" + ids[k] + "/parses").body.at("parses").size() == 2);
  }

  const auto shared = c.create({{"preset", "pp-attachment"}, {"strategy", "bu"}});
  std::atomic<int> total = 0;
  std::vector<std::thread> writers;
  for (int w = 0; w < 4; ++w)
    writers.emplace_back([&] {
      while (c.post("/sessions/" + shared + "/step").body.contains("rule")) ++total;
    });
  for (auto& t : writers) t.join();
  const auto chart = c.get("/sessions/" + shared + "/chart").body;
  CHECK(chart.at("edges").size() == static_cast<std::size_t>(total.load()));
  CHECK(c.get("/sessions/" + shared + "/parses").body.at("parses").size() == 2);
}

TEST_CASE("presets validation") {
  CHECK_THROWS_AS(presets_from_json(json::parse(R"([{"grammar":"S -> 'a'","tokens":["a"],"edges":[]}])")), FormatError);
  const auto one = json::parse(R"({"name":"x","grammar":"S -> 'a'","tokens":["a"],"edges":[]})");
  CHECK_THROWS_AS(presets_from_json(json::array({one, one})), FormatError);
  CHECK(presets_from_json(json::array({one})).size() == 1);
}

TEST_CASE("HTTP round trip") {
  SessionService service(load_presets());
  HttpServer server(service);
  const int port = server.bind("127.0.0.1", 0);
  std::thread runner([&] { server.run(); });
  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(5);
  auto created = client.Post("/api/v1/sessions", R"({"preset":"lecture-1"})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 200);
  CHECK(json::parse(created->body) == json{{"id", "s1"}});
  auto applied = client.Post("/api/v1/sessions/s1/apply", R"({"rule":"Fundamental","edge_ids":[0,1]})", "application/json");
  REQUIRE(applied);
  CHECK(json::parse(applied->body).at("new_edges").size() == 1);
  auto tree = client.Get("/api/v1/sessions/s1/tree?edge=3");
  REQUIRE(tree);
  CHECK(json::parse(tree->body).at("bracketed") == "(S (NP I) VP?)");
  auto missing = client.Get("/api/v1/sessions/s9/chart");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  auto bad = client.Post("/api/v1/sessions", "{", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  server.stop();
  runner.join();
}
