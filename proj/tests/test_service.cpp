#include "doctest.h"

#include "kkm/service.hpp"

#include <httplib.h>

#include <thread>

using namespace kkm;

namespace {

const RealMatrix diagonal3{{10, 1, 1}, {1, 10, 1}, {1, 1, 10}};

struct Running {
    SessionStore store;
    httplib::Server server;
    std::thread thread;
    int port = 0;

    Running()
    {
        register_routes(server, store);
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~Running()
    {
        server.stop();
        thread.join();
    }
};

Json body_of(const httplib::Result& r)
{
    REQUIRE(r);
    return Json::parse(r->body);
}

} // namespace

TEST_CASE("HTTP session protocol end to end")
{
    Running svc;
    httplib::Client client("127.0.0.1", svc.port);

    auto created = client.Post("/sessions", R"({"n": 3, "room_names": ["a", "b", "c"], "mode": "interactive"})",
                               "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    CHECK(created->get_header_value("Access-Control-Allow-Origin") == "*");
    const std::string id = body_of(created)["id"];
    const std::string base = "/sessions/" + id;

    CHECK(client.Get(base + "/result")->status == 404);
    CHECK(body_of(client.Get(base))["state"] == "awaiting-answer");

    Json last_body;
    int answered = 0;
    for (;;) {
        auto q = client.Get(base + "/query");
        REQUIRE(q);
        if (q->status == 204) break;
        REQUIRE(q->status == 200);
        const auto query = Json::parse(q->body);
        const RVec prices = rvec_from_json(query["prices"]["exact"], "prices");
        CHECK(query["prices"]["decimal"].size() == 3);
        const std::size_t agent = query["agent"];
        const auto rooms = simulated_answer(diagonal3, agent, prices.to_doubles());
        last_body = Json{{"agent", agent}, {"rooms", rooms}, {"query", query["query"]}};
        auto a = client.Post(base + "/answer", last_body.dump(), "application/json");
        REQUIRE(a);
        CHECK(a->status == 200);
        CHECK(body_of(a)["recorded"] == true);
        if (answered++ == 0) {
            // A double submit is acknowledged but logged once.
            auto again = client.Post(base + "/answer", last_body.dump(), "application/json");
            CHECK(again->status == 200);
            CHECK(body_of(again)["recorded"] == false);
            CHECK(body_of(client.Get(base))["answers"].size() == 1);
        }
    }
    auto result = client.Get(base + "/result");
    REQUIRE(result);
    CHECK(result->status == 200);
    const auto cert = body_of(result);
    CHECK(cert["assignment"] == Json::parse("[0, 1, 2]"));
    RentalOptions opt;
    opt.eps = 1e-2;
    CHECK(cert.dump() == to_json(solve_rental(3, simulated_oracle(diagonal3), opt)).dump());
    CHECK(body_of(client.Get(base))["answers"].size() == static_cast<std::size_t>(answered));
    CHECK(client.Post(base + "/answer", R"({"agent": 0, "room": 0})", "application/json")->status == 409);
}

TEST_CASE("HTTP errors")
{
    Running svc;
    httplib::Client client("127.0.0.1", svc.port);
    auto bad = client.Post("/sessions", R"({"n": 3, "room_names": ["a"]})", "application/json");
    CHECK(bad->status == 400);
    CHECK(body_of(bad)["error"]["field"] == "room_names");
    CHECK(client.Post("/sessions", "{nope", "application/json")->status == 400);
    CHECK(client.Get("/sessions/s99")->status == 404);

    const std::string id = body_of(client.Post("/sessions", R"({"n": 2})", "application/json"))["id"];
    const auto q = body_of(client.Get("/sessions/" + id + "/query"));
    const int other = 1 - q["agent"].get<int>();
    auto conflict = client.Post("/sessions/" + id + "/answer", Json{{"agent", other}, {"room", 0}}.dump(),
                                "application/json");
    CHECK(conflict->status == 409);
    CHECK(body_of(conflict)["error"]["field"] == "agent");
    auto invalid = client.Post("/sessions/" + id + "/answer", Json{{"agent", q["agent"]}, {"room", 5}}.dump(),
                               "application/json");
    CHECK(invalid->status == 422);
    CHECK(client.Options("/sessions")->status == 204);
}

TEST_CASE("simulated sessions over HTTP finish on creation")
{
    Running svc;
    httplib::Client client("127.0.0.1", svc.port);
    const Json body{{"n", 3}, {"mode", "simulated"}, {"utilities", diagonal3}};
    const std::string id = body_of(client.Post("/sessions", body.dump(), "application/json"))["id"];
    CHECK(client.Get("/sessions/" + id + "/query")->status == 204);
    const auto cert = body_of(client.Get("/sessions/" + id + "/result"));
    CHECK(cert["assignment"] == Json::parse("[0, 1, 2]"));
    for (const auto& g : cert["envy_gaps"]) CHECK(g.get<double>() <= 1e-4);
}
