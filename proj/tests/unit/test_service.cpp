#include "ina/service.hpp"

#include "../support.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <thread>

using namespace ina;
using nlohmann::json;

namespace {

std::shared_ptr<const ModelBundle> toy() {
    static const auto bundle = std::make_shared<const ModelBundle>(test::toy_bundle().bundle);
    return bundle;
}

}  // namespace

TEST_SUITE("web-console-api") {

TEST_CASE("handlers before a bundle is loaded") {
    QaService svc;
    CHECK(!svc.ready());
    CHECK(svc.health().status == 200);
    CHECK(json::parse(svc.health().body) == "ok");
    CHECK(svc.ask(R"({"question":"Where do men go?"})").status == 503);
    CHECK(svc.model_info().status == 503);
}

TEST_CASE("ask handler") {
    QaService svc;
    svc.set_bundle(toy());
    auto r = svc.ask(R"({"question":"Where do men go?"})");
    REQUIRE(r.status == 200);
    auto j = json::parse(r.body);
    CHECK(j["answer"] == "Men go to work");
    CHECK(j["rejected"] == false);
    CHECK(j["confidence"].get<double>() > 0.0);
    CHECK(j["trace"]["steps"].size() == 5);

    j = json::parse(svc.ask(R"({"question":"Is a hexagonal moon tasty?"})").body);
    CHECK(j["answer"].is_null());
    CHECK(j["rejected"] == true);
    CHECK(j["reason"] == "NoEvidence");

    j = json::parse(svc.ask(R"({"question":"Where do men go?","threshold":1.0})").body);
    CHECK(j["reason"] == "LowConfidence");

    for (const char* body : {"", "{", "[]", R"({"q":"x"})", R"({"question":5})", R"({"question":"x","threshold":2})",
                             R"({"question":"x","threshold":"high"})"}) {
        CAPTURE(body);
        CHECK(svc.ask(body).status == 400);
    }
    r = svc.ask(R"({"question":"?!"})");
    CHECK(r.status == 422);
    CHECK(json::parse(r.body)["error"] == "EmptyQuestion");
}

TEST_CASE("model handler") {
    QaService svc;
    svc.set_bundle(toy());
    const auto j = json::parse(svc.model_info().body);
    CHECK(j["mlsu_count"] == 2);
    CHECK(j["pos_model_trained"] == true);
    CHECK(j["format_version"] == 1);
    CHECK(!j.contains("files"));
    CHECK(j["models"].size() == 6);
}

TEST_CASE("live HTTP server") {
    QaService svc;
    HttpServer server(svc, ServeOptions{"127.0.0.1", 0, std::nullopt});
    const int port = server.bind();
    REQUIRE(port > 0);
    std::thread loop([&] { server.listen(); });

    httplib::Client client("127.0.0.1", port);
    client.set_connection_timeout(5);
    auto res = client.Get("/healthz");
    REQUIRE(res);
    CHECK(res->status == 200);
    res = client.Post("/api/ask", R"({"question":"Where do men go?"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 503);

    svc.set_bundle(toy());
    res = client.Post("/api/ask", R"({"question":"Where do men go?"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["answer"] == "Men go to work");
    res = client.Post("/api/ask", "nope", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    res = client.Get("/api/model");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type").starts_with("application/json"));

    server.stop();
    loop.join();
}

}  // TEST_SUITE
