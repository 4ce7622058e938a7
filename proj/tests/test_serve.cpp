#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "tremble/coassembly/coassembly.hpp"
#include "tremble/serve/playground.hpp"
#include "tremble/sim/simulator.hpp"
#include "tremble/solver/synthesis.hpp"

using namespace tremble;
using nlohmann::json;
using serve::PlaygroundService;

namespace {

json call(PlaygroundService& svc, const std::string& method, const std::string& path, const json& body, int want) {
    auto r = svc.handle(method, path, body.is_null() ? "" : body.dump());
    CHECK(r.status == want);
    return r.content_type == "application/json" ? json::parse(r.body) : json(r.body);
}

std::vector<json> lines(const std::string& text) {
    std::vector<json> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(json::parse(line));
    return out;
}

// Plays until the run ends, picking the hint or a pseudo-random successor.
void play(PlaygroundService& svc, const std::string& id, bool hinted, unsigned salt) {
    const std::string base = "/api/session/" + id;
    for (unsigned turn = 0;; ++turn) {
        auto v = call(svc, "GET", base, nullptr, 200);
        if (v["finished"].get<bool>()) return;
        auto st = call(svc, "POST", base + "/step", nullptr, 200);
        const auto& theta = st["theta"];
        REQUIRE(theta.size() >= 1);
        std::size_t k = (turn * 7 + salt) % theta.size();
        if (hinted) {
            auto h = call(svc, "GET", base + "/hint", nullptr, 200);
            k = h["choice_index"].get<std::size_t>();
            double lowest = 2;
            for (const auto& t : theta) lowest = std::min(lowest, t["value"].get<double>());
            CHECK(h["value_after"].get<double>() == lowest);
            for (std::size_t i = 0; i < k; ++i) CHECK(theta[i]["value"].get<double>() > lowest);
        }
        auto r = call(svc, "POST", base + "/resolve", {{"choice_index", k}}, 200);
        CHECK(r["state"]["placement"] == theta[k]["placement"]);
        CHECK(r["state"]["counter"] == theta[k]["counter"]);
    }
}

struct Replay {
    bool success;
    std::vector<domain::StateId> chosen;
};

// Rebuilds the instance from the transcript header and replays the recorded
// choices through the offline simulator.
Replay replay(const std::vector<json>& log) {
    const json& h = log.front();
    coassembly::BenchConfig cfg{h["N"].get<std::size_t>(), h["K"].get<std::size_t>(), h["p"].get<double>(),
                                h["goal"].get<std::vector<std::uint8_t>>()};
    auto inst = coassembly::build_coassembly(cfg);
    auto syn = solver::synthesize(inst.domain, inst.errors, inst.goal);
    std::vector<domain::StateId> script;
    for (std::size_t i = 1; i < log.size(); ++i)
        if (log[i].contains("chosen")) script.push_back(log[i]["chosen"].get<domain::StateId>());
    auto nature = sim::interactive([&](const sim::NatureQuery& q) {
        REQUIRE(q.step < script.size());
        auto it = std::find(q.theta.begin(), q.theta.end(), script[q.step]);
        REQUIRE(it != q.theta.end());
        return static_cast<std::size_t>(it - q.theta.begin());
    });
    auto r = sim::run(inst.domain, inst.errors, syn.strategy, nature, h["seed"].get<std::uint64_t>(),
                      h["max_steps"].get<std::size_t>());
    Replay out{r.success, {}};
    for (const auto& s : r.path) out.chosen.push_back(s.chosen);
    return out;
}

}  // namespace

TEST_CASE("session creation") {
    PlaygroundService svc;
    auto j = call(svc, "POST", "/api/session", {{"N", 3}, {"K", 2}, {"p", 0.05}}, 201);
    CHECK(j["value"].get<double>() == coassembly::run_instance({3, 2, 0.05}).value);
    CHECK(j["state"]["placement"] == json::array({0, 0, 0}));
    CHECK(j["state"]["grid"][1] == json::array({true, false, false, false}));
    CHECK(j["state"]["counter"] == 0);
    CHECK(j["state"]["in_goal"] == false);
    CHECK(j["intended_action"]["name"].is_string());
    auto v = call(svc, "GET", "/api/session/" + j["id"].get<std::string>(), nullptr, 200);
    CHECK(v["value_here"] == j["value"]);
    CHECK(v["intended_action"] == j["intended_action"]);
    CHECK(svc.num_sessions() == 1);
}

TEST_CASE("request errors") {
    PlaygroundService svc;
    CHECK(svc.handle("POST", "/api/session", "{not json").status == 400);
    CHECK(svc.handle("POST", "/api/session", R"({"N": 9, "K": 0, "p": 0})").status == 400);
    CHECK(svc.handle("POST", "/api/session", R"({"N": 3, "K": 0})").status == 400);
    CHECK(svc.handle("POST", "/api/session", R"({"N": 3, "K": 0, "p": 2})").status == 400);
    CHECK(svc.handle("POST", "/api/session", R"({"N": 3, "K": 0, "p": 0, "goal": [1, 1, 2]})").status == 400);
    CHECK(svc.handle("GET", "/api/session/nope", "").status == 404);
    CHECK(svc.handle("GET", "/api/other", "").status == 404);

    auto id = call(svc, "POST", "/api/session", {{"N", 2}, {"K", 1}, {"p", 0.05}}, 201)["id"].get<std::string>();
    const std::string base = "/api/session/" + id;
    call(svc, "POST", base + "/resolve", {{"choice_index", 0}}, 409);
    call(svc, "GET", base + "/hint", nullptr, 409);
    auto st = call(svc, "POST", base + "/step", nullptr, 200);
    call(svc, "POST", base + "/step", nullptr, 409);
    call(svc, "POST", base + "/resolve", {{"choice_index", st["theta"].size()}}, 409);
    call(svc, "POST", base + "/resolve", {{"choice_index", -1}}, 409);
    call(svc, "POST", base + "/resolve", {{"index", 0}}, 400);
    CHECK(svc.handle("GET", base + "/step", "").status == 405);
    call(svc, "POST", base + "/resolve", {{"choice_index", 0}}, 200);
}

TEST_CASE("hinted play matches the offline adversarial run") {
    PlaygroundService svc;
    auto j = call(svc, "POST", "/api/session", {{"N", 3}, {"K", 2}, {"p", 0.05}, {"seed", 11}}, 201);
    const std::string id = j["id"].get<std::string>();
    play(svc, id, true, 0);
    auto log = lines(call(svc, "GET", "/api/session/" + id + "/log", nullptr, 200).get<std::string>());
    REQUIRE(log.size() >= 3);
    CHECK(log.back()["success"] == true);

    auto inst = coassembly::build_coassembly({3, 2, 0.05});
    auto syn = solver::synthesize(inst.domain, inst.errors, inst.goal);
    auto offline = sim::run(inst.domain, inst.errors, syn.strategy, sim::adversarial_greedy(syn.strategy), 11,
                            sim::default_max_steps(*syn.strategy));
    REQUIRE(offline.path.size() + 2 == log.size());
    for (std::size_t i = 0; i < offline.path.size(); ++i)
        CHECK(log[i + 1] == sim::step_to_json(*syn.strategy, offline.path[i]));
    CHECK(offline.success == log.back()["success"].get<bool>());
}

TEST_CASE("transcripts replay to the same success flag") {
    PlaygroundService svc;
    for (unsigned salt = 0; salt < 8; ++salt) {
        json req{{"N", 2 + salt % 2}, {"K", salt % 3}, {"p", salt % 2 ? 0.05 : 0.2}, {"seed", 100 + salt}};
        if (salt == 5) req["goal"] = {3, 1, 2};
        const auto id = call(svc, "POST", "/api/session", req, 201)["id"].get<std::string>();
        play(svc, id, salt % 4 == 0, salt);
        auto log = lines(call(svc, "GET", "/api/session/" + id + "/log", nullptr, 200).get<std::string>());
        const auto r = replay(log);
        CAPTURE(salt);
        CHECK(r.success == log.back()["success"].get<bool>());
        CHECK(r.chosen.size() == log.back()["steps"].get<std::size_t>());
    }
}

TEST_CASE("concurrent sessions") {
    PlaygroundService svc;
    std::vector<std::thread> workers;
    std::vector<int> ok(4, 0);
    for (int w = 0; w < 4; ++w) {
        workers.emplace_back([&, w] {
            auto r = svc.handle("POST", "/api/session", json{{"N", 2}, {"K", 1}, {"p", 0.05}}.dump());
            if (r.status != 201) return;
            const std::string base = "/api/session/" + json::parse(r.body)["id"].get<std::string>();
            for (int t = 0; t < 50; ++t) {
                if (json::parse(svc.handle("GET", base, "").body)["finished"].get<bool>()) break;
                if (svc.handle("POST", base + "/step", "").status != 200) return;
                if (svc.handle("POST", base + "/resolve", R"({"choice_index": 0})").status != 200) return;
            }
            ok[w] = 1;
        });
    }
    for (auto& t : workers) t.join();
    CHECK(ok == std::vector<int>(4, 1));
    CHECK(svc.num_sessions() == 4);
}

TEST_CASE("http round trip") {
    PlaygroundService svc;
    serve::HttpServer server(svc);
    const int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread t([&] { server.run(); });
    httplib::Client cli("127.0.0.1", port);
    auto created = cli.Post("/api/session", R"({"N": 2, "K": 0, "p": 0})", "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    const auto id = json::parse(created->body)["id"].get<std::string>();
    auto missing = cli.Get("/api/session/zzz");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    auto step = cli.Post("/api/session/" + id + "/step", "", "application/json");
    REQUIRE(step);
    CHECK(step->status == 200);
    CHECK(json::parse(step->body)["theta"].size() == 1);
    server.stop();
    t.join();
}
