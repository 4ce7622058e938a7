#include "tremble/serve/playground.hpp"

#include <random>
#include <sstream>

#include "tremble/coassembly/coassembly.hpp"
#include "tremble/errors.hpp"
#include "tremble/sim/simulator.hpp"
#include "tremble/solver/synthesis.hpp"

namespace tremble::serve {

using nlohmann::json;
using solver::ProductState;

struct PlaygroundService::Session {
    std::mutex mu;
    std::string id;
    std::uint64_t seed = 0;
    std::size_t max_steps = 0;
    std::unique_ptr<coassembly::Instance> inst;
    std::shared_ptr<const solver::Strategy> strategy;
    std::unique_ptr<sim::Execution> run;
};

namespace {

Reply json_reply(int status, const json& j) { return {status, j.dump(), "application/json"}; }
Reply error(int status, const std::string& msg) { return json_reply(status, {{"error", msg}}); }

json action_view(const coassembly::Instance& inst, domain::ActionId a) {
    const std::size_t n = inst.config.N;
    json j{{"id", a}, {"name", inst.action_name(a)}};
    if (a == coassembly::do_nothing_action(n)) {
        j["object"] = nullptr;
        j["location"] = nullptr;
    } else {
        j["object"] = a / (n + 1) + 1;
        j["location"] = a % (n + 1);
    }
    return j;
}

json state_view(const coassembly::Instance& inst, const solver::Strategy& st, ProductState ps) {
    const std::size_t n = inst.config.N;
    const auto& cs = inst.states[ps.s];
    json grid = json::array(), objects = json::array(), locations = json::array({"S"});
    for (std::size_t i = 0; i < n; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j <= n; ++j) row.push_back(cs.placement[i] == j);
        grid.push_back(std::move(row));
        objects.push_back("Obj" + std::to_string(i + 1));
        locations.push_back("L" + std::to_string(i + 1));
    }
    return {{"domain_state", ps.s},
            {"grid", std::move(grid)},
            {"objects", std::move(objects)},
            {"locations", std::move(locations)},
            {"placement", cs.placement},
            {"goal", inst.config.goal},
            {"counter", cs.c},
            {"K", inst.config.K},
            {"q", ltlf::to_string(st.dfa().formula(ps.q))},
            {"in_goal", st.goal(ps)},
            {"value", st.value_at(ps)}};
}

ProductState successor(const solver::Strategy& st, ProductState from, domain::StateId t) {
    return {t, st.dfa().step(from.q, st.model().label(t))};
}

std::size_t integer_field(const json& body, const char* name, std::size_t lo, std::size_t hi) {
    if (!body.contains(name) || !body[name].is_number_integer()) throw InputError(std::string("missing integer ") + name);
    const auto v = body[name].get<long long>();
    if (v < static_cast<long long>(lo) || v > static_cast<long long>(hi)) {
        throw InputError(std::string(name) + " must lie in " + std::to_string(lo) + ".." + std::to_string(hi));
    }
    return static_cast<std::size_t>(v);
}

json parse_body(const std::string& body) {
    if (body.empty()) return json::object();
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw InputError("body is not a JSON object");
    return j;
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(path);
    while (std::getline(in, part, '/'))
        if (!part.empty()) parts.push_back(part);
    return parts;
}

}  // namespace

PlaygroundService::PlaygroundService() : salt_(std::random_device{}()) {}
PlaygroundService::~PlaygroundService() = default;

std::size_t PlaygroundService::num_sessions() const {
    std::shared_lock lock(mu_);
    return sessions_.size();
}

std::shared_ptr<PlaygroundService::Session> PlaygroundService::find(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

Reply PlaygroundService::handle(const std::string& method, const std::string& path, const std::string& body) {
    const auto parts = split_path(path);
    if (parts.size() < 2 || parts[0] != "api" || parts[1] != "session" || parts.size() > 4)
        return error(404, "no such endpoint");
    try {
        if (parts.size() == 2) {
            if (method != "POST") return error(405, "use POST");
            return create(body);
        }
        auto s = find(parts[2]);
        if (!s) return error(404, "unknown session " + parts[2]);
        std::lock_guard lock(s->mu);
        const std::string verb = parts.size() == 4 ? parts[3] : "";
        const std::string want = verb == "step" || verb == "resolve" ? "POST" : "GET";
        if (verb != "" && verb != "step" && verb != "resolve" && verb != "hint" && verb != "log")
            return error(404, "no such endpoint");
        if (method != want) return error(405, "use " + want);
        if (verb == "") return view(*s);
        if (verb == "step") return step(*s);
        if (verb == "resolve") return resolve(*s, body);
        if (verb == "hint") return hint(*s);
        return log(*s);
    } catch (const InputError& e) {
        return error(400, e.what());
    } catch (const std::exception& e) {
        return error(500, e.what());
    }
}

Reply PlaygroundService::create(const std::string& body) {
    const json j = parse_body(body);
    coassembly::BenchConfig cfg;
    cfg.N = integer_field(j, "N", 2, kMaxObjects);
    cfg.K = integer_field(j, "K", 0, kMaxBudget);
    if (!j.contains("p") || !j["p"].is_number()) throw InputError("missing number p");
    cfg.p = j["p"].get<double>();
    if (j.contains("goal")) {
        if (!j["goal"].is_array()) throw InputError("goal must be an array of locations");
        for (const auto& g : j["goal"]) {
            if (!g.is_number_integer() || g.get<long long>() < 0 || g.get<long long>() > static_cast<long long>(cfg.N))
                throw InputError("goal entries must be locations 0.." + std::to_string(cfg.N));
            cfg.goal.push_back(static_cast<std::uint8_t>(g.get<long long>()));
        }
    }

    auto s = std::make_shared<Session>();
    s->inst = std::make_unique<coassembly::Instance>(coassembly::build_coassembly(cfg));
    auto syn = solver::synthesize(s->inst->domain, s->inst->errors, s->inst->goal);
    s->strategy = syn.strategy;
    s->max_steps = sim::default_max_steps(*s->strategy);
    {
        std::unique_lock lock(mu_);
        const std::uint64_t n = next_++;
        s->seed = j.contains("seed") && j["seed"].is_number_unsigned() ? j["seed"].get<std::uint64_t>() : n;
        std::ostringstream id;
        id << std::hex << (std::mt19937_64(salt_ ^ (n * 0x9e3779b97f4a7c15ULL))() & 0xffffffffffffULL) << '-' << n;
        s->id = id.str();
        sessions_[s->id] = s;
    }
    s->run = std::make_unique<sim::Execution>(s->inst->domain, s->inst->errors, s->strategy, s->seed, s->max_steps);
    std::lock_guard lock(s->mu);
    json out = json::parse(view(*s).body);
    return json_reply(201, {{"id", s->id}, {"value", s->strategy->value()}, {"seed", s->seed}, {"state", out["state"]},
                            {"intended_action", out["intended_action"]}});
}

Reply PlaygroundService::view(Session& s) {
    const auto& run = *s.run;
    const auto cur = run.current();
    json intended = nullptr;
    if (!run.finished()) intended = action_view(*s.inst, s.strategy->action(cur));
    return json_reply(200, {{"id", s.id},
                            {"state", state_view(*s.inst, *s.strategy, cur)},
                            {"value_here", s.strategy->value_at(cur)},
                            {"intended_action", intended},
                            {"pending", run.pending().has_value()},
                            {"steps", run.step()},
                            {"finished", run.finished()},
                            {"outcome", sim::to_string(run.outcome())}});
}

Reply PlaygroundService::step(Session& s) {
    auto& run = *s.run;
    if (run.finished()) return error(409, "the run has finished (" + sim::to_string(run.outcome()) + ")");
    if (run.pending()) return error(409, "a step is already pending; resolve it first");
    const auto& p = run.propose();
    json theta = json::array();
    for (std::size_t k = 0; k < p.theta.size(); ++k) {
        json v = state_view(*s.inst, *s.strategy, successor(*s.strategy, run.current(), p.theta[k]));
        v["choice_index"] = k;
        theta.push_back(std::move(v));
    }
    return json_reply(200, {{"intended", action_view(*s.inst, p.intended)},
                            {"instructed", action_view(*s.inst, p.instructed)},
                            {"slipped", p.intended != p.instructed},
                            {"theta", std::move(theta)}});
}

Reply PlaygroundService::resolve(Session& s, const std::string& body) {
    const json j = parse_body(body);
    if (!j.contains("choice_index") || !j["choice_index"].is_number_integer())
        throw InputError("missing integer choice_index");
    auto& run = *s.run;
    if (!run.pending()) return error(409, "no pending step; call step first");
    const auto k = j["choice_index"].get<long long>();
    const auto size = run.pending()->theta.size();
    if (k < 0 || static_cast<std::size_t>(k) >= size) {
        return error(409, "choice_index " + std::to_string(k) + " is outside the " + std::to_string(size) +
                              " possible successors");
    }
    run.resolve(static_cast<std::size_t>(k));
    json out = json::parse(view(s).body);
    out["success"] = run.outcome() == sim::Outcome::Goal;
    return json_reply(200, out);
}

Reply PlaygroundService::hint(Session& s) {
    const auto& run = *s.run;
    if (!run.pending()) return error(409, "no pending step; call step first");
    const auto& theta = run.pending()->theta;
    const std::size_t k = sim::greedy_index(*s.strategy, run.current(), theta);
    return json_reply(200, {{"choice_index", k},
                            {"value_after", s.strategy->value_at(successor(*s.strategy, run.current(), theta[k]))}});
}

Reply PlaygroundService::log(Session& s) {
    const auto& run = *s.run;
    const auto& cfg = s.inst->config;
    json header{{"session", s.id},        {"N", cfg.N},   {"K", cfg.K},
                {"p", cfg.p},             {"goal", cfg.goal}, {"seed", s.seed},
                {"max_steps", s.max_steps}, {"value", s.strategy->value()}};
    std::string out = header.dump() + '\n' + sim::run_log(*s.strategy, run.path());
    if (run.finished()) {
        out += json{{"outcome", sim::to_string(run.outcome())},
                    {"success", run.outcome() == sim::Outcome::Goal},
                    {"steps", run.step()}}
                   .dump() +
               '\n';
    }
    return {200, out, "application/x-ndjson"};
}

}  // namespace tremble::serve
