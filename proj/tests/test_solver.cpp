#include <random>
#include <thread>

#include "doctest.h"
#include "support/oracles.hpp"
#include "support/random_models.hpp"
#include "tremble/errors.hpp"
#include "tremble/ltlf/parser.hpp"
#include "tremble/solver/synthesis.hpp"

using namespace tremble;
using namespace tremble::solver;
using abstraction::Mdpst;
using domain::Domain;
using domain::DomainKind;
using domain::ErrorModel;

namespace {

using Choices = std::vector<std::vector<Mdpst::Choice>>;

// states: 0 open, 1 goal, 2 sink
SubMdpst one_step(std::vector<abstraction::SetMass> outcomes) {
    Choices c(3);
    c[0].push_back({0, std::move(outcomes)});
    return SubMdpst::from_choices(0, {Role::Open, Role::Goal, Role::Sink}, c);
}

std::shared_ptr<const ltlf::Dfa> dfa_for(const std::string& text, const ltlf::PropSet& props) {
    return std::make_shared<const ltlf::Dfa>(ltlf::parse(text, props), props);
}

Domain chain(std::size_t n, std::vector<std::string> props, std::vector<std::vector<std::string>> labels,
             std::vector<domain::Transition> tr, std::vector<domain::ActionInfo> actions = {{"go"}}) {
    ltlf::PropSet ps(props);
    std::vector<domain::DomainState> st(n);
    for (std::size_t s = 0; s < n; ++s) st[s].label = ltlf::Interpretation::of(ps, labels[s]);
    return Domain(DomainKind::Nondet, ps, st, actions, 0, tr);
}

double worst_value_of(const SubMdpst& z, const std::vector<ActionId>& actions) {
    std::vector<std::uint32_t> pick(z.num_states(), 0);
    for (std::uint32_t s = 0; s < z.num_states(); ++s) {
        if (z.role[s] != Role::Open) continue;
        for (auto c = z.choice_begin[s]; c < z.choice_begin[s + 1]; ++c)
            if (z.action[c] == actions[s]) pick[s] = c;
    }
    return testing::worst_nature_value(z, pick);
}

}  // namespace

TEST_CASE("product construction") {
    ltlf::PropSet props{"a"};
    SUBCASE("goal satisfied by the initial label") {
        Domain d = chain(1, {"a"}, {{"a"}}, {{0, 0, {0}}});
        auto p = build_product(std::make_shared<Mdpst>(abstraction::abstract(d, ErrorModel::uniform_slip(0))),
                               dfa_for("F a", props));
        CHECK(p->goal(p->initial()));
    }
    SUBCASE("two-state chain") {
        Domain d = chain(2, {"a"}, {{}, {"a"}}, {{0, 0, {1}}, {1, 0, {1}}});
        auto p = build_product(std::make_shared<Mdpst>(abstraction::abstract(d, ErrorModel::uniform_slip(0))),
                               dfa_for("F a", props));
        CHECK(p->num_states() == 2);
        CHECK_FALSE(p->goal(0));
        CHECK(p->goal(1));
        CHECK(p->state(1).s == 1);
    }
}

TEST_CASE("product projects onto the model") {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 60; ++round) {
        Domain d = testing::random_domain(rng, 2 + rng() % 4, 1 + rng() % 3, round % 2);
        auto m = std::make_shared<Mdpst>(abstraction::abstract(d, testing::random_errors(rng, d)));
        auto p = build_product(m, dfa_for(round % 3 ? "F g" : "G(g -> X !g) & F(g & X g)", d.props()));
        for (std::uint32_t id = 0; id < p->num_states(); ++id) {
            const auto ps = p->state(id);
            const auto& lifted = p->choices(id);
            const auto& base = m->choices(ps.s);
            REQUIRE(lifted.size() == base.size());
            for (std::size_t c = 0; c < base.size(); ++c) {
                CHECK(lifted[c].action == base[c].action);
                REQUIRE(lifted[c].outcomes.size() == base[c].outcomes.size());
                for (std::size_t o = 0; o < base[c].outcomes.size(); ++o) {
                    std::vector<StateId> proj;
                    for (auto t : lifted[c].outcomes[o].theta) {
                        proj.push_back(p->state(t).s);
                        CHECK(p->state(t).q == p->dfa().step(ps.q, m->label(p->state(t).s)));
                    }
                    std::sort(proj.begin(), proj.end());
                    CHECK(proj == base[c].outcomes[o].theta);
                    CHECK(lifted[c].outcomes[o].mass == base[c].outcomes[o].mass);
                }
            }
        }
    }
}

TEST_CASE("partition") {
    ltlf::PropSet props{"a", "b"};
    // 0 -go-> {1, 2}; 1 is labeled a; 2 is a dead end; 3 is never reached
    Domain d = chain(4, {"a", "b"}, {{}, {"a"}, {}, {"a"}}, {{0, 0, {1, 2}}, {1, 0, {1}}, {2, 0, {2}}, {3, 0, {3}}});
    auto m = std::make_shared<Mdpst>(abstraction::abstract(d, ErrorModel::uniform_slip(0)));
    auto p = build_product(m, dfa_for("F a", props));
    Partition part = partition(*p);
    CHECK(part.relevant + part.dead + part.unreachable == p->num_states());
    CHECK(part.region[p->initial()] == Region::Relevant);
    const auto dead = p->find({2, p->state(0).q});
    REQUIRE(dead >= 0);
    CHECK(part.region[dead] == Region::Dead);
    for (std::uint32_t s = 0; s < p->num_states(); ++s)
        if (p->goal(s)) CHECK(part.region[s] == Region::Relevant);

    SubMdpst z = make_sub(*p, part);
    const auto v = robust_vi(z);
    CHECK(v.v[z.initial] == 0.0);  // nature picks the dead end

    auto unreachable = synthesize(d, ErrorModel::uniform_slip(0), ltlf::parse("F b", props));
    CHECK(unreachable.partition.relevant == 0);
    CHECK(unreachable.value() == 0.0);
    CHECK_FALSE(unreachable.sub.has_value());
    CHECK_THROWS_AS(make_sub(*unreachable.product, unreachable.partition), EmptyRelevantRegion);
}

TEST_CASE("sub-model shape") {
    ltlf::PropSet props{"a"};
    // 0 has actions x: {1, 2} and y: {0}; 1 is the goal, 2 is dead
    Domain d = chain(3, {"a"}, {{}, {"a"}, {}}, {{0, 0, {1, 2}}, {0, 1, {0}}, {1, 0, {1}}, {2, 0, {2}}},
                     {{"x"}, {"y"}});
    auto s = synthesize(d, ErrorModel::uniform_slip(0), ltlf::parse("F a", props));
    REQUIRE(s.sub);
    const SubMdpst& z = *s.sub;
    for (std::uint32_t i = 0; i < z.num_states(); ++i) {
        if (z.goal(i) || z.sink(i)) {
            REQUIRE(z.choice_begin[i + 1] - z.choice_begin[i] == 1);
            CHECK(z.action[z.choice_begin[i]] == kEpsilonAction);
            CHECK(z.mass[z.outcome_begin[z.choice_begin[i]]] == 1.0);
        }
    }
    const auto init = z.initial;
    REQUIRE(z.choice_begin[init + 1] - z.choice_begin[init] == 2);
    const auto c = z.choice_begin[init];
    REQUIRE(z.elem_begin[z.outcome_begin[c] + 1] - z.elem_begin[z.outcome_begin[c]] == 2);
    std::size_t sinks = 0;
    for (std::uint32_t i = 0; i < z.num_states(); ++i) sinks += z.sink(i);
    CHECK(sinks == 1);
    CHECK(s.value() == 0.0);
}

TEST_CASE("robust value iteration examples") {
    CHECK(robust_vi(one_step({{{1}, 0.9}, {{2}, 0.1}})).v[0] == doctest::Approx(0.9));
    CHECK(robust_vi(one_step({{{1, 2}, 1.0}})).v[0] == 0.0);
    CHECK(robust_vi(one_step({{{1}, 0.5}, {{1, 2}, 0.5}})).v[0] == doctest::Approx(0.5));
    CHECK_THROWS_AS(robust_vi(one_step({{{1}, 1.0}}), {0.0}), InputError);
    auto v = robust_vi(one_step({{{1}, 0.9}, {{2}, 0.1}}));
    CHECK(v.v[1] == 1.0);
    CHECK(v.v[2] == 0.0);
}

TEST_CASE("extreme-distribution backup examples") {
    SubMdpst single = one_step({{{1}, 0.9}, {{2}, 0.1}});
    CHECK(testing::extreme_backup(single, 0, {0.3, 1.0, 0.0}) == 0.9);
    SubMdpst set = one_step({{{0, 1, 2}, 1.0}});
    CHECK(testing::extreme_backup(set, 0, {0.3, 1.0, 0.2}) == 0.2);
}

TEST_CASE("set backup equals enumeration of extreme distributions") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int round = 0; round < 200; ++round) {
        SubMdpst z = testing::random_sub(rng);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<double> v(z.num_states());
            for (std::uint32_t s = 0; s < v.size(); ++s) v[s] = z.goal(s) ? 1.0 : z.sink(s) ? 0.0 : u(rng);
            for (std::uint32_t s = 0; s < z.num_states(); ++s)
                if (z.role[s] == Role::Open) CHECK(backup(z, s, v) == testing::extreme_backup(z, s, v));
        }
        const auto vi = robust_vi(z);
        for (std::uint32_t s = 0; s < z.num_states(); ++s)
            if (z.role[s] == Role::Open) CHECK(backup(z, s, vi.v) == testing::extreme_backup(z, s, vi.v));
    }
}

TEST_CASE("value iteration matches the brute-force oracle") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 200; ++round) {
        SubMdpst z = testing::random_sub(rng);
        const double want = testing::oracle_value(z);
        CHECK(std::abs(robust_vi(z, {1e-7}).v[z.initial] - want) < 1e-4);
    }
    CHECK(testing::oracle_value(one_step({{{1}, 0.9}, {{2}, 0.1}})) == doctest::Approx(0.9));
    CHECK(testing::oracle_value(one_step({{{1, 2}, 1.0}})) == 0.0);
}

TEST_CASE("singleton models agree with classical value iteration") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 100; ++round) {
        SubMdpst z = testing::random_sub(rng, 6, true);
        const auto want = testing::classical_vi(z);
        const auto got = robust_vi(z, {1e-10});
        for (std::uint32_t s = 0; s < z.num_states(); ++s) CHECK(std::abs(got.v[s] - want[s]) < 1e-6);
    }
}

TEST_CASE("sweeps are monotone and stop at a near fixed point") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 100; ++round) {
        SubMdpst z = testing::random_sub(rng);
        for (double eps : {1e-2, 1e-3, 1e-6}) {
            const auto vi = robust_vi(z, {eps});
            CHECK(vi.residual < eps);
            for (std::uint32_t s = 0; s < z.num_states(); ++s) {
                CHECK(vi.v[s] >= 0.0);
                CHECK(vi.v[s] <= 1.0);
                CHECK(std::abs(vi.v[s] - backup(z, s, vi.v)) < eps);
            }
        }
        // one sweep at a time, values never decrease
        std::vector<double> prev;
        for (double eps : {0.5, 0.25, 0.1, 0.01}) {
            const auto vi = robust_vi(z, {eps});
            if (!prev.empty())
                for (std::uint32_t s = 0; s < z.num_states(); ++s) CHECK(vi.v[s] >= prev[s]);
            prev = vi.v;
        }
    }
}

TEST_CASE("jacobi sweeps agree and do not depend on the worker count") {
    std::mt19937_64 rng(8);
    for (int round = 0; round < 50; ++round) {
        SubMdpst z = testing::random_sub(rng);
        const auto gs = robust_vi(z, {1e-6});
        const auto j1 = robust_vi(z, {1e-6, Sweep::Jacobi, 1});
        const auto j4 = robust_vi(z, {1e-6, Sweep::Jacobi, 4});
        CHECK(j1.v == j4.v);
        CHECK(j1.iterations == j4.iterations);
        const double truth = testing::oracle_value(z);
        CHECK(std::abs(j1.v[z.initial] - truth) < 1e-4);
        CHECK(std::abs(gs.v[z.initial] - j1.v[z.initial]) < 1e-4);
    }
}

TEST_CASE("strategy extraction") {
    SUBCASE("argmax") {
        Choices c(3);
        c[0].push_back({0, {{{1}, 0.5}, {{2}, 0.5}}});
        c[0].push_back({1, {{{1}, 0.9}, {{2}, 0.1}}});
        SubMdpst z = SubMdpst::from_choices(0, {Role::Open, Role::Goal, Role::Sink}, c);
        CHECK(choose_actions(z, robust_vi(z))[0] == 1);
    }
    SUBCASE("exact tie takes the lower action id") {
        Choices c(3);
        c[0].push_back({4, {{{1}, 0.5}, {{2}, 0.5}}});
        c[0].push_back({2, {{{1}, 0.5}, {{2}, 0.5}}});
        SubMdpst z = SubMdpst::from_choices(0, {Role::Open, Role::Goal, Role::Sink}, c);
        CHECK(choose_actions(z, robust_vi(z))[0] == 2);
    }
    SUBCASE("an optimal self-loop does not trap the strategy") {
        // 0 -wait-> {0}, 0 -go-> {1}: both back up to 1 once V(0) = 1
        Choices c(2);
        c[0].push_back({0, {{{0}, 1.0}}});
        c[0].push_back({1, {{{1}, 1.0}}});
        SubMdpst z = SubMdpst::from_choices(0, {Role::Open, Role::Goal}, c);
        auto vi = robust_vi(z);
        CHECK(vi.v[0] == 1.0);
        CHECK(choose_actions(z, vi)[0] == 1);
    }
}

TEST_CASE("extracted strategies achieve the computed value") {
    std::mt19937_64 rng(31);
    for (int round = 0; round < 200; ++round) {
        SubMdpst z = testing::random_sub(rng);
        const auto vi = robust_vi(z);
        const auto actions = choose_actions(z, vi);
        CHECK(worst_value_of(z, actions) >= vi.v[z.initial] - 1e-3);
    }
}

TEST_CASE("removing dead states leaves relevant values unchanged") {
    std::mt19937_64 rng(41);
    for (int round = 0; round < 40; ++round) {
        Domain d = testing::random_domain(rng, 2 + rng() % 4, 1 + rng() % 3, round % 2);
        ErrorModel e = testing::random_errors(rng, d);
        auto s = synthesize(d, e, ltlf::parse(round % 3 ? "F g" : "X X g", d.props()), {{1e-10}});
        const auto& p = *s.product;
        // robust iteration over the whole product, goals absorbing
        std::vector<double> v(p.num_states(), 0.0);
        for (std::uint32_t i = 0; i < v.size(); ++i) v[i] = p.goal(i) ? 1.0 : 0.0;
        for (int it = 0; it < 100000; ++it) {
            double delta = 0;
            auto next = v;
            for (std::uint32_t i = 0; i < v.size(); ++i) {
                if (p.goal(i)) continue;
                double best = 0;
                for (const auto& c : p.choices(i)) {
                    double sum = 0;
                    for (const auto& o : c.outcomes) {
                        double lo = 1;
                        for (auto t : o.theta) lo = std::min(lo, v[t]);
                        sum += o.mass * lo;
                    }
                    best = std::max(best, sum);
                }
                delta = std::max(delta, best - v[i]);
                next[i] = best;
            }
            v = next;
            if (delta < 1e-12) break;
        }
        for (std::uint32_t i = 0; i < p.num_states(); ++i) {
            if (s.partition.region[i] == Region::Dead) CHECK(v[i] == 0.0);
        }
        if (!s.sub) {
            CHECK(v[p.initial()] == 0.0);
            continue;
        }
        for (std::uint32_t k = 0; k < s.sub->num_states(); ++k)
            if (!s.sub->sink(k)) CHECK(std::abs(s.values.v[k] - v[s.sub->origin[k]]) < 1e-6);
    }
}

TEST_CASE("advance") {
    ltlf::PropSet props{"a"};
    Domain d = chain(3, {"a"}, {{}, {}, {"a"}}, {{0, 0, {1}}, {1, 0, {2}}, {2, 0, {2}}});
    auto s = synthesize(d, ErrorModel::uniform_slip(0), ltlf::parse("F a", props));
    const Strategy& st = *s.strategy;
    CHECK(s.value() == 1.0);
    ProductState cur = st.initial();
    CHECK_THROWS_AS(advance(st, *s.dfa, cur, 2), IllegalObservation);
    cur = advance(st, *s.dfa, cur, 1);
    CHECK_FALSE(st.goal(cur));
    cur = advance(st, *s.dfa, cur, 2);
    CHECK(s.dfa->accepting(cur.q));

    // a strategy missing an entry for a relevant state is a gap
    Strategy gap(s.model, s.dfa, st.initial(), {}, {st.initial()}, 1.0, 1e-3, 1, 0.0);
    CHECK_THROWS_AS(gap.action(st.initial()), StrategyGap);
}

TEST_CASE("advancing replays the automaton run") {
    std::mt19937_64 rng(12);
    for (int round = 0; round < 50; ++round) {
        Domain d = testing::random_domain(rng, 3 + rng() % 3, 1 + rng() % 2, false);
        auto s = synthesize(d, ErrorModel::uniform_slip(0.1), ltlf::parse("G(g -> X !g) U (g & X g)", d.props()));
        if (s.value() == 0) continue;
        const Strategy& st = *s.strategy;
        ProductState cur = st.initial();
        ltlf::Trace trace{d.label(cur.s)};
        for (int step = 0; step < 12 && !st.goal(cur) && st.relevant(cur); ++step) {
            const auto succ = abstraction::post(*s.model, cur.s, st.action(cur));
            cur = advance(st, *s.dfa, cur, succ[rng() % succ.size()]);
            trace.push_back(d.label(cur.s));
            CHECK(s.dfa->accepting(cur.q) == s.dfa->accepts(trace));
            ltlf::DfaState q = s.dfa->initial();
            for (auto sigma : trace) q = s.dfa->step(q, sigma);
            CHECK(q == cur.q);
        }
    }
}

TEST_CASE("strategy JSON is deterministic") {
    std::mt19937_64 rng(3);
    Domain d = testing::random_domain(rng, 5, 3, false);
    ErrorModel e = testing::random_errors(rng, d);
    auto a = synthesize(d, e, ltlf::parse("F g", d.props()));
    auto b = synthesize(d, e, ltlf::parse("F g", d.props()));
    const auto j = strategy_to_json(*a.strategy);
    CHECK(j.dump() == strategy_to_json(*b.strategy).dump());
    CHECK(j.contains("value"));
    CHECK(j["epsilon"] == 1e-3);
    for (const auto& entry : j["entries"]) {
        CHECK(entry["q"].is_string());
        CHECK(d.is_applicable(entry["s"].get<StateId>(), entry["action"].get<ActionId>()));
    }
}

TEST_CASE("almost-sure states are exactly the value-one states") {
    std::mt19937_64 rng(61);
    int fractional_neighbors = 0;
    for (int round = 0; round < 200; ++round) {
        SubMdpst z = testing::random_sub(rng);
        const auto sure = almost_sure(z);
        for (std::uint32_t s = 0; s < z.num_states(); ++s) {
            if (z.role[s] != Role::Open) {
                CHECK(sure[s] == z.goal(s));
                continue;
            }
            SubMdpst from = z;
            from.initial = s;
            const double v = testing::oracle_value(from);
            CHECK(sure[s] == (v > 1 - 1e-9));
            fractional_neighbors += !sure[s] && v > 0.9;
        }
        // without the precomputation the iteration approaches the same values
        const auto plain = robust_vi(z, {1e-9, Sweep::GaussSeidel, 1, false});
        const auto fixed = robust_vi(z, {1e-9});
        for (std::uint32_t s = 0; s < z.num_states(); ++s) CHECK(std::abs(plain.v[s] - fixed.v[s]) < 1e-6);
    }
    MESSAGE(fractional_neighbors << " open states with value in (0.9, 1)");
}
