#include "tremble/solver/strategy.hpp"

#include <algorithm>

#include "tremble/errors.hpp"

namespace tremble::solver {

using nlohmann::json;

std::vector<ActionId> choose_actions(const SubMdpst& z, const ValueFn& v) {
    const std::size_t n = z.num_states();
    std::vector<ActionId> chosen(n, kEpsilonAction);
    std::vector<bool> optimal(z.action.size(), false);
    for (std::uint32_t s = 0; s < n; ++s) {
        if (z.role[s] != Role::Open) continue;
        const double best = backup(z, s, v.v);
        for (auto c = z.choice_begin[s]; c < z.choice_begin[s + 1]; ++c)
            optimal[c] = choice_value(z, c, v.v) >= best - kTieTolerance;
    }

    // Layered attractor over the optimal choices: count the unranked elements
    // of every outcome set and rank a state once some set is fully ranked.
    std::vector<std::uint32_t> owner(z.action.size()), pending(z.mass.size());
    std::vector<std::vector<std::uint32_t>> uses(n);
    for (std::uint32_t s = 0; s < n; ++s) {
        if (z.role[s] != Role::Open) continue;
        for (auto c = z.choice_begin[s]; c < z.choice_begin[s + 1]; ++c) {
            owner[c] = s;
            if (!optimal[c]) continue;
            for (auto o = z.outcome_begin[c]; o < z.outcome_begin[c + 1]; ++o) {
                pending[o] = z.elem_begin[o + 1] - z.elem_begin[o];
                for (auto e = z.elem_begin[o]; e < z.elem_begin[o + 1]; ++e) uses[z.elems[e]].push_back(o);
            }
        }
    }
    std::vector<std::uint32_t> choice_of(z.mass.size());
    for (std::uint32_t c = 0; c < z.action.size(); ++c)
        for (auto o = z.outcome_begin[c]; o < z.outcome_begin[c + 1]; ++o) choice_of[o] = c;

    std::vector<bool> ranked(n, false), progressing(z.action.size(), false);
    std::vector<std::uint32_t> frontier;
    for (std::uint32_t s = 0; s < n; ++s)
        if (z.goal(s)) {
            ranked[s] = true;
            frontier.push_back(s);
        }
    while (!frontier.empty()) {
        std::vector<std::uint32_t> candidates;
        for (auto t : frontier) {
            for (auto o : uses[t]) {
                if (--pending[o] != 0) continue;
                const auto c = choice_of[o];
                progressing[c] = true;
                if (!ranked[owner[c]]) candidates.push_back(owner[c]);
            }
        }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        for (auto s : candidates) {
            for (auto c = z.choice_begin[s]; c < z.choice_begin[s + 1]; ++c) {
                if (progressing[c]) {
                    chosen[s] = z.action[c];
                    break;
                }
            }
            ranked[s] = true;
        }
        frontier = std::move(candidates);
    }

    for (std::uint32_t s = 0; s < n; ++s) {
        if (z.role[s] != Role::Open || ranked[s]) continue;
        for (auto c = z.choice_begin[s]; c < z.choice_begin[s + 1]; ++c) {
            if (optimal[c]) {
                chosen[s] = z.action[c];
                break;
            }
        }
    }
    return chosen;
}

Strategy::Strategy(std::shared_ptr<const Mdpst> model, std::shared_ptr<const ltlf::Dfa> dfa, ProductState initial,
                   std::vector<Entry> entries, std::vector<ProductState> relevant, double value, double epsilon,
                   std::size_t iterations, double residual)
    : model_(std::move(model)),
      dfa_(std::move(dfa)),
      initial_(initial),
      entries_(std::move(entries)),
      value_(value),
      epsilon_(epsilon),
      iterations_(iterations),
      residual_(residual) {
    for (std::size_t i = 0; i < entries_.size(); ++i) index_.emplace(key({entries_[i].s, entries_[i].q}), i);
    for (auto p : relevant) relevant_.insert(key(p));
}

const Strategy::Entry* Strategy::find(ProductState p) const {
    auto it = index_.find(key(p));
    return it == index_.end() ? nullptr : &entries_[it->second];
}

ActionId Strategy::action(ProductState p) const {
    if (const Entry* e = find(p)) return e->action;
    if (relevant(p) && !goal(p)) throw StrategyGap(p.s, ltlf::to_string(dfa_->formula(p.q)));
    throw InputError("product state (" + std::to_string(p.s) + ", " + std::to_string(p.q) +
                     ") is outside the region the strategy covers");
}

double Strategy::value_at(ProductState p) const {
    if (goal(p)) return 1.0;
    if (const Entry* e = find(p)) return e->v;
    return 0.0;
}

Strategy extract_strategy(const ProductMdpst& p, const SubMdpst& z, const ValueFn& v, double epsilon) {
    const auto chosen = choose_actions(z, v);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> order;  // (product id, sub id)
    std::vector<ProductState> relevant;
    for (std::uint32_t i = 0; i < z.num_states(); ++i) {
        if (z.sink(i)) continue;
        relevant.push_back(p.state(z.origin[i]));
        if (z.role[i] == Role::Open) order.emplace_back(z.origin[i], i);
    }
    std::sort(order.begin(), order.end());
    std::vector<Strategy::Entry> entries;
    for (auto [pid, i] : order) {
        const auto ps = p.state(pid);
        entries.push_back({ps.s, ps.q, chosen[i], v.v[i]});
    }
    return Strategy(p.model_ptr(), p.dfa_ptr(), p.state(p.initial()), std::move(entries), std::move(relevant),
                    v.v[z.initial], epsilon, v.iterations, v.residual);
}

ProductState advance(const Strategy& strategy, const ltlf::Dfa& dfa, ProductState current, StateId observed) {
    const ActionId a = strategy.action(current);
    const auto succ = abstraction::post(strategy.model(), current.s, a);
    if (!std::binary_search(succ.begin(), succ.end(), observed)) throw IllegalObservation(current.s, observed);
    return {observed, dfa.step(current.q, strategy.model().label(observed))};
}

json strategy_to_json(const Strategy& strategy) {
    json entries = json::array();
    for (const auto& e : strategy.entries()) {
        entries.push_back({{"s", e.s}, {"q", ltlf::to_string(strategy.dfa().formula(e.q))}, {"action", e.action}, {"v", e.v}});
    }
    return {{"value", strategy.value()},
            {"epsilon", strategy.epsilon()},
            {"iterations", strategy.iterations()},
            {"entries", std::move(entries)}};
}

}  // namespace tremble::solver
