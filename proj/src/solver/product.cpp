#include "tremble/solver/product.hpp"

#include <algorithm>
#include <deque>

#include "tremble/errors.hpp"

namespace tremble::solver {

ProductMdpst::ProductMdpst(std::shared_ptr<const Mdpst> model, std::shared_ptr<const ltlf::Dfa> dfa)
    : model_(std::move(model)), dfa_(std::move(dfa)) {
    if (!(model_->props() == dfa_->props())) {
        throw InputError("model and automaton disagree on the proposition set");
    }
    auto intern = [&](ProductState p) {
        auto [it, fresh] = index_.try_emplace(key(p), static_cast<std::uint32_t>(states_.size()));
        if (fresh) {
            states_.push_back(p);
            goal_.push_back(dfa_->accepting(p.q));
        }
        return it->second;
    };
    const StateId s0 = model_->initial();
    intern({s0, dfa_->step(dfa_->initial(), model_->label(s0))});

    for (std::uint32_t id = 0; id < states_.size(); ++id) {
        const ProductState cur = states_[id];
        std::vector<Choice> lifted;
        for (const auto& c : model_->choices(cur.s)) {
            Choice lc{c.action, {}};
            for (const auto& o : c.outcomes) {
                SetMass lo{{}, o.mass};
                for (StateId t : o.theta) lo.theta.push_back(intern({t, dfa_->step(cur.q, model_->label(t))}));
                std::sort(lo.theta.begin(), lo.theta.end());
                lc.outcomes.push_back(std::move(lo));
            }
            lifted.push_back(std::move(lc));
        }
        choices_.push_back(std::move(lifted));
    }
}

std::int64_t ProductMdpst::find(ProductState p) const {
    auto it = index_.find(key(p));
    return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::size_t ProductMdpst::num_transitions() const {
    std::size_t n = 0;
    for (const auto& cs : choices_)
        for (const auto& c : cs)
            for (const auto& o : c.outcomes) n += o.theta.size();
    return n;
}

std::shared_ptr<const ProductMdpst> build_product(std::shared_ptr<const Mdpst> model,
                                                  std::shared_ptr<const ltlf::Dfa> dfa) {
    return std::make_shared<const ProductMdpst>(std::move(model), std::move(dfa));
}

Partition partition(const ProductMdpst& p) {
    const std::size_t n = p.num_states();
    std::vector<bool> forward(n, false), backward(n, false);
    std::vector<std::vector<std::uint32_t>> pre(n);
    std::deque<std::uint32_t> queue{p.initial()};
    forward[p.initial()] = true;
    while (!queue.empty()) {
        const auto s = queue.front();
        queue.pop_front();
        for (const auto& c : p.choices(s)) {
            for (const auto& o : c.outcomes) {
                for (auto t : o.theta) {
                    pre[t].push_back(s);
                    if (!forward[t]) {
                        forward[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
    }
    for (std::uint32_t s = 0; s < n; ++s) {
        if (p.goal(s)) {
            backward[s] = true;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        const auto t = queue.front();
        queue.pop_front();
        for (auto s : pre[t]) {
            if (!backward[s]) {
                backward[s] = true;
                queue.push_back(s);
            }
        }
    }

    Partition part;
    part.region.resize(n);
    for (std::uint32_t s = 0; s < n; ++s) {
        if (!forward[s]) {
            part.region[s] = Region::Unreachable;
            ++part.unreachable;
        } else if (backward[s]) {
            part.region[s] = Region::Relevant;
            ++part.relevant;
        } else {
            part.region[s] = Region::Dead;
            ++part.dead;
        }
    }
    return part;
}

SubMdpst SubMdpst::from_choices(std::uint32_t initial, std::vector<Role> roles,
                                const std::vector<std::vector<Mdpst::Choice>>& choices) {
    const std::size_t n = roles.size();
    if (initial >= n || choices.size() != n) throw InvalidModel("malformed sub-model");
    SubMdpst z;
    z.initial = initial;
    z.role = std::move(roles);
    z.choice_begin.push_back(0);
    z.outcome_begin.push_back(0);
    z.elem_begin.push_back(0);
    auto add_outcome = [&](const std::vector<StateId>& theta, double mass) {
        if (theta.empty()) throw InvalidModel("empty outcome set");
        std::vector<std::uint32_t> sorted(theta.begin(), theta.end());
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (auto t : sorted)
            if (t >= n) throw DanglingStateRef(t, n);
        z.elems.insert(z.elems.end(), sorted.begin(), sorted.end());
        z.mass.push_back(mass);
        z.elem_begin.push_back(static_cast<std::uint32_t>(z.elems.size()));
    };
    for (std::uint32_t s = 0; s < n; ++s) {
        if (z.role[s] != Role::Open) {
            z.action.push_back(kEpsilonAction);
            add_outcome({s}, 1.0);
            z.outcome_begin.push_back(static_cast<std::uint32_t>(z.mass.size()));
        } else {
            if (choices[s].empty()) throw EmptyApplicableSet(s);
            auto sorted = choices[s];
            std::sort(sorted.begin(), sorted.end(),
                      [](const Mdpst::Choice& x, const Mdpst::Choice& y) { return x.action < y.action; });
            for (const auto& c : sorted) {
                z.action.push_back(c.action);
                for (const auto& o : c.outcomes) add_outcome(o.theta, o.mass);
                z.outcome_begin.push_back(static_cast<std::uint32_t>(z.mass.size()));
            }
        }
        z.choice_begin.push_back(static_cast<std::uint32_t>(z.action.size()));
    }
    return z;
}

SubMdpst make_sub(const ProductMdpst& p, const Partition& part) {
    if (!part.relevant_state(p.initial())) throw EmptyRelevantRegion();
    const std::size_t n = p.num_states();
    constexpr std::uint32_t kNone = 0xffffffffu;
    std::vector<std::uint32_t> local(n, kNone);
    std::vector<std::uint32_t> origin;
    std::vector<Role> roles;
    for (std::uint32_t s = 0; s < n; ++s) {
        if (part.relevant_state(s)) {
            local[s] = static_cast<std::uint32_t>(origin.size());
            origin.push_back(s);
            roles.push_back(p.goal(s) ? Role::Goal : Role::Open);
        }
    }
    const std::size_t relevant = origin.size();
    for (std::size_t i = 0; i < relevant; ++i) {
        if (roles[i] != Role::Open) continue;
        for (const auto& c : p.choices(origin[i]))
            for (const auto& o : c.outcomes)
                for (auto t : o.theta) {
                    if (local[t] == kNone) {
                        local[t] = static_cast<std::uint32_t>(origin.size());
                        origin.push_back(t);
                        roles.push_back(Role::Sink);
                    }
                }
    }
    std::vector<std::vector<Mdpst::Choice>> choices(origin.size());
    for (std::size_t i = 0; i < relevant; ++i) {
        if (roles[i] != Role::Open) continue;
        for (const auto& c : p.choices(origin[i])) {
            Mdpst::Choice lc{c.action, {}};
            for (const auto& o : c.outcomes) {
                SetMass lo{{}, o.mass};
                for (auto t : o.theta) lo.theta.push_back(local[t]);
                lc.outcomes.push_back(std::move(lo));
            }
            choices[i].push_back(std::move(lc));
        }
    }
    SubMdpst z = SubMdpst::from_choices(local[p.initial()], std::move(roles), choices);
    z.origin = std::move(origin);
    return z;
}

}  // namespace tremble::solver
