#include "tremble/abstraction/mdpst.hpp"

#include <algorithm>
#include <cmath>

#include "tremble/errors.hpp"

namespace tremble::abstraction {

using nlohmann::json;

Mdpst::Mdpst(ltlf::PropSet props, std::vector<ltlf::Interpretation> labels, StateId initial,
             std::vector<std::vector<Choice>> choices)
    : props_(std::move(props)), labels_(std::move(labels)), initial_(initial), choices_(std::move(choices)) {
    const std::size_t n = labels_.size();
    if (choices_.size() != n) throw InvalidModel("choice table does not cover every state");
    if (initial_ >= n) throw DanglingStateRef(initial_, n);
    for (StateId s = 0; s < n; ++s) {
        auto& cs = choices_[s];
        if (cs.empty()) throw EmptyApplicableSet(s);
        std::sort(cs.begin(), cs.end(), [](const Choice& x, const Choice& y) { return x.action < y.action; });
        for (std::size_t i = 0; i < cs.size(); ++i) {
            if (i > 0 && cs[i - 1].action == cs[i].action) throw InvalidModel("duplicate action at state " + std::to_string(s));
            auto& out = cs[i].outcomes;
            if (out.empty()) throw EmptySuccessorSet(s, cs[i].action);
            double sum = 0;
            for (auto& o : out) {
                std::sort(o.theta.begin(), o.theta.end());
                o.theta.erase(std::unique(o.theta.begin(), o.theta.end()), o.theta.end());
                if (o.theta.empty()) throw EmptySuccessorSet(s, cs[i].action);
                for (auto t : o.theta)
                    if (t >= n) throw DanglingStateRef(t, n);
                if (!(o.mass > 0)) throw InvalidModel("nonpositive mass at (" + std::to_string(s) + ", " +
                                                      std::to_string(cs[i].action) + ")");
                sum += o.mass;
                singleton_ = singleton_ && o.theta.size() == 1;
            }
            if (std::abs(sum - 1.0) > domain::kSumTolerance) {
                throw InvalidModel("masses at (" + std::to_string(s) + ", " + std::to_string(cs[i].action) +
                                   ") sum to " + std::to_string(sum));
            }
            std::sort(out.begin(), out.end(), [](const SetMass& x, const SetMass& y) { return x.theta < y.theta; });
            for (std::size_t k = 1; k < out.size(); ++k) {
                if (out[k - 1].theta == out[k].theta) throw InvalidModel("repeated successor set");
            }
        }
    }
}

const std::vector<SetMass>& Mdpst::outcomes(StateId s, ActionId a) const {
    const auto& cs = choices_.at(s);
    auto it = std::lower_bound(cs.begin(), cs.end(), a, [](const Choice& c, ActionId x) { return c.action < x; });
    if (it == cs.end() || it->action != a) {
        throw InputError("action " + std::to_string(a) + " is not applicable in state " + std::to_string(s));
    }
    return it->outcomes;
}

std::size_t Mdpst::num_pairs() const {
    std::size_t n = 0;
    for (const auto& cs : choices_) n += cs.size();
    return n;
}

namespace {

Mdpst build(const domain::Domain& d, const domain::ErrorModel& e) {
    if (auto report = domain::validate(d, e); !report.ok()) throw InvalidModel("invalid error model:\n" + report.to_string());
    std::vector<ltlf::Interpretation> labels;
    std::vector<std::vector<Mdpst::Choice>> choices(d.num_states());
    for (StateId s = 0; s < d.num_states(); ++s) {
        labels.push_back(d.label(s));
        for (ActionId a : d.applicable(s)) {
            // Outcomes in slip-action order; equal sets merge into the first.
            std::vector<SetMass> out;
            for (const auto& m : e.dist(d, s, a)) {
                const auto& theta = d.successors(s, m.action);
                auto it = std::find_if(out.begin(), out.end(), [&](const SetMass& o) { return o.theta == theta; });
                if (it == out.end()) out.push_back({theta, m.p});
                else it->mass += m.p;
            }
            choices[s].push_back({a, std::move(out)});
        }
    }
    return Mdpst(d.props(), std::move(labels), d.initial(), std::move(choices));
}

}  // namespace

Mdpst mdp_from_det(const domain::Domain& d, const domain::ErrorModel& e) {
    if (!d.deterministic()) throw InputError("mdp_from_det needs a deterministic domain");
    return build(d, e);
}

Mdpst mdpst_from_nondet(const domain::Domain& n, const domain::ErrorModel& e) { return build(n, e); }

Mdpst abstract(const domain::Domain& d, const domain::ErrorModel& e) {
    return d.deterministic() ? mdp_from_det(d, e) : mdpst_from_nondet(d, e);
}

std::vector<StateId> post(const Mdpst& m, StateId s, ActionId a) {
    std::vector<StateId> out;
    for (const auto& o : m.outcomes(s, a)) out.insert(out.end(), o.theta.begin(), o.theta.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

json mdpst_to_json(const Mdpst& m) {
    json j;
    j["props"] = m.props().names();
    j["initial"] = m.initial();
    j["singleton"] = m.singleton();
    j["states"] = json::array();
    for (StateId s = 0; s < m.num_states(); ++s) {
        json label = json::array();
        for (ltlf::PropId p = 0; p < m.props().size(); ++p)
            if (m.label(s).contains(p)) label.push_back(m.props().name(p));
        json actions = json::array();
        for (const auto& c : m.choices(s)) {
            json out = json::array();
            for (const auto& o : c.outcomes) out.push_back({{"theta", o.theta}, {"mass", o.mass}});
            actions.push_back({{"action", c.action}, {"outcomes", std::move(out)}});
        }
        j["states"].push_back({{"id", s}, {"label", std::move(label)}, {"actions", std::move(actions)}});
    }
    return j;
}

}  // namespace tremble::abstraction
