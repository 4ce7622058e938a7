#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "tremble/domain/error_model.hpp"

namespace tremble::abstraction {

using domain::ActionId;
using domain::StateId;

/// One outcome of an action: the nature picks some element of `theta`.
struct SetMass {
    std::vector<StateId> theta;  // ascending, nonempty
    double mass;
    friend bool operator==(const SetMass&, const SetMass&) = default;
};

/// Markov decision process with set-valued transitions. States share ids with
/// the source domain. A model whose sets all have one element is an MDP.
class Mdpst {
public:
    struct Choice {
        ActionId action;
        std::vector<SetMass> outcomes;  // distinct sets, positive masses
    };

    Mdpst(ltlf::PropSet props, std::vector<ltlf::Interpretation> labels, StateId initial,
          std::vector<std::vector<Choice>> choices);

    std::size_t num_states() const noexcept { return labels_.size(); }
    StateId initial() const noexcept { return initial_; }
    const ltlf::PropSet& props() const noexcept { return props_; }
    ltlf::Interpretation label(StateId s) const { return labels_.at(s); }
    bool singleton() const noexcept { return singleton_; }

    /// Choices at `s`, ascending by action.
    const std::vector<Choice>& choices(StateId s) const { return choices_.at(s); }
    /// Outcomes of (s, a). Throws InputError when a is not applicable.
    const std::vector<SetMass>& outcomes(StateId s, ActionId a) const;
    std::size_t num_pairs() const;

private:
    ltlf::PropSet props_;
    std::vector<ltlf::Interpretation> labels_;
    StateId initial_;
    std::vector<std::vector<Choice>> choices_;
    bool singleton_ = true;
};

/// MDP of a deterministic domain: successors of slipped actions that
/// coincide have their masses summed. Throws InputError for a
/// nondeterministic domain and InvalidModel when validate() complains.
Mdpst mdp_from_det(const domain::Domain& d, const domain::ErrorModel& e);

/// Each distinct successor set F(s, a') receives the summed slip mass of the
/// actions a' that produce it. Accepts deterministic domains too.
Mdpst mdpst_from_nondet(const domain::Domain& n, const domain::ErrorModel& e);

/// Picks mdp_from_det or mdpst_from_nondet by domain kind.
Mdpst abstract(const domain::Domain& d, const domain::ErrorModel& e);

/// Union of the sets with positive mass at (s, a), ascending.
std::vector<StateId> post(const Mdpst& m, StateId s, ActionId a);

nlohmann::json mdpst_to_json(const Mdpst& m);

}  // namespace tremble::abstraction
