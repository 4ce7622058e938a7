#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "tremble/abstraction/mdpst.hpp"
#include "tremble/ltlf/dfa.hpp"

namespace tremble::solver {

using abstraction::ActionId;
using abstraction::Mdpst;
using abstraction::SetMass;
using abstraction::StateId;
using ltlf::DfaState;

/// Domain state paired with the automaton state reached after reading the
/// labels up to and including that domain state.
struct ProductState {
    StateId s;
    DfaState q;
    friend bool operator==(const ProductState&, const ProductState&) = default;
};

inline std::uint64_t key(ProductState p) { return (std::uint64_t{p.s} << 32) | p.q; }

/// Reachable part of model × automaton, densely numbered in breadth-first
/// order from the initial product state (id 0). Outcome sets hold product ids.
class ProductMdpst {
public:
    using Choice = Mdpst::Choice;

    ProductMdpst(std::shared_ptr<const Mdpst> model, std::shared_ptr<const ltlf::Dfa> dfa);

    std::size_t num_states() const noexcept { return states_.size(); }
    std::uint32_t initial() const noexcept { return 0; }
    ProductState state(std::uint32_t id) const { return states_.at(id); }
    /// Id of a discovered product state, or -1.
    std::int64_t find(ProductState p) const;
    bool goal(std::uint32_t id) const { return goal_.at(id); }
    const std::vector<Choice>& choices(std::uint32_t id) const { return choices_.at(id); }

    const Mdpst& model() const noexcept { return *model_; }
    const ltlf::Dfa& dfa() const noexcept { return *dfa_; }
    std::shared_ptr<const Mdpst> model_ptr() const noexcept { return model_; }
    std::shared_ptr<const ltlf::Dfa> dfa_ptr() const noexcept { return dfa_; }

    /// Σ over (state, action) of Σ over outcomes of |Θ|.
    std::size_t num_transitions() const;

private:
    std::shared_ptr<const Mdpst> model_;
    std::shared_ptr<const ltlf::Dfa> dfa_;
    std::vector<ProductState> states_;
    std::vector<bool> goal_;
    std::vector<std::vector<Choice>> choices_;
    std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

/// Breadth-first product construction. The model's labels must be over the
/// automaton's propositions.
std::shared_ptr<const ProductMdpst> build_product(std::shared_ptr<const Mdpst> model,
                                                  std::shared_ptr<const ltlf::Dfa> dfa);

enum class Region : std::uint8_t {
    Unreachable,  // not forward-reachable from the initial state
    Dead,         // reachable, cannot reach the goal
    Relevant,     // reachable and can reach the goal
};

struct Partition {
    std::vector<Region> region;  // per product id
    std::size_t unreachable = 0, dead = 0, relevant = 0;

    bool relevant_state(std::uint32_t id) const { return region[id] == Region::Relevant; }
};

Partition partition(const ProductMdpst& p);

/// Self-loop action of goal and sink states.
inline constexpr ActionId kEpsilonAction = 0xffffffffu;

enum class Role : std::uint8_t { Open, Goal, Sink };

/// Compressed sub-model over which the values are computed. States are the
/// relevant product states in product order followed by the sinks (outside
/// states referenced by relevant outcome sets). Goal and sink states carry
/// only the epsilon self-loop.
struct SubMdpst {
    std::uint32_t initial = 0;
    std::vector<Role> role;
    std::vector<std::uint32_t> origin;        // product id per state, when built from a product
    std::vector<std::uint32_t> choice_begin;  // num_states + 1
    std::vector<ActionId> action;             // per choice
    std::vector<std::uint32_t> outcome_begin; // num_choices + 1
    std::vector<double> mass;                 // per outcome
    std::vector<std::uint32_t> elem_begin;    // num_outcomes + 1
    std::vector<std::uint32_t> elems;

    std::size_t num_states() const noexcept { return role.size(); }
    bool goal(std::uint32_t s) const { return role[s] == Role::Goal; }
    bool sink(std::uint32_t s) const { return role[s] == Role::Sink; }

    /// Builds from per-state choice lists; goal and sink entries are ignored
    /// and replaced by the epsilon loop. Sets are sorted and must be nonempty.
    static SubMdpst from_choices(std::uint32_t initial, std::vector<Role> roles,
                                 const std::vector<std::vector<Mdpst::Choice>>& choices);
};

/// Throws EmptyRelevantRegion when the initial state is not relevant.
SubMdpst make_sub(const ProductMdpst& p, const Partition& part);

}  // namespace tremble::solver
