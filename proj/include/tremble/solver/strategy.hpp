#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "tremble/solver/value_iteration.hpp"

namespace tremble::solver {

/// Ties in the backup closer than this count as exact.
inline constexpr double kTieTolerance = 1e-12;

/// Per sub-model state, the chosen action (kEpsilonAction on goals and sinks).
///
/// Among the actions whose backup is within kTieTolerance of the best, states
/// are ranked by distance to the goal: a state gets rank r when one of those
/// actions has an outcome set lying entirely in ranks below r, and it takes
/// the lowest such action id. This keeps optimal self-loops (e.g. do-nothing
/// at value 1) from trapping the run. Unranked states take the lowest-id
/// maximizer.
std::vector<ActionId> choose_actions(const SubMdpst& z, const ValueFn& v);

/// Memoryless strategy over product states, i.e. a finite-memory strategy for
/// the domain with the automaton as memory.
class Strategy {
public:
    struct Entry {
        StateId s;
        DfaState q;
        ActionId action;
        double v;
    };

    /// `relevant` lists the product states from which the goal is reachable;
    /// entries cover its non-goal members.
    Strategy(std::shared_ptr<const Mdpst> model, std::shared_ptr<const ltlf::Dfa> dfa, ProductState initial,
             std::vector<Entry> entries, std::vector<ProductState> relevant, double value, double epsilon,
             std::size_t iterations, double residual);

    ProductState initial() const noexcept { return initial_; }
    double value() const noexcept { return value_; }
    double epsilon() const noexcept { return epsilon_; }
    std::size_t iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    const Mdpst& model() const noexcept { return *model_; }
    const ltlf::Dfa& dfa() const noexcept { return *dfa_; }

    bool goal(ProductState p) const { return dfa_->accepting(p.q); }
    bool relevant(ProductState p) const { return relevant_.contains(key(p)); }
    std::size_t num_relevant() const noexcept { return relevant_.size(); }
    const Entry* find(ProductState p) const;
    /// Chosen action; throws StrategyGap for a relevant non-goal state without
    /// an entry and InputError for states outside the relevant region.
    ActionId action(ProductState p) const;
    /// Value of a product state: 1 on goals, the entry's value on relevant
    /// states, 0 elsewhere.
    double value_at(ProductState p) const;

private:
    std::shared_ptr<const Mdpst> model_;
    std::shared_ptr<const ltlf::Dfa> dfa_;
    ProductState initial_;
    std::vector<Entry> entries_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
    std::unordered_set<std::uint64_t> relevant_;
    double value_, epsilon_;
    std::size_t iterations_;
    double residual_;
};

/// Strategy for the whole pipeline result; entries in product order.
Strategy extract_strategy(const ProductMdpst& p, const SubMdpst& z, const ValueFn& v, double epsilon);

/// Successor product state after observing `observed`; throws
/// IllegalObservation when it is outside the post set of the chosen action.
ProductState advance(const Strategy& strategy, const ltlf::Dfa& dfa, ProductState current, StateId observed);

/// `{value, epsilon, iterations, entries: [{s, q, action, v}]}` with q as the
/// automaton state's formula.
nlohmann::json strategy_to_json(const Strategy& strategy);

}  // namespace tremble::solver
