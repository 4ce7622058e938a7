#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "tremble/ltlf/formula.hpp"

namespace tremble::domain {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

enum class DomainKind { Det, Nondet };

struct DomainState {
    ltlf::Interpretation label;
    std::string name;  // may be empty
};

struct ActionInfo {
    std::string name;  // may be empty
    bool error_free = false;
};

/// One entry of the transition relation; applicability follows from presence.
struct Transition {
    StateId from;
    ActionId action;
    std::vector<StateId> to;
};

/// Reserved action name that is error-free unless a file says otherwise.
inline constexpr const char* kDoNothing = "do-nothing";

/// Explicit-state planning domain. Deterministic domains have exactly one
/// successor per applicable pair; the same type houses both kinds.
class Domain {
public:
    /// Validates and indexes the transition relation. Throws
    /// DanglingStateRef, EmptyApplicableSet, EmptySuccessorSet, or
    /// SchemaError (unknown action, duplicate pair, det with several
    /// successors).
    Domain(DomainKind kind, ltlf::PropSet props, std::vector<DomainState> states, std::vector<ActionInfo> actions,
           StateId initial, std::vector<Transition> transitions);

    DomainKind kind() const noexcept { return kind_; }
    bool deterministic() const noexcept { return kind_ == DomainKind::Det; }
    const ltlf::PropSet& props() const noexcept { return props_; }
    std::size_t num_states() const noexcept { return states_.size(); }
    std::size_t num_actions() const noexcept { return actions_.size(); }
    StateId initial() const noexcept { return initial_; }

    const DomainState& state(StateId s) const { return states_.at(s); }
    const ActionInfo& action(ActionId a) const { return actions_.at(a); }
    ltlf::Interpretation label(StateId s) const { return states_.at(s).label; }
    /// Display name, falling back to "s<id>" / "a<id>".
    std::string state_name(StateId s) const;
    std::string action_name(ActionId a) const;

    /// A(s), ascending.
    const std::vector<ActionId>& applicable(StateId s) const { return applicable_.at(s); }
    bool is_applicable(StateId s, ActionId a) const;
    /// F(s,a), ascending and duplicate-free. Throws InputError when a ∉ A(s).
    const std::vector<StateId>& successors(StateId s, ActionId a) const;

    /// Transition relation in (from, action) order.
    std::vector<Transition> transitions() const;

    friend bool operator==(const Domain& a, const Domain& b);

private:
    DomainKind kind_;
    ltlf::PropSet props_;
    std::vector<DomainState> states_;
    std::vector<ActionInfo> actions_;
    StateId initial_;
    std::vector<std::vector<ActionId>> applicable_;
    std::vector<std::vector<std::vector<StateId>>> succ_;  // parallel to applicable_
};

Domain domain_from_json(const nlohmann::json& j);
nlohmann::json domain_to_json(const Domain& d);
Domain load_domain(const std::filesystem::path& path);
void save_domain(const Domain& d, const std::filesystem::path& path);

/// Reads a whole file as JSON; SchemaError on unreadable or malformed input.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace tremble::domain
