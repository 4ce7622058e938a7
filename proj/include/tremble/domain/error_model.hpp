#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tremble/domain/domain.hpp"

namespace tremble::domain {

struct ActionMass {
    ActionId action;
    double p;
    friend bool operator==(const ActionMass&, const ActionMass&) = default;
};

/// Distribution over instructed actions, ascending by action, zero entries
/// dropped. The support is the set of listed actions.
using ErrorDist = std::vector<ActionMass>;

/// Actions a slip may turn the intended action `a` into at state `s`.
using NeighborRule = std::function<std::vector<ActionId>(const Domain&, StateId s, ActionId a)>;

/// All other applicable actions.
std::vector<ActionId> all_other_applicable(const Domain& d, StateId s, ActionId a);

/// Slip model err(s, a). Error-free actions always map to a point mass.
class ErrorModel {
public:
    enum class Kind { Explicit, UniformSlip };

    /// Explicit table: rows keyed by (state, intended action).
    static ErrorModel explicit_table(std::map<std::pair<StateId, ActionId>, ErrorDist> rows);
    /// Mass 1-p on the intended action, p spread evenly over the neighbors.
    static ErrorModel uniform_slip(double p, NeighborRule rule = all_other_applicable,
                                   std::string rule_name = "all_other_applicable");

    Kind kind() const noexcept { return kind_; }
    double slip_probability() const noexcept { return p_; }
    const std::string& rule_name() const noexcept { return rule_name_; }
    const std::map<std::pair<StateId, ActionId>, ErrorDist>& rows() const noexcept { return rows_; }

    /// err(s, a); throws MissingRow for an explicit model without the row and
    /// InputError when a ∉ A(s).
    ErrorDist dist(const Domain& d, StateId s, ActionId a) const;

private:
    Kind kind_ = Kind::UniformSlip;
    double p_ = 0;
    NeighborRule rule_;
    std::string rule_name_;
    std::map<std::pair<StateId, ActionId>, ErrorDist> rows_;
};

inline ErrorDist error_dist(const ErrorModel& e, const Domain& d, StateId s, ActionId a) { return e.dist(d, s, a); }

struct Violation {
    StateId state;
    ActionId action;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const noexcept { return violations.empty(); }
    std::string to_string() const;
};

/// Lists every row that is missing, not a distribution within 1e-9, or puts
/// mass outside A(s).
ValidationReport validate(const Domain& d, const ErrorModel& e);

inline constexpr double kSumTolerance = 1e-9;

ErrorModel error_model_from_json(const nlohmann::json& j);
nlohmann::json error_model_to_json(const ErrorModel& e);
ErrorModel load_error_model(const std::filesystem::path& path);

}  // namespace tremble::domain
