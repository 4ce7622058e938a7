#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tremble/domain/error_model.hpp"
#include "tremble/solver/value_iteration.hpp"

namespace tremble::coassembly {

using domain::ActionId;
using domain::StateId;

/// Placement matrix: one row per object, bit j of a row set when the object
/// is at column j (column 0 is the storage).
using Row = std::uint16_t;
using Matrix = std::vector<Row>;

enum class Predicate {
    Prose,   // each location other than the storage holds at most one block
    Strict,  // each location other than the storage holds exactly one block
};

/// How a valid (i-1)-object matrix grows a column for location i.
enum class Expansion {
    /// A row either keeps its place (append 0) or relocates its block to the
    /// new location (one-hot at the new column). Equals brute force.
    Relocating,
    /// Append 0 or 1 to every row as written, which can never place an older
    /// block at the new location.
    Literal,
};

bool rows_sum_to_one(const Matrix& m);
bool columns_valid(const Matrix& m, std::size_t locations, Predicate pred);

/// Recursive pruning: filtered enumeration for two objects, then one object
/// and one location at a time. Throws InputError for n < 2 or n > 8.
std::set<Matrix> prune_states(std::size_t n, Predicate pred, Expansion rule = Expansion::Relocating);

/// Filters all 2^(n(n+1)) matrices; n <= 4.
std::set<Matrix> brute_force_states(std::size_t n, Predicate pred);

/// Location of each object (0 = storage), the row form of a valid matrix.
using Placement = std::vector<std::uint8_t>;

Matrix to_matrix(const Placement& p);
Placement to_placement(const Matrix& m);

/// ASCII grid: a header row `S L1 .. Ln` and one row per object.
std::string render(const Placement& p);

struct BenchConfig {
    std::size_t N = 3;
    std::size_t K = 0;
    double p = 0;
    /// goal[i] = location of object i+1 in the target configuration
    /// (default: object i at location i).
    std::vector<std::uint8_t> goal;
    std::string human_model = "single-move";
    /// Default: F of the conjunction of the goal atoms.
    std::optional<std::string> formula;
};

struct CounterState {
    Placement placement;
    std::size_t c;
};

struct Instance {
    BenchConfig config;
    domain::Domain domain;
    domain::ErrorModel errors;
    ltlf::Formula goal;
    std::vector<CounterState> states;  // per domain state id
    std::size_t pruned = 0;            // valid placements
    std::size_t augmented = 0;         // pruned × (K+1), before reachability

    std::size_t num_objects() const noexcept { return config.N; }
    /// Display name such as "Obj2->L1" or "Obj2->S"; "do-nothing" last.
    std::string action_name(ActionId a) const { return domain.action_name(a); }
};

/// Robot action id for moving object i (0-based) to location j.
inline ActionId move_action(std::size_t n, std::size_t i, std::size_t j) {
    return static_cast<ActionId>(i * (n + 1) + j);
}
inline ActionId do_nothing_action(std::size_t n) { return static_cast<ActionId>(n * (n + 1)); }

/// Atom name for "object i at location j", both 1-based in the name.
std::string at_atom(std::size_t object, std::size_t location);

/// Throws InputError for an invalid config (N outside 2..6, non-injective
/// goal, p outside [0, 1], unknown human model, atoms not of the at_i_j form).
Instance build_coassembly(const BenchConfig& cfg);

struct ScalingRecord {
    std::size_t N, K;
    double p;
    std::size_t states;     // augmented domain states
    std::size_t reachable;  // product states reachable from the initial state
    std::size_t transitions;
    double model_build_ms, synthesis_ms, value;
};

ScalingRecord run_instance(const BenchConfig& cfg, const solver::ViOptions& vi = {});

/// Runs every config and writes `N,K,p,states,reachable,transitions,
/// model_build_ms,synthesis_ms,value` rows when `out_csv` is given.
std::vector<ScalingRecord> run_scaling(const std::vector<BenchConfig>& configs,
                                       const std::optional<std::filesystem::path>& out_csv,
                                       const solver::ViOptions& vi = {});

std::string csv_header();
std::string csv_row(const ScalingRecord& r);

}  // namespace tremble::coassembly
