#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "tremble/ltlf/formula.hpp"

namespace tremble::ltlf {

/// One progression step: the residual obligation after reading `sigma`,
/// in canonical form.
Formula progress(const Formula& f, Interpretation sigma);

/// Truth of a residual formula on the empty word.
bool eps_accepting(const Formula& f);

/// Normal form used for automaton states: disjunctive normal form over
/// literals (atoms, `End`, and X/N/U/R subformulas, possibly negated) with
/// subsumed cubes removed, plus the `End` rules that hold because `!End` is
/// true on every nonempty word. Equivalent to `f` on every residual word.
/// Residuals of one formula draw literals from a finite subformula set, so an
/// automaton has finitely many normalized states.
Formula normalize_residual(const Formula& f);

using DfaState = std::uint32_t;

/// Lazily explored automaton whose states are residual formulas in
/// normalize_residual form.
///
/// States are numbered in discovery order, the initial state is 0. step() is
/// memoized on (state, sigma restricted to the atoms of the state) and is safe
/// to call concurrently.
class Dfa {
public:
    Dfa(const Formula& f, PropSet props);

    ~Dfa();
    Dfa(const Dfa&) = delete;
    Dfa& operator=(const Dfa&) = delete;

    DfaState initial() const noexcept { return 0; }
    DfaState step(DfaState q, Interpretation sigma) const;
    bool accepting(DfaState q) const;
    Formula formula(DfaState q) const;
    /// Number of states discovered so far.
    std::size_t discovered() const;
    const PropSet& props() const noexcept { return props_; }

    /// Runs the automaton over a nonempty trace. Throws EmptyTrace.
    bool accepts(const Trace& trace) const;

    struct Literals;  // literal numbering, defined in the implementation

private:
    using Cubes = std::vector<std::vector<std::uint32_t>>;
    struct Entry {
        Formula formula;
        std::uint64_t mask;
        bool accepting;
        Cubes cubes;  // normal form of `formula` over literal ids
    };
    struct MemoKey {
        std::uint64_t a;
        std::uint64_t sigma;
        friend bool operator==(const MemoKey&, const MemoKey&) = default;
    };
    using LiteralKey = MemoKey;
    struct MemoHash {
        std::size_t operator()(const MemoKey& k) const noexcept {
            return std::hash<std::uint64_t>{}(k.sigma * 0x9e3779b97f4a7c15ULL ^ k.a);
        }
    };
    struct CubesHash {
        std::size_t operator()(const Cubes& c) const noexcept {
            std::size_t h = c.size();
            for (const auto& cube : c) {
                for (auto l : cube) h = h * 0x100000001b3ULL ^ l;
                h = h * 31 + 7;
            }
            return h;
        }
    };

    // all require mu_
    DfaState intern(Cubes cubes) const;
    const Cubes& literal_residual(std::uint32_t lit, Interpretation sigma) const;

    PropSet props_;
    std::unique_ptr<Literals> lits_;
    mutable std::mutex mu_;
    mutable std::deque<Entry> states_;
    mutable std::unordered_map<Formula, DfaState> index_;
    mutable std::unordered_map<Cubes, DfaState, CubesHash> by_cubes_;
    mutable std::unordered_map<MemoKey, DfaState, MemoHash> memo_;
    mutable std::unordered_map<LiteralKey, Cubes, MemoHash> literal_memo_;
};

/// Dense automaton over the full alphabet 2^|props|. Symbol k is the
/// interpretation whose bitmask is k.
struct ExplicitDfa {
    PropSet props;
    std::size_t num_states = 0;
    std::size_t num_symbols = 0;
    std::uint32_t initial = 0;
    std::vector<std::uint32_t> delta;  // num_states * num_symbols
    std::vector<bool> accepting;

    std::uint32_t next(std::uint32_t q, std::size_t symbol) const { return delta[q * num_symbols + symbol]; }
    bool accepts(const Trace& trace) const;
    std::size_t num_accepting() const;
};

constexpr std::size_t kMaxMaterializedProps = 12;

/// Breadth-first expansion over every symbol. Throws AlphabetTooLarge above
/// kMaxMaterializedProps atoms and StateLimitExceeded past `max_states`.
ExplicitDfa materialize(const Dfa& dfa, std::size_t max_states = 1u << 20);

/// Hopcroft partition refinement; states are renumbered breadth-first from
/// the initial state and unreachable states are dropped.
ExplicitDfa minimize(const ExplicitDfa& dfa);

/// Graphviz rendering: accepting states are double circles, edges carry the
/// interpretations that take them.
std::string to_dot(const ExplicitDfa& dfa);

}  // namespace tremble::ltlf
