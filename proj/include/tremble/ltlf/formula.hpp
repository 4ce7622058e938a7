#pragma once

#include <atomic>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tremble::ltlf {

using PropId = std::uint32_t;

/// Ordered set of declared atomic propositions. Interpretations are bitmasks
/// over the declaration order, so at most `kMaxProps` atoms can be declared.
class PropSet {
public:
    static constexpr std::size_t kMaxProps = 64;

    PropSet() = default;
    PropSet(std::initializer_list<std::string> names);
    explicit PropSet(const std::vector<std::string>& names);

    /// Declares `name` (idempotent) and returns its id.
    PropId add(const std::string& name);
    std::optional<PropId> find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name).has_value(); }

    const std::string& name(PropId id) const { return names_.at(id); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t size() const noexcept { return names_.size(); }

    static bool valid_name(std::string_view name);

    friend bool operator==(const PropSet& a, const PropSet& b) { return a.names_ == b.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, PropId> index_;
};

/// The set of propositions true at one instant, as a bitmask over a PropSet.
struct Interpretation {
    std::uint64_t bits = 0;

    bool contains(PropId id) const noexcept { return (bits >> id) & 1u; }
    void insert(PropId id) noexcept { bits |= std::uint64_t{1} << id; }

    static Interpretation of(const PropSet& props, const std::vector<std::string>& names);

    friend bool operator==(Interpretation, Interpretation) = default;
};

using Trace = std::vector<Interpretation>;

/// Renders an interpretation as a sorted atom list in braces, e.g. `{a,b}`.
std::string to_string(Interpretation sigma, const PropSet& props);

enum class Op : std::uint8_t {
    True,
    False,
    End,
    Atom,
    Not,
    And,
    Or,
    Next,
    WeakNext,
    Until,
    Release,
};

constexpr int arity(Op op) {
    switch (op) {
        case Op::True:
        case Op::False:
        case Op::End:
        case Op::Atom: return 0;
        case Op::Not:
        case Op::Next:
        case Op::WeakNext: return 1;
        default: return 2;
    }
}

struct Node;

/// Immutable LTLf syntax tree with shared subterms. Copies are cheap.
///
/// `End` is an internal nullary connective, true exactly on the empty
/// residual word; the parser never produces it.
class Formula {
public:
    Formula();  // True

    static Formula truth();
    static Formula falsity();
    static Formula end();
    static Formula atom(PropId id, std::string name);
    static Formula negation(Formula f);
    static Formula conjunction(Formula lhs, Formula rhs);
    static Formula disjunction(Formula lhs, Formula rhs);
    static Formula next(Formula f);
    static Formula weak_next(Formula f);
    static Formula until(Formula lhs, Formula rhs);
    static Formula release(Formula lhs, Formula rhs);
    static Formula make(Op op, Formula lhs, Formula rhs = {});

    Op op() const noexcept;
    /// First operand (unary or binary).
    const Formula& lhs() const;
    /// Second operand (binary only).
    const Formula& rhs() const;
    PropId atom_id() const;
    const std::string& atom_name() const;

    std::size_t hash() const noexcept;
    std::size_t size() const noexcept;
    std::size_t depth() const noexcept;
    /// Bitmask of the atom ids occurring in the formula.
    std::uint64_t atom_mask() const noexcept;
    bool contains_end() const noexcept;

    bool is(Op op) const noexcept { return this->op() == op; }
    bool same_node(const Formula& other) const noexcept { return node_ == other.node_; }

    friend bool operator==(const Formula& a, const Formula& b);
    /// Total order: kind tag, then children left to right, then atom name.
    friend std::strong_ordering operator<=>(const Formula& a, const Formula& b);

private:
    friend Formula canonicalize(const Formula& f);
    explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

struct Node {
    Op op;
    PropId atom_id = 0;
    std::string atom_name;
    std::optional<Formula> lhs;
    std::optional<Formula> rhs;
    std::size_t hash = 0;
    std::uint32_t size = 1;
    std::uint32_t depth = 1;
    std::uint64_t atom_mask = 0;
    bool has_end = false;
    // Set once canonicalize has produced or confirmed this node.
    mutable std::atomic<bool> canonical{false};
};

namespace detail {
[[noreturn]] void missing_operand();
}  // namespace detail

inline Op Formula::op() const noexcept { return node_->op; }
inline const Formula& Formula::lhs() const {
    if (!node_->lhs) [[unlikely]] detail::missing_operand();
    return *node_->lhs;
}
inline const Formula& Formula::rhs() const {
    if (!node_->rhs) [[unlikely]] detail::missing_operand();
    return *node_->rhs;
}
inline PropId Formula::atom_id() const { return node_->atom_id; }
inline const std::string& Formula::atom_name() const { return node_->atom_name; }
inline std::size_t Formula::hash() const noexcept { return node_->hash; }
inline std::size_t Formula::size() const noexcept { return node_->size; }
inline std::size_t Formula::depth() const noexcept { return node_->depth; }
inline std::uint64_t Formula::atom_mask() const noexcept { return node_->atom_mask; }
inline bool Formula::contains_end() const noexcept { return node_->has_end; }

/// Prints in the concrete grammar with minimal parentheses. `End` prints as
/// the reserved word `end`, which the parser rejects.
std::string to_string(const Formula& f);

/// Pushes negations down to atoms (and `End`).
Formula to_nnf(const Formula& f);

/// Deterministic normal form: constant folding, flattening and sorting of
/// `&`/`|` operands, idempotence, complement detection and double-negation
/// elimination. Preserves semantics on every finite word, empty included.
Formula canonicalize(const Formula& f);

/// Evaluates `f` on a nonempty trace. Throws EmptyTrace on an empty trace.
bool evaluate(const Formula& f, const Trace& trace);

}  // namespace tremble::ltlf

template <>
struct std::hash<tremble::ltlf::Formula> {
    std::size_t operator()(const tremble::ltlf::Formula& f) const noexcept { return f.hash(); }
};
