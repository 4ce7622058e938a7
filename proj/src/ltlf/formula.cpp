#include "tremble/ltlf/formula.hpp"

#include <algorithm>
#include <cctype>

#include "tremble/errors.hpp"

namespace tremble::ltlf {

// ---- PropSet --------------------------------------------------------------

PropSet::PropSet(std::initializer_list<std::string> names) {
    for (const auto& n : names) add(n);
}

PropSet::PropSet(const std::vector<std::string>& names) {
    for (const auto& n : names) add(n);
}

bool PropSet::valid_name(std::string_view name) {
    static constexpr std::string_view reserved[] = {"X", "N", "F", "G", "U", "R", "true", "false", "end"};
    if (std::find(std::begin(reserved), std::end(reserved), name) != std::end(reserved)) return false;
    if (name.empty() || !std::isalpha(static_cast<unsigned char>(name.front()))) return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

PropId PropSet::add(const std::string& name) {
    if (auto it = index_.find(name); it != index_.end()) return it->second;
    if (!valid_name(name)) throw InvalidModel("invalid proposition name '" + name + "'");
    if (names_.size() == kMaxProps) throw AlphabetTooLarge(names_.size() + 1, kMaxProps);
    auto id = static_cast<PropId>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
}

std::optional<PropId> PropSet::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Interpretation Interpretation::of(const PropSet& props, const std::vector<std::string>& names) {
    Interpretation sigma;
    for (const auto& n : names) {
        auto id = props.find(n);
        if (!id) throw UnknownAtom(n);
        sigma.insert(*id);
    }
    return sigma;
}

std::string to_string(Interpretation sigma, const PropSet& props) {
    std::vector<std::string> names;
    for (PropId i = 0; i < props.size(); ++i) {
        if (sigma.contains(i)) names.push_back(props.name(i));
    }
    std::sort(names.begin(), names.end());
    std::string out = "{";
    for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
    return out + "}";
}

// ---- Formula construction ---------------------------------------------------

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::shared_ptr<const Node> leaf(Op op) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->hash = mix(0x51ed27, static_cast<std::size_t>(op));
    n->has_end = op == Op::End;
    return n;
}

}  // namespace

Formula::Formula() : node_(truth().node_) {}

Formula Formula::truth() {
    static const Formula t{leaf(Op::True)};
    return t;
}

Formula Formula::falsity() {
    static const Formula f{leaf(Op::False)};
    return f;
}

Formula Formula::end() {
    static const Formula e{leaf(Op::End)};
    return e;
}

Formula Formula::atom(PropId id, std::string name) {
    auto n = std::make_shared<Node>();
    n->op = Op::Atom;
    n->atom_id = id;
    n->hash = mix(mix(0x51ed27, static_cast<std::size_t>(Op::Atom)), std::hash<std::string>{}(name));
    n->atom_name = std::move(name);
    n->atom_mask = id < 64 ? std::uint64_t{1} << id : 0;
    return Formula{std::move(n)};
}

Formula Formula::make(Op op, Formula lhs, Formula rhs) {
    switch (arity(op)) {
        case 0:
            if (op == Op::True) return truth();
            if (op == Op::False) return falsity();
            if (op == Op::End) return end();
            throw InternalError("Formula::make cannot build atoms");
        default: break;
    }
    auto n = std::make_shared<Node>();
    n->op = op;
    std::size_t h = mix(0x51ed27, static_cast<std::size_t>(op));
    h = mix(h, lhs.hash());
    n->size = 1 + static_cast<std::uint32_t>(lhs.size());
    n->depth = 1 + static_cast<std::uint32_t>(lhs.depth());
    n->atom_mask = lhs.atom_mask();
    n->has_end = lhs.contains_end();
    if (arity(op) == 2) {
        h = mix(h, rhs.hash());
        n->size += static_cast<std::uint32_t>(rhs.size());
        n->depth = std::max<std::uint32_t>(n->depth, 1 + static_cast<std::uint32_t>(rhs.depth()));
        n->atom_mask |= rhs.atom_mask();
        n->has_end = n->has_end || rhs.contains_end();
        n->rhs = std::move(rhs);
    }
    n->lhs = std::move(lhs);
    n->hash = h;
    return Formula{std::move(n)};
}

Formula Formula::negation(Formula f) { return make(Op::Not, std::move(f)); }
Formula Formula::conjunction(Formula l, Formula r) { return make(Op::And, std::move(l), std::move(r)); }
Formula Formula::disjunction(Formula l, Formula r) { return make(Op::Or, std::move(l), std::move(r)); }
Formula Formula::next(Formula f) { return make(Op::Next, std::move(f)); }
Formula Formula::weak_next(Formula f) { return make(Op::WeakNext, std::move(f)); }
Formula Formula::until(Formula l, Formula r) { return make(Op::Until, std::move(l), std::move(r)); }
Formula Formula::release(Formula l, Formula r) { return make(Op::Release, std::move(l), std::move(r)); }

namespace detail {
void missing_operand() { throw InternalError("formula node lacks the requested operand"); }
}  // namespace detail


bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash() || a.op() != b.op() || a.size() != b.size()) return false;
    switch (arity(a.op())) {
        case 0: return a.op() != Op::Atom || a.atom_name() == b.atom_name();
        case 1: return a.lhs() == b.lhs();
        default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    }
}

std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.op() <=> b.op(); c != 0) return c;
    switch (arity(a.op())) {
        case 0:
            if (a.op() != Op::Atom) return std::strong_ordering::equal;
            return a.atom_name().compare(b.atom_name()) <=> 0;
        case 1: return a.lhs() <=> b.lhs();
        default:
            if (auto c = a.lhs() <=> b.lhs(); c != 0) return c;
            return a.rhs() <=> b.rhs();
    }
}

// ---- printing -------------------------------------------------------------

namespace {

// Binding strength in the concrete grammar, loosest first.
int precedence(Op op) {
    switch (op) {
        case Op::Or: return 1;
        case Op::And: return 2;
        case Op::Until:
        case Op::Release: return 3;
        case Op::Not:
        case Op::Next:
        case Op::WeakNext: return 4;
        default: return 5;
    }
}

void print(const Formula& f, std::string& out);

void print_operand(const Formula& child, bool parens, std::string& out) {
    if (parens) out += '(';
    print(child, out);
    if (parens) out += ')';
}

void print(const Formula& f, std::string& out) {
    const int prec = precedence(f.op());
    switch (f.op()) {
        case Op::True: out += "true"; return;
        case Op::False: out += "false"; return;
        case Op::End: out += "end"; return;
        case Op::Atom: out += f.atom_name(); return;
        case Op::Not:
        case Op::Next:
        case Op::WeakNext:
            out += f.is(Op::Not) ? "!" : f.is(Op::Next) ? "X " : "N ";
            print_operand(f.lhs(), precedence(f.lhs().op()) < prec, out);
            return;
        case Op::And:
        case Op::Or: {
            // left-associative
            print_operand(f.lhs(), precedence(f.lhs().op()) < prec, out);
            out += f.is(Op::And) ? " & " : " | ";
            print_operand(f.rhs(), precedence(f.rhs().op()) <= prec, out);
            return;
        }
        case Op::Until:
        case Op::Release: {
            // right-associative
            print_operand(f.lhs(), precedence(f.lhs().op()) <= prec, out);
            out += f.is(Op::Until) ? " U " : " R ";
            print_operand(f.rhs(), precedence(f.rhs().op()) < prec, out);
            return;
        }
    }
}

}  // namespace

std::string to_string(const Formula& f) {
    std::string out;
    print(f, out);
    return out;
}

// ---- negation normal form -------------------------------------------------

namespace {

Formula nnf(const Formula& f, bool negate) {
    switch (f.op()) {
        case Op::True: return negate ? Formula::falsity() : f;
        case Op::False: return negate ? Formula::truth() : f;
        case Op::End:
        case Op::Atom: return negate ? Formula::negation(f) : f;
        case Op::Not: return nnf(f.lhs(), !negate);
        case Op::And:
        case Op::Or: {
            Op op = (f.is(Op::And) != negate) ? Op::And : Op::Or;
            return Formula::make(op, nnf(f.lhs(), negate), nnf(f.rhs(), negate));
        }
        case Op::Next:
        case Op::WeakNext: {
            Op op = (f.is(Op::Next) != negate) ? Op::Next : Op::WeakNext;
            return Formula::make(op, nnf(f.lhs(), negate));
        }
        case Op::Until:
        case Op::Release: {
            Op op = (f.is(Op::Until) != negate) ? Op::Until : Op::Release;
            return Formula::make(op, nnf(f.lhs(), negate), nnf(f.rhs(), negate));
        }
    }
    throw InternalError("unreachable");
}

}  // namespace

Formula to_nnf(const Formula& f) { return nnf(f, false); }

// ---- canonical form -------------------------------------------------------

namespace {

void flatten(const Formula& f, Op op, std::vector<Formula>& out) {
    if (f.op() == op) {
        flatten(f.lhs(), op, out);
        flatten(f.rhs(), op, out);
    } else {
        out.push_back(f);
    }
}

// Operands are already canonical.
Formula junction(Op op, const Formula& lhs, const Formula& rhs) {
    const Op unit = op == Op::And ? Op::True : Op::False;
    const Op zero = op == Op::And ? Op::False : Op::True;

    std::vector<Formula> items;
    flatten(lhs, op, items);
    flatten(rhs, op, items);

    std::vector<Formula> kept;
    kept.reserve(items.size());
    for (auto& item : items) {
        if (item.is(zero)) return item;
        if (!item.is(unit)) kept.push_back(std::move(item));
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

    for (const auto& item : kept) {
        if (item.is(Op::Not) && std::binary_search(kept.begin(), kept.end(), item.lhs())) {
            return zero == Op::False ? Formula::falsity() : Formula::truth();
        }
    }

    if (kept.empty()) return unit == Op::True ? Formula::truth() : Formula::falsity();
    Formula acc = kept.back();
    for (std::size_t i = kept.size() - 1; i-- > 0;) acc = Formula::make(op, kept[i], acc);
    return acc;
}

}  // namespace

namespace {

Formula canonical_form(const Formula& f) {
    switch (f.op()) {
        case Op::True:
        case Op::False:
        case Op::End:
        case Op::Atom: return f;
        case Op::Not: {
            Formula c = canonicalize(f.lhs());
            if (c.is(Op::True)) return Formula::falsity();
            if (c.is(Op::False)) return Formula::truth();
            if (c.is(Op::Not)) return c.lhs();
            return c.same_node(f.lhs()) ? f : Formula::negation(std::move(c));
        }
        case Op::And:
        case Op::Or: return junction(f.op(), canonicalize(f.lhs()), canonicalize(f.rhs()));
        case Op::Next: {
            Formula c = canonicalize(f.lhs());
            if (c.is(Op::False)) return c;
            return c.same_node(f.lhs()) ? f : Formula::next(std::move(c));
        }
        case Op::WeakNext: {
            Formula c = canonicalize(f.lhs());
            if (c.is(Op::True)) return c;
            return c.same_node(f.lhs()) ? f : Formula::weak_next(std::move(c));
        }
        case Op::Until:
        case Op::Release: {
            Formula l = canonicalize(f.lhs());
            Formula r = canonicalize(f.rhs());
            // x U false == false and x R true == true, also on the empty word
            if (f.is(Op::Until) && r.is(Op::False)) return r;
            if (f.is(Op::Release) && r.is(Op::True)) return r;
            if (l.same_node(f.lhs()) && r.same_node(f.rhs())) return f;
            return Formula::make(f.op(), std::move(l), std::move(r));
        }
    }
    throw InternalError("unreachable");
}

}  // namespace

Formula canonicalize(const Formula& f) {
    if (f.node_->canonical.load(std::memory_order_relaxed)) return f;
    Formula c = canonical_form(f);
    c.node_->canonical.store(true, std::memory_order_relaxed);
    return c;
}

// ---- trace semantics ------------------------------------------------------

namespace {

bool holds(const Formula& f, const Trace& t, std::size_t i) {
    const std::size_t n = t.size();
    switch (f.op()) {
        case Op::True: return true;
        case Op::False: return false;
        case Op::End: return false;  // i < n always: the suffix is nonempty
        case Op::Atom: return t[i].contains(f.atom_id());
        case Op::Not: return !holds(f.lhs(), t, i);
        case Op::And: return holds(f.lhs(), t, i) && holds(f.rhs(), t, i);
        case Op::Or: return holds(f.lhs(), t, i) || holds(f.rhs(), t, i);
        case Op::Next: return i + 1 < n && holds(f.lhs(), t, i + 1);
        case Op::WeakNext: return i + 1 >= n || holds(f.lhs(), t, i + 1);
        case Op::Until:
            for (std::size_t j = i; j < n; ++j) {
                if (holds(f.rhs(), t, j)) return true;
                if (!holds(f.lhs(), t, j)) return false;
            }
            return false;
        case Op::Release:
            for (std::size_t j = i; j < n; ++j) {
                if (!holds(f.rhs(), t, j)) return false;
                if (holds(f.lhs(), t, j)) return true;
            }
            return true;
    }
    throw InternalError("unreachable");
}

}  // namespace

bool evaluate(const Formula& f, const Trace& trace) {
    if (trace.empty()) throw EmptyTrace();
    return holds(f, trace, 0);
}

}  // namespace tremble::ltlf
