#include "tremble/ltlf/dfa.hpp"

#include <algorithm>
#include <iterator>
#include <map>
#include <queue>
#include <sstream>

#include "tremble/errors.hpp"

namespace tremble::ltlf {

namespace {

Formula prog(const Formula& f, Interpretation sigma) {
    switch (f.op()) {
        case Op::True: return f;
        case Op::False:
        case Op::End: return Formula::falsity();
        case Op::Atom: return sigma.contains(f.atom_id()) ? Formula::truth() : Formula::falsity();
        case Op::Not: return Formula::negation(prog(f.lhs(), sigma));
        case Op::And:
        case Op::Or: return Formula::make(f.op(), prog(f.lhs(), sigma), prog(f.rhs(), sigma));
        // the successor position must exist
        case Op::Next: return Formula::conjunction(f.lhs(), Formula::negation(Formula::end()));
        case Op::WeakNext: return Formula::disjunction(f.lhs(), Formula::end());
        case Op::Until:
            return Formula::disjunction(
                prog(f.rhs(), sigma),
                Formula::conjunction(prog(f.lhs(), sigma),
                                     Formula::conjunction(f, Formula::negation(Formula::end()))));
        case Op::Release:
            return Formula::conjunction(
                prog(f.rhs(), sigma),
                Formula::disjunction(prog(f.lhs(), sigma), Formula::disjunction(f, Formula::end())));
    }
    throw InternalError("unreachable");
}

// Disjunctive normal form over literals: atoms, End, and X/N/U/R subformulas,
// each possibly negated. Literals are numbered per table with a base formula
// at 2k and its negation at 2k+1; a cube is a sorted literal set.
using Lit = std::uint32_t;
using Cube = std::vector<Lit>;
using Dnf = std::vector<Cube>;

}  // namespace

struct Dfa::Literals {
    std::vector<Formula> formula;
    std::vector<char> eps;
    std::unordered_map<Formula, Lit> index;
    Lit end;

    Literals() : end(intern(Formula::end())) {}

    Lit intern(const Formula& f) {
        const bool negated = f.is(Op::Not);
        const Formula& base = negated ? f.lhs() : f;
        auto [it, fresh] = index.emplace(base, static_cast<Lit>(formula.size()));
        if (fresh) {
            formula.push_back(base);
            formula.push_back(canonicalize(Formula::negation(base)));
            const bool e = eps_accepting(base);
            eps.push_back(e);
            eps.push_back(!e);
        }
        return it->second + (negated ? 1 : 0);
    }
};

namespace {

using Literals = Dfa::Literals;

// Sorted merge; false when the result contains a complementary pair.
bool merge_cubes(const Cube& x, const Cube& y, Cube& out) {
    out.clear();
    std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        if ((out[i] & 1) == 0 && out[i + 1] == out[i] + 1) return false;
    }
    return true;
}

// Applies the End rules to one cube; false when the cube is unsatisfiable.
bool settle_end(Cube& cube, const Literals& lits) {
    const Lit end = lits.end, not_end = lits.end + 1;
    bool has_end = false, has_not_end = false, needs_step = false;
    for (Lit l : cube) {
        if (l == end) has_end = true;
        else if (l == not_end) has_not_end = true;
        else if (!lits.eps[l]) needs_step = true;
    }
    if (has_end && (has_not_end || needs_step)) return false;
    if (has_end) {
        // every other literal holds on the empty word, the only word End admits
        cube = {end};
    } else if (has_not_end && needs_step) {
        std::erase(cube, not_end);
    }
    return true;
}

Dnf reduce(Dnf dnf, const Literals& lits) {
    Dnf settled;
    for (auto& c : dnf) {
        if (settle_end(c, lits)) settled.push_back(std::move(c));
    }
    std::sort(settled.begin(), settled.end(), [](const Cube& x, const Cube& y) {
        if (x.size() != y.size()) return x.size() < y.size();
        return x < y;
    });
    settled.erase(std::unique(settled.begin(), settled.end()), settled.end());
    // drop cubes implied by a smaller kept cube
    Dnf kept;
    for (auto& c : settled) {
        const bool subsumed = std::any_of(kept.begin(), kept.end(), [&](const Cube& k) {
            return std::includes(c.begin(), c.end(), k.begin(), k.end());
        });
        if (!subsumed) kept.push_back(std::move(c));
    }
    // End is redundant beside a cube that already holds on the empty word
    const Cube end_cube{lits.end};
    if (kept.size() > 1 && std::find(kept.begin(), kept.end(), end_cube) != kept.end()) {
        const bool covered = std::any_of(kept.begin(), kept.end(), [&](const Cube& c) {
            return c != end_cube && std::all_of(c.begin(), c.end(), [&](Lit l) { return lits.eps[l] != 0; });
        });
        if (covered) std::erase(kept, end_cube);
    }
    return kept;
}

Dnf product(const Dnf& x, const Dnf& y, const Literals& lits) {
    Dnf out;
    Cube merged;
    for (const auto& a : x)
        for (const auto& b : y)
            if (merge_cubes(a, b, merged)) out.push_back(merged);
    return reduce(std::move(out), lits);
}

Dnf to_dnf(const Formula& f, bool negate, Literals& lits) {
    switch (f.op()) {
        case Op::True: return negate ? Dnf{} : Dnf{Cube{}};
        case Op::False: return negate ? Dnf{Cube{}} : Dnf{};
        case Op::Not: return to_dnf(f.lhs(), !negate, lits);
        case Op::And:
        case Op::Or: {
            Dnf l = to_dnf(f.lhs(), negate, lits), r = to_dnf(f.rhs(), negate, lits);
            if (f.is(Op::Or) != negate) {
                l.insert(l.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
                return reduce(std::move(l), lits);
            }
            return product(l, r, lits);
        }
        default: return Dnf{Cube{lits.intern(f) ^ (negate ? 1u : 0u)}};
    }
}

Formula from_dnf(const Dnf& dnf, const Literals& lits) {
    Formula out = Formula::falsity();
    for (const auto& cube : dnf) {
        Formula c = Formula::truth();
        for (Lit l : cube) c = Formula::conjunction(c, lits.formula[l]);
        out = Formula::disjunction(out, c);
    }
    return canonicalize(out);
}

}  // namespace

Formula normalize_residual(const Formula& f) {
    Literals lits;
    return from_dnf(to_dnf(canonicalize(f), false, lits), lits);
}

Formula progress(const Formula& f, Interpretation sigma) { return canonicalize(prog(f, sigma)); }

bool eps_accepting(const Formula& f) {
    switch (f.op()) {
        case Op::True:
        case Op::End:
        case Op::WeakNext:
        case Op::Release: return true;
        case Op::False:
        case Op::Atom:
        case Op::Next:
        case Op::Until: return false;
        case Op::Not: return !eps_accepting(f.lhs());
        case Op::And: return eps_accepting(f.lhs()) && eps_accepting(f.rhs());
        case Op::Or: return eps_accepting(f.lhs()) || eps_accepting(f.rhs());
    }
    throw InternalError("unreachable");
}

// ---- lazy automaton -------------------------------------------------------

Dfa::Dfa(const Formula& f, PropSet props) : props_(std::move(props)), lits_(std::make_unique<Literals>()) {
    std::lock_guard lock(mu_);
    intern(to_dnf(canonicalize(f), false, *lits_));
}

Dfa::~Dfa() = default;

DfaState Dfa::intern(std::vector<std::vector<std::uint32_t>> cubes) const {
    if (auto it = by_cubes_.find(cubes); it != by_cubes_.end()) return it->second;
    Formula f = from_dnf(cubes, *lits_);
    DfaState id;
    if (auto it = index_.find(f); it != index_.end()) {
        id = it->second;
    } else {
        id = static_cast<DfaState>(states_.size());
        states_.push_back({f, f.atom_mask(), eps_accepting(f), cubes});
        index_.emplace(f, id);
    }
    by_cubes_.emplace(std::move(cubes), id);
    return id;
}

// The state is a disjunction of literal cubes, so its residual is the same
// combination of literal residuals, each of which is memoized.
const std::vector<std::vector<std::uint32_t>>& Dfa::literal_residual(std::uint32_t lit, Interpretation sigma) const {
    const Formula& f = lits_->formula[lit];
    const LiteralKey key{lit, sigma.bits & f.atom_mask()};
    if (auto it = literal_memo_.find(key); it != literal_memo_.end()) return it->second;
    Dnf r = to_dnf(prog(f, Interpretation{key.sigma}), false, *lits_);
    return literal_memo_.emplace(key, std::move(r)).first->second;
}

DfaState Dfa::step(DfaState q, Interpretation sigma) const {
    std::lock_guard lock(mu_);
    const MemoKey key{q, sigma.bits & states_.at(q).mask};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Dnf next_cubes;
    for (const auto& cube : states_[q].cubes) {
        Dnf acc{Cube{}};
        for (Lit lit : cube) {
            acc = product(acc, literal_residual(lit, sigma), *lits_);
            if (acc.empty()) break;
        }
        next_cubes.insert(next_cubes.end(), std::make_move_iterator(acc.begin()), std::make_move_iterator(acc.end()));
    }
    const DfaState next = intern(reduce(std::move(next_cubes), *lits_));
    memo_.emplace(key, next);
    return next;
}

bool Dfa::accepting(DfaState q) const {
    std::lock_guard lock(mu_);
    return states_.at(q).accepting;
}

Formula Dfa::formula(DfaState q) const {
    std::lock_guard lock(mu_);
    return states_.at(q).formula;
}

std::size_t Dfa::discovered() const {
    std::lock_guard lock(mu_);
    return states_.size();
}

bool Dfa::accepts(const Trace& trace) const {
    if (trace.empty()) throw EmptyTrace();
    DfaState q = initial();
    for (auto sigma : trace) q = step(q, sigma);
    return accepting(q);
}

// ---- explicit automata ----------------------------------------------------

bool ExplicitDfa::accepts(const Trace& trace) const {
    if (trace.empty()) throw EmptyTrace();
    std::uint32_t q = initial;
    for (auto sigma : trace) q = next(q, static_cast<std::size_t>(sigma.bits));
    return accepting[q];
}

std::size_t ExplicitDfa::num_accepting() const {
    return static_cast<std::size_t>(std::count(accepting.begin(), accepting.end(), true));
}

ExplicitDfa materialize(const Dfa& dfa, std::size_t max_states) {
    const std::size_t k = dfa.props().size();
    if (k > kMaxMaterializedProps) throw AlphabetTooLarge(k, kMaxMaterializedProps);

    ExplicitDfa out;
    out.props = dfa.props();
    out.num_symbols = std::size_t{1} << k;

    std::unordered_map<DfaState, std::uint32_t> number;
    std::vector<DfaState> order;
    auto visit = [&](DfaState q) {
        auto [it, fresh] = number.emplace(q, static_cast<std::uint32_t>(order.size()));
        if (fresh) {
            if (order.size() == max_states) throw StateLimitExceeded(max_states);
            order.push_back(q);
        }
        return it->second;
    };

    visit(dfa.initial());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const DfaState q = order[i];
        for (std::size_t sym = 0; sym < out.num_symbols; ++sym) {
            out.delta.push_back(visit(dfa.step(q, Interpretation{sym})));
        }
    }
    out.num_states = order.size();
    out.accepting.reserve(order.size());
    for (auto q : order) out.accepting.push_back(dfa.accepting(q));
    return out;
}

ExplicitDfa minimize(const ExplicitDfa& dfa) {
    const std::size_t nsym = dfa.num_symbols;

    // Restrict to reachable states first.
    std::vector<std::uint32_t> reach_id(dfa.num_states, UINT32_MAX);
    std::vector<std::uint32_t> reach{dfa.initial};
    reach_id[dfa.initial] = 0;
    for (std::size_t i = 0; i < reach.size(); ++i) {
        for (std::size_t a = 0; a < nsym; ++a) {
            auto t = dfa.next(reach[i], a);
            if (reach_id[t] == UINT32_MAX) {
                reach_id[t] = static_cast<std::uint32_t>(reach.size());
                reach.push_back(t);
            }
        }
    }
    const std::size_t n = reach.size();
    std::vector<std::uint32_t> delta(n * nsym);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < nsym; ++a) delta[i * nsym + a] = reach_id[dfa.next(reach[i], a)];

    // Inverse transitions per symbol.
    std::vector<std::vector<std::uint32_t>> inverse(n * nsym);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < nsym; ++a) inverse[delta[i * nsym + a] * nsym + a].push_back(i);

    // Hopcroft refinement.
    std::vector<std::uint32_t> block(n);
    std::vector<std::vector<std::uint32_t>> blocks;
    {
        std::vector<std::uint32_t> acc, rej;
        for (std::uint32_t i = 0; i < n; ++i) (dfa.accepting[reach[i]] ? acc : rej).push_back(i);
        for (auto* part : {&acc, &rej}) {
            if (part->empty()) continue;
            for (auto s : *part) block[s] = static_cast<std::uint32_t>(blocks.size());
            blocks.push_back(std::move(*part));
        }
    }
    std::deque<std::pair<std::uint32_t, std::size_t>> work;
    std::vector<std::vector<char>> queued(blocks.size(), std::vector<char>(nsym, 0));
    auto enqueue = [&](std::uint32_t b, std::size_t a) {
        if (!queued[b][a]) {
            queued[b][a] = 1;
            work.emplace_back(b, a);
        }
    };
    if (blocks.size() == 2) {
        const std::uint32_t smaller = blocks[0].size() <= blocks[1].size() ? 0 : 1;
        for (std::size_t a = 0; a < nsym; ++a) enqueue(smaller, a);
    }

    std::vector<bool> in_x(n);
    while (!work.empty()) {
        auto [splitter, a] = work.front();
        work.pop_front();
        queued[splitter][a] = 0;

        std::vector<std::uint32_t> x;
        for (auto t : blocks[splitter])
            for (auto s : inverse[t * nsym + a]) x.push_back(s);
        if (x.empty()) continue;
        for (auto s : x) in_x[s] = true;

        std::map<std::uint32_t, std::size_t> touched;
        for (auto s : x) ++touched[block[s]];

        for (auto [b, count] : touched) {
            if (count == blocks[b].size()) continue;
            std::vector<std::uint32_t> inside, outside;
            for (auto s : blocks[b]) (in_x[s] ? inside : outside).push_back(s);
            const auto nb = static_cast<std::uint32_t>(blocks.size());
            blocks[b] = std::move(outside);
            for (auto s : inside) block[s] = nb;
            blocks.push_back(std::move(inside));
            queued.emplace_back(nsym, 0);
            for (std::size_t c = 0; c < nsym; ++c) {
                if (queued[b][c]) {
                    enqueue(nb, c);
                } else {
                    enqueue(blocks[b].size() <= blocks[nb].size() ? b : nb, c);
                }
            }
        }
        for (auto s : x) in_x[s] = false;
    }

    // Canonical numbering by BFS over blocks.
    ExplicitDfa out;
    out.props = dfa.props;
    out.num_symbols = nsym;
    std::vector<std::uint32_t> number(blocks.size(), UINT32_MAX);
    std::vector<std::uint32_t> order{block[0]};
    number[block[0]] = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::uint32_t rep = blocks[order[i]].front();
        for (std::size_t a = 0; a < nsym; ++a) {
            const std::uint32_t tb = block[delta[rep * nsym + a]];
            if (number[tb] == UINT32_MAX) {
                number[tb] = static_cast<std::uint32_t>(order.size());
                order.push_back(tb);
            }
            out.delta.push_back(number[tb]);
        }
    }
    out.num_states = order.size();
    for (auto b : order) out.accepting.push_back(dfa.accepting[reach[blocks[b].front()]]);
    return out;
}

std::string to_dot(const ExplicitDfa& dfa) {
    std::ostringstream os;
    os << "digraph dfa {\n  rankdir=LR;\n  init [shape=point];\n";
    for (std::size_t q = 0; q < dfa.num_states; ++q) {
        os << "  q" << q << " [shape=" << (dfa.accepting[q] ? "doublecircle" : "circle") << "];\n";
    }
    os << "  init -> q" << dfa.initial << ";\n";
    for (std::uint32_t q = 0; q < dfa.num_states; ++q) {
        std::map<std::uint32_t, std::vector<std::string>> edges;
        for (std::size_t a = 0; a < dfa.num_symbols; ++a) {
            edges[dfa.next(q, a)].push_back(to_string(Interpretation{a}, dfa.props));
        }
        for (const auto& [t, labels] : edges) {
            os << "  q" << q << " -> q" << t << " [label=\"";
            for (std::size_t i = 0; i < labels.size(); ++i) os << (i ? ", " : "") << labels[i];
            os << "\"];\n";
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace tremble::ltlf
