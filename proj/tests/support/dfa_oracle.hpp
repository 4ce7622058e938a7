#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "support/formulas.hpp"
#include "tremble/ltlf/dfa.hpp"

namespace tremble::testing {

/// Counts traces of length 1..max_len on which the compiled automaton of `f`
/// disagrees with the trace semantics. Walks the trace tree depth-first so
/// each prefix is stepped once.
inline std::size_t dfa_mismatches(const ltlf::Formula& f, const ltlf::PropSet& props, std::size_t max_len) {
    ltlf::Dfa dfa(f, props);
    const std::uint64_t symbols = std::uint64_t{1} << props.size();
    std::size_t bad = 0;
    ltlf::Trace t;
    auto walk = [&](auto& self, ltlf::DfaState q) -> void {
        if (t.size() == max_len) return;
        for (std::uint64_t s = 0; s < symbols; ++s) {
            t.push_back(ltlf::Interpretation{s});
            const ltlf::DfaState next = dfa.step(q, t.back());
            bad += dfa.accepting(next) != ltlf::evaluate(f, t);
            self(self, next);
            t.pop_back();
        }
    };
    walk(walk, dfa.initial());
    return bad;
}

/// The canonical depth-(d-1) pool reduced to one smallest formula per
/// semantic class over the traces of length <= max_len, then closed under
/// one more operator layer and deduplicated by canonical form.
inline std::vector<ltlf::Formula> next_layer_over_classes(const ltlf::PropSet& props, int d, std::size_t max_len) {
    const auto traces = enumerate_traces(props.size(), max_len);
    std::map<std::vector<bool>, ltlf::Formula> reps;
    for (const auto& f : enumerate_formulas(props, d - 1, true)) {
        std::vector<bool> sig;
        sig.reserve(traces.size());
        for (const auto& t : traces) sig.push_back(ltlf::evaluate(f, t));
        auto [it, fresh] = reps.emplace(std::move(sig), f);
        if (!fresh && f.size() < it->second.size()) it->second = f;
    }
    std::vector<ltlf::Formula> base;
    for (auto& [sig, f] : reps) base.push_back(f);

    std::unordered_set<ltlf::Formula> seen;
    std::vector<ltlf::Formula> out;
    auto add = [&](const ltlf::Formula& f) {
        ltlf::Formula c = ltlf::canonicalize(f);
        if (seen.insert(c).second) out.push_back(c);
    };
    for (const auto& f : base)
        for (auto op : kUnary) add(ltlf::Formula::make(op, f));
    for (const auto& l : base)
        for (const auto& r : base)
            for (auto op : kBinary) add(ltlf::Formula::make(op, l, r));
    return out;
}

}  // namespace tremble::testing
