#pragma once

#include <memory>
#include <optional>

#include "tremble/domain/error_model.hpp"
#include "tremble/solver/strategy.hpp"

namespace tremble::solver {

struct SolveOptions {
    ViOptions vi;
};

/// Everything the pipeline produces for one (domain, errors, formula).
struct Synthesis {
    std::shared_ptr<const Mdpst> model;
    std::shared_ptr<const ltlf::Dfa> dfa;
    std::shared_ptr<const ProductMdpst> product;
    Partition partition;
    std::optional<SubMdpst> sub;  // absent when the goal is unreachable
    ValueFn values;
    std::shared_ptr<const Strategy> strategy;
    double build_ms = 0, solve_ms = 0;

    double value() const { return strategy->value(); }
};

/// Abstraction, automaton, product, partition, value iteration and strategy
/// extraction. A goal unreachable from the initial state yields value 0 and
/// an empty strategy.
Synthesis synthesize(const domain::Domain& d, const domain::ErrorModel& e, const ltlf::Formula& goal,
                     const SolveOptions& opts = {});

}  // namespace tremble::solver
