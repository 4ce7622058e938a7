#include "tremble/solver/synthesis.hpp"

#include <chrono>

namespace tremble::solver {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Synthesis synthesize(const domain::Domain& d, const domain::ErrorModel& e, const ltlf::Formula& goal,
                     const SolveOptions& opts) {
    Synthesis out;
    auto t0 = std::chrono::steady_clock::now();
    out.model = std::make_shared<const Mdpst>(abstraction::abstract(d, e));
    out.dfa = std::make_shared<const ltlf::Dfa>(goal, d.props());
    out.product = build_product(out.model, out.dfa);
    out.partition = partition(*out.product);
    out.build_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    const ProductState init = out.product->state(out.product->initial());
    if (!out.partition.relevant_state(out.product->initial())) {
        out.strategy = std::make_shared<const Strategy>(out.model, out.dfa, init, std::vector<Strategy::Entry>{},
                                                        std::vector<ProductState>{}, 0.0, opts.vi.epsilon, 0, 0.0);
    } else {
        out.sub = make_sub(*out.product, out.partition);
        out.values = robust_vi(*out.sub, opts.vi);
        out.strategy = std::make_shared<const Strategy>(
            extract_strategy(*out.product, *out.sub, out.values, opts.vi.epsilon));
    }
    out.solve_ms = ms_since(t0);
    return out;
}

}  // namespace tremble::solver
