#include "tremble/solver/value_iteration.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "tremble/errors.hpp"
#include "tremble/kernels/kernels.hpp"

namespace tremble::solver {

namespace {

inline double choice_value_with(const SubMdpst& z, std::uint32_t c, const double* v, kernels::GatherMinFn gmin) {
    double sum = 0;
    for (auto o = z.outcome_begin[c]; o < z.outcome_begin[c + 1]; ++o) {
        const auto b = z.elem_begin[o];
        sum += z.mass[o] * gmin(v, z.elems.data() + b, z.elem_begin[o + 1] - b);
    }
    return sum;
}

inline double backup_with(const SubMdpst& z, std::uint32_t s, const double* v, kernels::GatherMinFn gmin) {
    double best = 0;
    for (auto c = z.choice_begin[s]; c < z.choice_begin[s + 1]; ++c) best = std::max(best, choice_value_with(z, c, v, gmin));
    return best;
}

}  // namespace

double choice_value(const SubMdpst& z, std::uint32_t choice, const std::vector<double>& v) {
    return choice_value_with(z, choice, v.data(), kernels::active().gather_min);
}

double backup(const SubMdpst& z, std::uint32_t s, const std::vector<double>& v) {
    if (z.role[s] != Role::Open) return v[s];
    return backup_with(z, s, v.data(), kernels::active().gather_min);
}

std::vector<bool> almost_sure(const SubMdpst& z) {
    const std::size_t n = z.num_states();
    std::vector<bool> x(n);
    for (std::uint32_t s = 0; s < n; ++s) x[s] = !z.sink(s);
    std::vector<std::uint32_t> owner(z.action.size()), choice_of(z.mass.size());
    for (std::uint32_t s = 0; s < n; ++s)
        for (auto c = z.choice_begin[s]; c < z.choice_begin[s + 1]; ++c) {
            owner[c] = s;
            for (auto o = z.outcome_begin[c]; o < z.outcome_begin[c + 1]; ++o) choice_of[o] = c;
        }
    while (true) {
        // choices that surely stay in x, and for each of their sets the
        // number of elements not yet in y
        std::vector<std::uint32_t> pending(z.mass.size(), 0);
        std::vector<std::vector<std::uint32_t>> uses(n);
        for (std::uint32_t s = 0; s < n; ++s) {
            if (!x[s] || z.role[s] != Role::Open) continue;
            for (auto c = z.choice_begin[s]; c < z.choice_begin[s + 1]; ++c) {
                bool stays = true;
                for (auto e = z.elem_begin[z.outcome_begin[c]]; e < z.elem_begin[z.outcome_begin[c + 1]]; ++e)
                    stays = stays && x[z.elems[e]];
                if (!stays) continue;
                for (auto o = z.outcome_begin[c]; o < z.outcome_begin[c + 1]; ++o) {
                    pending[o] = z.elem_begin[o + 1] - z.elem_begin[o];
                    for (auto e = z.elem_begin[o]; e < z.elem_begin[o + 1]; ++e) uses[z.elems[e]].push_back(o);
                }
            }
        }
        std::vector<bool> y(n, false);
        std::vector<std::uint32_t> queue;
        for (std::uint32_t s = 0; s < n; ++s)
            if (z.goal(s) && x[s]) {
                y[s] = true;
                queue.push_back(s);
            }
        while (!queue.empty()) {
            const auto t = queue.back();
            queue.pop_back();
            for (auto o : uses[t]) {
                if (--pending[o] != 0) continue;
                const auto s = owner[choice_of[o]];
                if (!y[s]) {
                    y[s] = true;
                    queue.push_back(s);
                }
            }
        }
        if (y == x) return x;
        x = std::move(y);
    }
}

ValueFn robust_vi(const SubMdpst& z, const ViOptions& opts) {
    if (!(opts.epsilon > 0)) throw InputError("epsilon must be positive");
    const auto& k = kernels::active();
    const std::size_t n = z.num_states();
    ValueFn out;
    out.v.assign(n, 0.0);
    std::vector<bool> fixed(n, false);
    if (opts.qualitative) fixed = almost_sure(z);
    std::vector<std::uint32_t> open;
    for (std::uint32_t s = 0; s < n; ++s) {
        if (z.goal(s) || fixed[s]) out.v[s] = 1.0;
        if (z.role[s] == Role::Open && !fixed[s]) open.push_back(s);
    }

    if (opts.sweep == Sweep::GaussSeidel) {
        do {
            double residual = 0;
            for (auto s : open) {
                const double nv = std::clamp(backup_with(z, s, out.v.data(), k.gather_min), 0.0, 1.0);
                residual = std::max(residual, std::abs(nv - out.v[s]));
                out.v[s] = nv;
            }
            out.residual = residual;
            ++out.iterations;
        } while (out.residual >= opts.epsilon);
        return out;
    }

    // Jacobi: each worker reads only the previous vector, so the result does
    // not depend on the worker count. Entries outside `open` never change, so
    // the two buffers can simply be swapped.
    const unsigned workers = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(open.size())));
    std::vector<double> next = out.v;
    do {
        auto sweep = [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i)
                next[open[i]] = std::clamp(backup_with(z, open[i], out.v.data(), k.gather_min), 0.0, 1.0);
        };
        if (workers == 1) {
            sweep(0, open.size());
        } else {
            std::vector<std::jthread> pool;
            const std::size_t chunk = (open.size() + workers - 1) / workers;
            for (unsigned w = 0; w < workers; ++w) {
                const std::size_t lo = w * chunk, hi = std::min(open.size(), lo + chunk);
                if (lo < hi) pool.emplace_back(sweep, lo, hi);
            }
        }
        out.residual = k.max_abs_diff(next.data(), out.v.data(), n);
        out.v.swap(next);
        ++out.iterations;
    } while (out.residual >= opts.epsilon);
    return out;
}

}  // namespace tremble::solver
