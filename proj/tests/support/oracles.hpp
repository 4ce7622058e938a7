#pragma once

// Brute-force reference implementations used only by tests. They share the
// sub-model data layout with the library but none of its algorithms.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "tremble/errors.hpp"
#include "tremble/solver/product.hpp"

namespace tremble::testing {

using solver::Role;
using solver::SubMdpst;

struct OracleChoice {
    std::vector<double> mass;
    std::vector<std::vector<std::uint32_t>> sets;
};

inline OracleChoice choice_at(const SubMdpst& z, std::uint32_t c) {
    OracleChoice out;
    for (auto o = z.outcome_begin[c]; o < z.outcome_begin[c + 1]; ++o) {
        out.mass.push_back(z.mass[o]);
        out.sets.emplace_back(z.elems.begin() + z.elem_begin[o], z.elems.begin() + z.elem_begin[o + 1]);
    }
    return out;
}

/// Calls f(selection) for every way of picking one element per set.
inline void for_each_selection(const std::vector<std::vector<std::uint32_t>>& sets,
                               const std::function<void(const std::vector<std::uint32_t>&)>& f) {
    std::vector<std::size_t> at(sets.size(), 0);
    std::vector<std::uint32_t> sel(sets.size());
    while (true) {
        for (std::size_t i = 0; i < sets.size(); ++i) sel[i] = sets[i][at[i]];
        f(sel);
        std::size_t i = 0;
        while (i < sets.size() && ++at[i] == sets[i].size()) at[i++] = 0;
        if (i == sets.size()) return;
    }
}

/// Best action against the worst extreme feasible distribution: each
/// selection of one element per set induces the distribution
/// Pr(s') = Σ{mass(Θ) : Θ selects s'}; its expectation is accumulated per set
/// in outcome order.
inline double extreme_backup(const SubMdpst& z, std::uint32_t s, const std::vector<double>& v) {
    double best = -1;
    for (auto c = z.choice_begin[s]; c < z.choice_begin[s + 1]; ++c) {
        const OracleChoice ch = choice_at(z, c);
        double worst = std::numeric_limits<double>::infinity();
        for_each_selection(ch.sets, [&](const std::vector<std::uint32_t>& sel) {
            double e = 0;
            for (std::size_t i = 0; i < sel.size(); ++i) e += ch.mass[i] * v[sel[i]];
            worst = std::min(worst, e);
        });
        best = std::max(best, worst);
    }
    return best;
}

/// Probability of reaching a goal in the Markov chain P (rows per state, goals
/// and sinks absorbing), by graph pruning and Gaussian elimination.
inline std::vector<double> chain_reachability(const SubMdpst& z, const std::vector<std::map<std::uint32_t, double>>& P) {
    const std::size_t n = z.num_states();
    std::vector<bool> reach(n, false);
    for (std::size_t s = 0; s < n; ++s) reach[s] = z.goal(s);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t s = 0; s < n; ++s) {
            if (reach[s] || z.role[s] != Role::Open) continue;
            for (auto [t, p] : P[s])
                if (p > 0 && reach[t]) {
                    reach[s] = changed = true;
                    break;
                }
        }
    }
    std::vector<std::size_t> var;
    std::vector<int> pos(n, -1);
    for (std::size_t s = 0; s < n; ++s)
        if (reach[s] && z.role[s] == Role::Open) {
            pos[s] = static_cast<int>(var.size());
            var.push_back(s);
        }
    const std::size_t m = var.size();
    std::vector<std::vector<double>> A(m, std::vector<double>(m + 1, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        A[i][i] = 1;
        for (auto [t, p] : P[var[i]]) {
            if (z.goal(t)) A[i][m] += p;
            else if (pos[t] >= 0) A[i][pos[t]] -= p;
        }
    }
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < m; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        for (std::size_t r = 0; r < m; ++r) {
            if (r == c || A[r][c] == 0) continue;
            const double f = A[r][c] / A[c][c];
            for (std::size_t k = c; k <= m; ++k) A[r][k] -= f * A[c][k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t s = 0; s < n; ++s)
        if (z.goal(s)) x[s] = 1.0;
    for (std::size_t i = 0; i < m; ++i) x[var[i]] = A[i][m] / A[i][i];
    return x;
}

/// Number of stationary nature selections over all (state, action, set).
inline double nature_count(const SubMdpst& z) {
    double total = 1;
    for (std::uint32_t s = 0; s < z.num_states(); ++s) {
        if (z.role[s] != Role::Open) continue;
        for (auto c = z.choice_begin[s]; c < z.choice_begin[s + 1]; ++c)
            for (auto o = z.outcome_begin[c]; o < z.outcome_begin[c + 1]; ++o)
                total *= z.elem_begin[o + 1] - z.elem_begin[o];
    }
    return total;
}

/// min over stationary deterministic natures of the goal-reaching
/// probability from the initial state when every open state s plays
/// z.action index `pick[s]` (an absolute choice index).
inline double worst_nature_value(const SubMdpst& z, const std::vector<std::uint32_t>& pick) {
    const std::size_t n = z.num_states();
    std::vector<std::uint32_t> open;
    std::vector<OracleChoice> chosen(n);
    for (std::uint32_t s = 0; s < n; ++s)
        if (z.role[s] == Role::Open) {
            open.push_back(s);
            chosen[s] = choice_at(z, pick[s]);
        }
    // one odometer over all sets of all chosen actions
    std::vector<std::vector<std::uint32_t>> sets;
    std::vector<std::pair<std::uint32_t, double>> owner;
    for (auto s : open)
        for (std::size_t i = 0; i < chosen[s].sets.size(); ++i) {
            sets.push_back(chosen[s].sets[i]);
            owner.emplace_back(s, chosen[s].mass[i]);
        }
    double worst = std::numeric_limits<double>::infinity();
    auto eval = [&](const std::vector<std::uint32_t>& sel) {
        std::vector<std::map<std::uint32_t, double>> P(n);
        for (std::size_t i = 0; i < sel.size(); ++i) P[owner[i].first][sel[i]] += owner[i].second;
        worst = std::min(worst, chain_reachability(z, P)[z.initial]);
    };
    if (sets.empty()) eval({});
    else for_each_selection(sets, eval);
    return worst;
}

/// max over memoryless deterministic strategies of min over stationary
/// deterministic natures of the reachability probability.
inline double oracle_value(const SubMdpst& z) {
    if (z.num_states() > 8) throw InstanceTooLarge(std::to_string(z.num_states()) + " states");
    if (nature_count(z) > 1e4) throw InstanceTooLarge("more than 10^4 nature selections");
    std::vector<std::uint32_t> open;
    for (std::uint32_t s = 0; s < z.num_states(); ++s) {
        if (z.role[s] != Role::Open) continue;
        if (z.choice_begin[s + 1] - z.choice_begin[s] > 3) throw InstanceTooLarge("more than 3 actions");
        open.push_back(s);
    }
    std::vector<std::uint32_t> pick(z.num_states(), 0);
    for (auto s : open) pick[s] = z.choice_begin[s];
    double best = -1;
    while (true) {
        best = std::max(best, worst_nature_value(z, pick));
        std::size_t i = 0;
        for (; i < open.size(); ++i) {
            const auto s = open[i];
            if (++pick[s] < z.choice_begin[s + 1]) break;
            pick[s] = z.choice_begin[s];
        }
        if (i == open.size()) return best;
    }
}

/// Random sub-model with at most `max_states` states, 3 actions per open
/// state, 3 sets per action and 3 elements per set, resampled until the
/// brute-force oracle accepts it. Instances with value 0 or 1 are mostly
/// rejected so that the fractional cases dominate.
inline SubMdpst random_sub(std::mt19937_64& rng, std::size_t max_states = 6, bool singleton = false) {
    while (true) {
        const std::size_t n = 3 + rng() % (max_states - 2);
        std::vector<Role> roles(n, Role::Open);
        roles[n - 1] = Role::Goal;
        roles[n - 2] = Role::Sink;
        for (std::size_t s = 1; s + 2 < n; ++s) {
            const auto r = rng() % 8;
            if (r == 0) roles[s] = Role::Goal;
            if (r == 1) roles[s] = Role::Sink;
        }
        std::vector<std::vector<abstraction::Mdpst::Choice>> choices(n);
        std::uniform_real_distribution<double> u(0.05, 1.0);
        for (std::uint32_t s = 0; s < n; ++s) {
            if (roles[s] != Role::Open) continue;
            const std::size_t actions = 1 + rng() % 3;
            for (std::uint32_t a = 0; a < actions; ++a) {
                abstraction::Mdpst::Choice c{a * 2 + static_cast<std::uint32_t>(rng() % 2), {}};
                const std::size_t outcomes = 1 + rng() % 3;
                double total = 0;
                for (std::size_t k = 0; k < outcomes; ++k) {
                    std::vector<abstraction::StateId> theta;
                    const std::size_t size = singleton ? 1 : 1 + (rng() % 5 < 3 ? 0 : rng() % 3);
                    for (std::size_t e = 0; e < size; ++e) theta.push_back(static_cast<abstraction::StateId>(rng() % n));
                    std::sort(theta.begin(), theta.end());
                    theta.erase(std::unique(theta.begin(), theta.end()), theta.end());
                    bool repeated = false;
                    for (const auto& o : c.outcomes) repeated = repeated || o.theta == theta;
                    if (repeated) continue;
                    const double m = u(rng);
                    total += m;
                    c.outcomes.push_back({theta, m});
                }
                for (auto& o : c.outcomes) o.mass /= total;
                choices[s].push_back(std::move(c));
            }
        }
        SubMdpst z = SubMdpst::from_choices(0, roles, choices);
        if (nature_count(z) > 1e4) continue;
        // keep only a quarter of the instances whose value is exactly 0 or 1
        const double v = oracle_value(z);
        if ((v < 1e-12 || v > 1 - 1e-12) && rng() % 4 != 0) continue;
        return z;
    }
}

/// Classical value iteration for singleton models: successor probabilities
/// are aggregated per target state and the iteration runs to 1e-13.
inline std::vector<double> classical_vi(const SubMdpst& z) {
    const std::size_t n = z.num_states();
    std::vector<std::vector<std::map<std::uint32_t, double>>> T(n);
    for (std::uint32_t s = 0; s < n; ++s) {
        if (z.role[s] != Role::Open) continue;
        for (auto c = z.choice_begin[s]; c < z.choice_begin[s + 1]; ++c) {
            std::map<std::uint32_t, double> row;
            for (auto o = z.outcome_begin[c]; o < z.outcome_begin[c + 1]; ++o) row[z.elems[z.elem_begin[o]]] += z.mass[o];
            T[s].push_back(std::move(row));
        }
    }
    std::vector<double> v(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) v[s] = z.goal(s) ? 1.0 : 0.0;
    for (int it = 0; it < 1000000; ++it) {
        std::vector<double> next = v;
        double delta = 0;
        for (std::size_t s = 0; s < n; ++s) {
            if (T[s].empty()) continue;
            double best = 0;
            for (const auto& row : T[s]) {
                double e = 0;
                for (auto [t, p] : row) e += p * v[t];
                best = std::max(best, e);
            }
            next[s] = best;
            delta = std::max(delta, std::abs(best - v[s]));
        }
        v = std::move(next);
        if (delta < 1e-13) break;
    }
    return v;
}

}  // namespace tremble::testing
